"""Exact-arithmetic kernel for multivariate Hasse-Schmidt derivations.

Packages the base polynomial algebra over an exact field, truncated power
series over generic carriers, evaluatable differential operators with a
sound equality oracle, the Hasse-Schmidt group with its classical-derivation
correspondence, and substitution maps with their actions.
"""

from .algebra import (
    GF,
    QQ,
    CharacteristicError,
    ClassicalDerivation,
    Poly,
    parse_poly,
)
from .hs import HSDerivation, integrate_derivation_series, log_derivative_hs
from .linop import LinOp
from .multiindex import CoIdeal
from .series import Series, log_derivative, log_derivative_bar
from .subst import SubstMap, twisted_map

__all__ = [
    "GF",
    "QQ",
    "CharacteristicError",
    "ClassicalDerivation",
    "CoIdeal",
    "HSDerivation",
    "LinOp",
    "Poly",
    "Series",
    "SubstMap",
    "integrate_derivation_series",
    "log_derivative",
    "log_derivative_bar",
    "log_derivative_hs",
    "parse_poly",
    "twisted_map",
]
