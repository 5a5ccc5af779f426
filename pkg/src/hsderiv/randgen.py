"""Seeded random instances for the verification suites and tests.

Everything is driven by an explicit ``random.Random`` so a (seed, sizes)
pair reproduces a run exactly.  Generated substitution maps are only valid
when order-1 images are compatible with the truncation pair, so the shape
helpers below keep the target's total degree within the source's smallest
truncated degree.
"""

from __future__ import annotations

import random

from . import multiindex as mi
from .algebra import ClassicalDerivation, Poly
from .hs import HSDerivation
from .linop import LinOp
from .multiindex import CoIdeal
from .series import Series
from .subst import SubstMap, minimal_outside


def random_coeff(rng: random.Random, field, bound: int = 4, nonzero: bool = False):
    lo = 1 if nonzero else -bound
    val = rng.randint(lo, bound) if nonzero else rng.randint(-bound, bound)
    if nonzero and val == 0:
        val = 1
    return field.from_int(val)


def random_poly(
    rng: random.Random,
    field,
    n: int,
    max_degree: int = 2,
    terms: int = 3,
    nonzero: bool = False,
) -> Poly:
    coeffs: dict = {}
    for _ in range(rng.randint(1, terms)):
        e = tuple(rng.randint(0, max_degree) for _ in range(n))
        if sum(e) > max_degree:
            continue
        coeffs[e] = random_coeff(rng, field)
    f = Poly.from_dict(field, n, coeffs)
    if nonzero and not f:
        return Poly.constant(field, n, field.one)
    return f


def random_derivation(
    rng: random.Random, field, n: int, max_degree: int = 2
) -> ClassicalDerivation:
    return ClassicalDerivation(
        tuple(random_poly(rng, field, n, max_degree) for _ in range(n))
    )


def random_linop(rng: random.Random, field, n: int, max_degree: int = 1) -> LinOp:
    out = LinOp.zero(field, n)
    for _ in range(rng.randint(1, 2)):
        term = LinOp.identity(field, n).scale(random_coeff(rng, field))
        for _ in range(rng.randint(1, 2)):
            if rng.random() < 0.5:
                term = term * LinOp.mul_by(random_poly(rng, field, n, max_degree, nonzero=True))
            else:
                term = term * LinOp.of_derivation(random_derivation(rng, field, n, max_degree))
        out = out + term
    return out


def random_unit_scalar(rng: random.Random, field, coideal: CoIdeal) -> Series:
    coeffs = {mi.zero(coideal.p): field.one}
    for a in coideal:
        if mi.total(a) and rng.random() < 0.8:
            c = random_coeff(rng, field)
            if c:
                coeffs[a] = c
    return Series(coideal, coeffs)


def random_unit_operator(
    rng: random.Random, field, n: int, coideal: CoIdeal, max_degree: int = 1
) -> Series:
    coeffs = {mi.zero(coideal.p): LinOp.identity(field, n)}
    for a in coideal:
        if mi.total(a) and rng.random() < 0.7:
            op = random_linop(rng, field, n, max_degree)
            if op:
                coeffs[a] = op
    return Series(coideal, coeffs)


def random_hs(
    rng: random.Random, field, n: int, coideal: CoIdeal, max_degree: int = 2
) -> HSDerivation:
    images = []
    for j in range(n):
        coeffs = {mi.zero(coideal.p): Poly.variable(field, n, j)}
        for a in coideal:
            if mi.total(a) and rng.random() < 0.8:
                f = random_poly(rng, field, n, max_degree)
                if f:
                    coeffs[a] = f
        images.append(Series(coideal, coeffs))
    return HSDerivation(tuple(images))


def random_derivation_series(
    rng: random.Random, field, n: int, coideal: CoIdeal, max_degree: int = 2
) -> Series:
    coeffs = {}
    for a in coideal:
        if mi.total(a) and rng.random() < 0.8:
            d = random_derivation(rng, field, n, max_degree)
            if d:
                coeffs[a] = d
    return Series(coideal, coeffs)


def random_subst(
    rng: random.Random,
    field,
    n: int,
    source: CoIdeal,
    target: CoIdeal,
    max_degree: int = 1,
) -> SubstMap:
    """Random map for a truncation pair on which order-1 images are enough."""
    cut = min(mi.total(a) for a in minimal_outside(source))
    if target.max_total() >= cut:
        raise ValueError(
            "target truncation too deep for arbitrary order-1 images; "
            "shrink the target or raise the image orders"
        )
    images = []
    for _ in range(source.p):
        coeffs = {}
        for e in target:
            if mi.total(e) and rng.random() < 0.6:
                f = random_poly(rng, field, n, max_degree)
                if f:
                    coeffs[e] = f
        images.append(Series(target, coeffs))
    return SubstMap(source, target, tuple(images), field, n)
