"""Truncated power series over a generic coefficient carrier.

A series lives over a finite co-ideal: coefficients are indexed by the
co-ideal's members and everything outside is truncated away.  The carrier can
be a field element, a polynomial, a derivation or a linear operator; the only
requirements are the arithmetic dunders actually used by each operation
(multiplication is only needed for ring-like carriers, integer scaling for the
Euler derivations, and so on).

Coefficients that are syntactically zero (falsy) are never stored.  For
operator carriers a stored coefficient may still be semantically zero; every
comparison helper therefore accepts ``eq``/``is_zero`` callables so callers
can plug in the operator oracle.

The central transforms: for a unit r (constant term 1) and the Euler
derivation d (total, or the partial one along an axis),

    log_derivative(r)      = r* . d(r)
    log_derivative_bar(r)  = d(r) . r*

where r* is the multiplicative inverse.  Over the rationals both are
bijections onto the zero-constant-term series; ``integrate_log_derivative``
is the explicit inverse, obtained by solving the graded recursion
|a| r_a = sum_{b+c=a, |c|>0} r_b rbar_c, which divides by |a| and therefore
raises ``CharacteristicError`` over a prime field when |a| hits a multiple of
the characteristic.
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Sequence

from . import multiindex as mi
from .algebra import CharacteristicError
from .multiindex import CoIdeal, Index


def _is_one(c) -> bool:
    return c.is_one() if hasattr(c, "is_one") else c == 1


def _scale(c, s):
    """Multiply a carrier element by a field scalar."""
    return c.scale(s) if hasattr(c, "scale") else c * s


def _acc(total, x):
    return x if total is None else total + x


class Series:
    """A sparse, truncated series: co-ideal plus coefficient map."""

    __slots__ = ("coideal", "coeffs")

    def __init__(self, coideal: CoIdeal, coeffs: dict):
        kept = {}
        for a, c in coeffs.items():
            if a not in coideal:
                raise ValueError(f"support {a} outside the co-ideal")
            if c:
                kept[a] = c
        self.coideal = coideal
        self.coeffs = kept

    @classmethod
    def zero(cls, coideal: CoIdeal) -> "Series":
        return cls(coideal, {})

    def get(self, a: Index):
        """Coefficient at ``a`` or None when (syntactically) zero."""
        return self.coeffs.get(a)

    def items(self) -> Iterator[tuple[Index, object]]:
        for a in sorted(self.coeffs, key=mi.grlex_key):
            yield a, self.coeffs[a]

    def support(self) -> tuple[Index, ...]:
        return tuple(sorted(self.coeffs, key=mi.grlex_key))

    def constant_term(self):
        return self.coeffs.get(mi.zero(self.coideal.p))

    def has_unit_constant(self) -> bool:
        c = self.constant_term()
        return c is not None and _is_one(c)

    def has_zero_constant(self) -> bool:
        return self.constant_term() is None

    def _check(self, other: "Series"):
        if self.coideal != other.coideal:
            raise ValueError("co-ideal mismatch")

    def __add__(self, other: "Series") -> "Series":
        self._check(other)
        coeffs = dict(self.coeffs)
        for a, c in other.coeffs.items():
            prev = coeffs.get(a)
            coeffs[a] = c if prev is None else prev + c
        return Series(self.coideal, coeffs)

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def __neg__(self) -> "Series":
        return Series(self.coideal, {a: -c for a, c in self.coeffs.items()})

    def __mul__(self, other: "Series") -> "Series":
        """Truncated Cauchy product; the carrier supplies the pairing."""
        if not isinstance(other, Series):
            return NotImplemented
        self._check(other)
        coeffs: dict = {}
        for b, cb in self.coeffs.items():
            for g, cg in other.coeffs.items():
                a = mi.add(b, g)
                if a not in self.coideal:
                    continue
                prod = cb * cg
                prev = coeffs.get(a)
                coeffs[a] = prod if prev is None else prev + prod
        return Series(self.coideal, coeffs)

    def scale(self, s) -> "Series":
        """Left-scale every coefficient."""
        return Series(self.coideal, {a: _scale(c, s) for a, c in self.coeffs.items()})

    def map(self, f: Callable) -> "Series":
        return Series(self.coideal, {a: f(c) for a, c in self.coeffs.items()})

    def truncate(self, smaller: CoIdeal) -> "Series":
        if not smaller.is_subset(self.coideal):
            raise ValueError("truncation target is not a sub-co-ideal")
        return Series(smaller, {a: c for a, c in self.coeffs.items() if a in smaller})

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        """Syntactic coefficientwise equality; use series_equal for operator carriers."""
        return (
            isinstance(other, Series)
            and self.coideal == other.coideal
            and self.coeffs == other.coeffs
        )

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{mi.format_index(a)}: {c!r}" for a, c in self.items())
        return f"Series({{{body}}})"


def series_equal(a: Series, b: Series, *, eq=None, is_zero=None) -> bool:
    """Coefficientwise equality with pluggable semantic comparisons."""
    if a.coideal != b.coideal:
        return False
    eq = eq or (lambda x, y: x == y)
    is_zero = is_zero or (lambda c: not c)
    for key in set(a.coeffs) | set(b.coeffs):
        ca, cb = a.get(key), b.get(key)
        if ca is None:
            if not is_zero(cb):
                return False
        elif cb is None:
            if not is_zero(ca):
                return False
        elif not eq(ca, cb):
            return False
    return True


def euler_partial(r: Series, axis: int) -> Series:
    """Scale the coefficient at alpha by alpha[axis] (the partial Euler derivation)."""
    if not 0 <= axis < r.coideal.p:
        raise ValueError(f"axis {axis} out of range")
    return Series(r.coideal, {a: a[axis] * c for a, c in r.coeffs.items()})


def euler(r: Series) -> Series:
    """Scale the coefficient at alpha by the total degree |alpha|."""
    return Series(r.coideal, {a: mi.total(a) * c for a, c in r.coeffs.items()})


def apply_euler(r: Series, axis: int | None) -> Series:
    return euler(r) if axis is None else euler_partial(r, axis)


def _require_unit(r: Series):
    if not r.has_unit_constant():
        raise ValueError("series is not a unit: constant term is not 1")


def unit_inverse_closed(r: Series) -> Series:
    """Inverse of a unit via the ordered-partition formula.

    The coefficient of the inverse at a nonzero alpha is
    sum_{d=1..|alpha|} (-1)^d sum over ordered d-tuples of nonzero indices
    summing to alpha of the left-to-right product of the corresponding
    coefficients.  Exponential in |alpha|; kept as an independent
    cross-check of the recursive solver.
    """
    _require_unit(r)
    p = r.coideal.p
    one = r.constant_term()
    coeffs = {mi.zero(p): one}
    for a in r.coideal:
        if a == mi.zero(p):
            continue
        acc = None
        for d in range(1, mi.total(a) + 1):
            for parts in mi.partitions(a, d):
                factors = [r.get(part) for part in parts]
                if any(f is None for f in factors):
                    continue
                prod = factors[0]
                for f in factors[1:]:
                    prod = prod * f
                acc = _acc(acc, prod if d % 2 == 0 else -prod)
        if acc is not None:
            coeffs[a] = acc
    return Series(r.coideal, coeffs)


def unit_inverse_recursive(r: Series) -> Series:
    """Inverse of a unit by the graded solve of r . r* = 1 (the default route)."""
    _require_unit(r)
    p = r.coideal.p
    origin = mi.zero(p)
    inv = {origin: r.constant_term()}
    for a in r.coideal:
        if a == origin:
            continue
        acc = None
        for b, cb in r.coeffs.items():
            if b == origin or not mi.leq(b, a):
                continue
            g = mi.sub(a, b)
            cg = inv.get(g)
            if cg is not None:
                acc = _acc(acc, cb * cg)
        if acc is not None:
            inv[a] = -acc
    return Series(r.coideal, inv)


def log_derivative(r: Series, axis: int | None = None) -> Series:
    """r* . d(r) for the (partial) Euler derivation; zero constant term.

    The coefficient at alpha vanishes whenever alpha[axis] = 0.
    """
    _require_unit(r)
    return unit_inverse_recursive(r) * apply_euler(r, axis)


def log_derivative_bar(r: Series, axis: int | None = None) -> Series:
    """The conjugate transform d(r) . r*; equals r . log_derivative(r) . r*."""
    _require_unit(r)
    return apply_euler(r, axis) * unit_inverse_recursive(r)


def recursion_check(r: Series, *, is_zero=None) -> tuple[bool, str | None]:
    """Verify the graded recursions tying a unit to its log-derivatives.

    For every axis i and every alpha:
        alpha_i r_alpha = sum_{b+c=alpha, c_i>0} r_b e^i_c
                        = sum_{b+c=alpha, c_i>0} ebar^i_c r_b
    and the total-degree analogue with |c| > 0.  Returns (ok, detail of the
    first failing case).
    """
    is_zero = is_zero or (lambda c: not c)
    p = r.coideal.p
    transforms = [(None, log_derivative(r), log_derivative_bar(r))] + [
        (i, log_derivative(r, i), log_derivative_bar(r, i)) for i in range(p)
    ]

    def weight(a: Index, axis):
        return mi.total(a) if axis is None else a[axis]

    for axis, eps, eps_bar in transforms:
        for a in r.coideal:
            lhs = None
            ra = r.get(a)
            if ra is not None and weight(a, axis):
                lhs = weight(a, axis) * ra
            rhs = None
            rhs_bar = None
            for g, eg in eps.coeffs.items():
                if weight(g, axis) == 0 or not mi.leq(g, a):
                    continue
                rb = r.get(mi.sub(a, g))
                if rb is not None:
                    rhs = _acc(rhs, rb * eg)
            for g, eg in eps_bar.coeffs.items():
                if weight(g, axis) == 0 or not mi.leq(g, a):
                    continue
                rb = r.get(mi.sub(a, g))
                if rb is not None:
                    rhs_bar = _acc(rhs_bar, eg * rb)
            for side, val in (("plain", rhs), ("bar", rhs_bar)):
                if lhs is None and val is None:
                    continue
                diff = lhs - val if lhs is not None and val is not None else (lhs if val is None else -val)
                if not is_zero(diff):
                    where = "total" if axis is None else f"axis {axis}"
                    return False, f"{side} recursion fails at alpha={a} ({where})"
    return True, None


def family_sum(family: Sequence[Series]) -> Series:
    """Sum of an axis-indexed family of series sharing one co-ideal."""
    out = Series.zero(family[0].coideal)
    for f in family:
        out = out + f
    return out


def admissible_family_check(
    family: Sequence[Series],
    *,
    bracket=None,
    is_zero=None,
) -> tuple[bool, str | None]:
    """Check the two conditions carved out by the per-axis log-derivatives.

    (a) the i-th member has no coefficient at alpha when alpha_i = 0;
    (b) for all i < j and all alpha:
        alpha_j d^i_alpha - alpha_i d^j_alpha
          = sum_{b+c=alpha, b_i>0, c_j>0} [d^i_b, d^j_c].

    ``bracket`` defaults to the carrier's ``.bracket`` method; pass a semantic
    ``is_zero`` for operator carriers.
    """
    bracket = bracket or (lambda x, y: x.bracket(y))
    is_zero = is_zero or (lambda c: not c)
    p = family[0].coideal.p
    if len(family) != p:
        raise ValueError(f"family has {len(family)} members, expected arity {p}")
    coideal = family[0].coideal
    for f in family:
        if f.coideal != coideal:
            raise ValueError("co-ideal mismatch inside the family")
        if not f.has_zero_constant():
            return False, "nonzero constant term"
    for i, f in enumerate(family):
        for a, c in f.coeffs.items():
            if a[i] == 0 and not is_zero(c):
                return False, f"support condition fails: member {i} at alpha={a}"
    for i in range(p):
        for j in range(i + 1, p):
            fi, fj = family[i], family[j]
            for a in coideal:
                acc = None
                ci, cj = fi.get(a), fj.get(a)
                if ci is not None and a[j]:
                    acc = _acc(acc, a[j] * ci)
                if cj is not None and a[i]:
                    acc = _acc(acc, -(a[i] * cj))
                for b, db in fi.coeffs.items():
                    if b[i] == 0 or not mi.leq(b, a):
                        continue
                    g = mi.sub(a, b)
                    dg = fj.get(g)
                    if dg is None or g[j] == 0:
                        continue
                    acc = _acc(acc, -bracket(db, dg))
                if acc is not None and not is_zero(acc):
                    return False, f"crossed condition fails: axes ({i},{j}) at alpha={a}"
    return True, None


def log_derivative_family(r: Series) -> tuple[Series, ...]:
    """The per-axis log-derivatives of a unit, one series per axis."""
    _require_unit(r)
    rstar = unit_inverse_recursive(r)
    return tuple(rstar * euler_partial(r, i) for i in range(r.coideal.p))


def integrate_log_derivative(rbar: Series, one, field) -> Series:
    """The unique unit whose total log-derivative is ``rbar`` (characteristic 0).

    Solves |a| r_a = sum_{b+c=a, |c|>0} r_b rbar_c gradedly with r_0 = one.
    Over a prime field, raises CharacteristicError at the first alpha whose
    total degree the field cannot invert.
    """
    if not rbar.has_zero_constant():
        raise ValueError("input must have zero constant term")
    p = rbar.coideal.p
    origin = mi.zero(p)
    coeffs = {origin: one}
    for a in rbar.coideal:
        if a == origin:
            continue
        acc = None
        for g, cg in rbar.coeffs.items():
            if mi.total(g) == 0 or not mi.leq(g, a):
                continue
            rb = coeffs.get(mi.sub(a, g))
            if rb is not None:
                acc = _acc(acc, rb * cg)
        if acc is not None:
            try:
                inv = field.inv_nat(mi.total(a))
            except CharacteristicError as exc:
                raise CharacteristicError(
                    f"cannot divide by |alpha|={mi.total(a)} at alpha={a} "
                    f"over a field of characteristic {field.characteristic}",
                    alpha=a,
                ) from exc
            coeffs[a] = _scale(acc, inv)
    return Series(rbar.coideal, coeffs)


def family_from_sum(delta: Series, field, *, bracket=None) -> tuple[Series, ...]:
    """Split a zero-constant series into the unique admissible axis family summing to it.

    Works gradedly: at each alpha the crossed conditions against all axes of
    the support, together with the prescribed sum, pin down every member,
    giving  |a| d^i_a = a_i delta_a + sum_j sum_{b+c=a, b_i>0, c_j>0} [d^i_b, d^j_c].
    Characteristic 0 only (divides by |a|).
    """
    if not delta.has_zero_constant():
        raise ValueError("input must have zero constant term")
    bracket = bracket or (lambda x, y: x.bracket(y))
    p = delta.coideal.p
    fam: list[dict] = [{} for _ in range(p)]
    for a in delta.coideal:
        m = mi.total(a)
        if m == 0:
            continue
        try:
            inv = field.inv_nat(m)
        except CharacteristicError as exc:
            raise CharacteristicError(
                f"cannot divide by |alpha|={m} at alpha={a}", alpha=a
            ) from exc
        da = delta.get(a)
        for i in mi.support(a):
            acc = None
            if da is not None:
                acc = _acc(acc, a[i] * da)
            for j in mi.support(a):
                for b, db in fam[i].items():
                    if b[i] == 0 or not mi.leq(b, a):
                        continue
                    g = mi.sub(a, b)
                    dg = fam[j].get(g)
                    if dg is None or g[j] == 0:
                        continue
                    acc = _acc(acc, bracket(db, dg))
            if acc is not None:
                val = _scale(acc, inv)
                if val:
                    fam[i][a] = val
    return tuple(Series(delta.coideal, f) for f in fam)


def unit_from_tau_slice(delta: Series, one) -> Series:
    """Embed a zero-constant series as the tau-degree-1 slice of a unit.

    The result lives over coideal x {0,1} in one extra variable: constant
    term ``one`` plus delta_a at (a, 1) for every nonzero a.  Because two
    tau-slices multiply into truncated-away tau-degree 2, this is a group
    homomorphism from addition to unit multiplication for every carrier.
    """
    if not delta.has_zero_constant():
        raise ValueError("input must have zero constant term")
    extended = delta.coideal.times_unit_interval()
    coeffs = {mi.zero(extended.p): one}
    for a, c in delta.coeffs.items():
        coeffs[a + (1,)] = c
    return Series(extended, coeffs)


def include_in_tau_extension(r: Series) -> Series:
    """View a series over the co-ideal as one over coideal x {0,1} (tau-degree 0)."""
    extended = r.coideal.times_unit_interval()
    return Series(extended, {a + (0,): c for a, c in r.coeffs.items()})
