"""Evaluatable linear operators on the polynomial algebra.

Operators are intensional: a sum of scalar-weighted composition chains of
primitives (multiplication by a polynomial, a classical derivation, a
component of a Hasse-Schmidt derivation).  The endomorphism algebra of a
polynomial ring is infinite-dimensional, but every operator built here is a
differential operator of bounded order, with the bound tracked
conservatively (0 for multiplications, 1 for derivations, |alpha| for a
component at alpha; sums of chain orders under composition, max under
addition).

That bound makes semantic equality decidable:

    A differential operator of order <= N on k[x_1..x_n] that vanishes on
    every monomial of degree <= N is zero.

Proof sketch, valid over any commutative coefficient ring: induct on N.  For
N = 0 the operator is multiplication by its value on 1.  For N > 0 and P
vanishing on monomials of degree <= N, each commutator [P, x_i] has order
<= N-1 and vanishes on monomials of degree <= N-1, so it is zero by
induction; P then commutes with every multiplication, hence is
multiplication by P(1) = 0.

``equals`` therefore compares two operators by evaluating both on the finite
monomial basis up to the larger order bound.  No rewriting of operator
expressions is attempted anywhere; equality is always this semantic test.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import multiindex as mi
from .algebra import ClassicalDerivation, Poly
from .multiindex import CoIdeal, Index
from .series import Series, series_equal


@dataclass(frozen=True)
class MulBy:
    poly: Poly


@dataclass(frozen=True)
class DerivationOp:
    derivation: ClassicalDerivation


@dataclass(frozen=True)
class HSComponent:
    # hs is an HSDerivation; compared and hashed by identity, which keeps
    # primitives usable as cache keys without importing the hs module here.
    hs: object
    alpha: Index


Primitive = MulBy | DerivationOp | HSComponent

_APPLY_CACHE: dict = {}


def clear_caches():
    _APPLY_CACHE.clear()


def _prim_apply(prim: Primitive, f: Poly) -> Poly:
    key = (prim, f)
    out = _APPLY_CACHE.get(key)
    if out is None:
        if isinstance(prim, MulBy):
            out = prim.poly * f
        elif isinstance(prim, DerivationOp):
            out = prim.derivation.apply(f)
        else:
            out = prim.hs.component_apply(f, prim.alpha)
        _APPLY_CACHE[key] = out
    return out


def _prim_order(prim: Primitive) -> int:
    if isinstance(prim, MulBy):
        return 0
    if isinstance(prim, DerivationOp):
        return 1
    return mi.total(prim.alpha)


@dataclass(frozen=True, eq=False)
class LinOp:
    """A k-linear operator as a coalesced sum of primitive chains.

    Chains apply right-to-left.  Identical chains are merged and zero
    scalars dropped on construction; nothing deeper is simplified.
    """

    field: object
    n: int
    terms: tuple[tuple[object, tuple[Primitive, ...]], ...]

    @classmethod
    def _build(cls, field, n, pairs) -> "LinOp":
        merged: dict = {}
        for scalar, chain in pairs:
            prev = merged.get(chain)
            merged[chain] = scalar if prev is None else prev + scalar
        # insertion order is deterministic for a given construction sequence
        terms = tuple((s, c) for c, s in merged.items() if s)
        return cls(field, n, terms)

    @classmethod
    def zero(cls, field, n: int) -> "LinOp":
        return cls(field, n, ())

    @classmethod
    def identity(cls, field, n: int) -> "LinOp":
        return cls(field, n, ((field.one, ()),))

    @classmethod
    def mul_by(cls, poly: Poly) -> "LinOp":
        return cls._build(poly.field, poly.n, [(poly.field.one, (MulBy(poly),))])

    @classmethod
    def of_derivation(cls, der: ClassicalDerivation) -> "LinOp":
        return cls._build(der.field, der.n, [(der.field.one, (DerivationOp(der),))])

    @classmethod
    def hs_component(cls, hs, alpha: Index) -> "LinOp":
        if mi.total(alpha) == 0:
            return cls.identity(hs.field, hs.n)
        return cls._build(hs.field, hs.n, [(hs.field.one, (HSComponent(hs, alpha),))])

    def _check(self, other: "LinOp"):
        if self.field != other.field or self.n != other.n:
            raise ValueError("operator algebra mismatch")

    def __add__(self, other: "LinOp") -> "LinOp":
        self._check(other)
        return LinOp._build(self.field, self.n, self.terms + other.terms)

    def __sub__(self, other: "LinOp") -> "LinOp":
        return self + (-other)

    def __neg__(self) -> "LinOp":
        return LinOp(self.field, self.n, tuple((-s, c) for s, c in self.terms))

    def __mul__(self, other):
        if isinstance(other, LinOp):
            self._check(other)
            return LinOp._build(
                self.field,
                self.n,
                [
                    (s1 * s2, c1 + c2)
                    for s1, c1 in self.terms
                    for s2, c2 in other.terms
                ],
            )
        if isinstance(other, Poly):
            if other.is_one():
                return self
            return self * LinOp.mul_by(other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, Poly):
            if other.is_one():
                return self
            return LinOp.mul_by(other) * self
        return self.scale(other)

    def scale(self, s) -> "LinOp":
        if isinstance(s, int):
            s = self.field.from_int(s)
        return LinOp._build(self.field, self.n, [(s * sc, c) for sc, c in self.terms])

    def bracket(self, other: "LinOp") -> "LinOp":
        return self * other - other * self

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_one(self) -> bool:
        """Syntactic identity test; enough for the constant terms this package builds."""
        if len(self.terms) != 1:
            return False
        s, chain = self.terms[0]
        return chain == () and s == self.field.one

    def order_bound(self) -> int:
        return max(
            (sum(_prim_order(p) for p in chain) for _, chain in self.terms),
            default=0,
        )

    def apply(self, f: Poly) -> Poly:
        if f.n != self.n or f.field != self.field:
            raise ValueError("arity or field mismatch")
        out = Poly.zero(self.field, self.n)
        for scalar, chain in self.terms:
            g = f
            for prim in reversed(chain):
                g = _prim_apply(prim, g)
            out = out + g.scale(scalar)
        return out

    def __repr__(self):
        return f"LinOp<{len(self.terms)} terms, order<={self.order_bound()}>"


def monomial_basis(field, n: int, max_degree: int):
    """All monomials of total degree <= max_degree, in graded-lex order."""
    for e in CoIdeal.degree_bound(n, max_degree):
        yield Poly.monomial(field, e)


def counterexample(a: LinOp, b: LinOp) -> Poly | None:
    """A monomial separating the two operators, or None when they agree.

    Sound because both operators are differential operators within their
    tracked order bounds; see the module docstring.
    """
    a._check(b)
    bound = max(a.order_bound(), b.order_bound())
    for m in monomial_basis(a.field, a.n, bound):
        if a.apply(m) != b.apply(m):
            return m
    return None


def equals(a: LinOp, b: LinOp) -> bool:
    return counterexample(a, b) is None


def is_zero_op(op: LinOp) -> bool:
    return equals(op, LinOp.zero(op.field, op.n))


class NotADerivationError(ValueError):
    def __init__(self, witness: Poly):
        super().__init__(f"operator is not a derivation; witness monomial {witness}")
        self.witness = witness


def as_derivation(op: LinOp) -> ClassicalDerivation:
    """Recognize an operator as a derivation, or raise with a witness monomial.

    The candidate is read off the generator images; acceptance is the
    semantic comparison against the candidate, so success certifies equality
    as operators.
    """
    images = tuple(
        op.apply(Poly.variable(op.field, op.n, j)) for j in range(op.n)
    )
    candidate = ClassicalDerivation(images)
    witness = counterexample(op, LinOp.of_derivation(candidate))
    if witness is not None:
        raise NotADerivationError(witness)
    return candidate


def embed_poly_series(a: Series) -> Series:
    """Coefficientwise embedding of a polynomial series as multiplication operators."""
    return a.map(LinOp.mul_by)


def pairing_apply(r: Series, a: Series) -> Series:
    """Apply an operator series to a polynomial series: convolution of actions."""
    if r.coideal != a.coideal:
        raise ValueError("co-ideal mismatch")
    coeffs: dict = {}
    for b, op in r.coeffs.items():
        for g, f in a.coeffs.items():
            key = mi.add(b, g)
            if key not in r.coideal:
                continue
            val = op.apply(f)
            prev = coeffs.get(key)
            coeffs[key] = val if prev is None else prev + val
    return Series(r.coideal, coeffs)


def derivation_series_check(r: Series, a: Series) -> bool:
    """Test the commutator characterization [r, a] = (action of r on a).

    Holds for all polynomial series ``a`` exactly when every coefficient of
    the operator series ``r`` is a derivation.
    """
    embedded = embed_poly_series(a)
    lhs = r * embedded - embedded * r
    rhs = embed_poly_series(pairing_apply(r, a))
    return series_equal_ops(lhs, rhs)


def series_equal_ops(x: Series, y: Series) -> bool:
    """Coefficientwise semantic equality of operator series."""
    return series_equal(x, y, eq=equals, is_zero=is_zero_op)
