"""Exact coefficient fields, sparse multivariate polynomials and derivations.

The base algebra is the free polynomial algebra over an exact field: the
rationals (stdlib ``Fraction``) or a prime field.  All arithmetic is exact;
there is no floating point anywhere in this package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from . import multiindex as mi
from .multiindex import Index


class CharacteristicError(ArithmeticError):
    """Raised when a construction needs to divide by a multiple of the characteristic."""

    def __init__(self, message: str, alpha: Index | None = None):
        super().__init__(message)
        self.alpha = alpha


@dataclass(frozen=True)
class PrimeFieldElem:
    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _check(self, other: "PrimeFieldElem"):
        if self.p != other.p:
            raise ValueError(f"field mismatch: F_{self.p} vs F_{other.p}")

    def __add__(self, other):
        self._check(other)
        return PrimeFieldElem(self.value + other.value, self.p)

    def __sub__(self, other):
        self._check(other)
        return PrimeFieldElem(self.value - other.value, self.p)

    def __neg__(self):
        return PrimeFieldElem(-self.value, self.p)

    def __mul__(self, other):
        if isinstance(other, int):
            return PrimeFieldElem(self.value * other, self.p)
        self._check(other)
        return PrimeFieldElem(self.value * other.value, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        self._check(other)
        if other.value % self.p == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return self * PrimeFieldElem(pow(other.value, -1, self.p), self.p)

    def __bool__(self):
        return self.value % self.p != 0

    def is_one(self) -> bool:
        return self.value % self.p == 1

    def __str__(self):
        return str(self.value)


class RationalField:
    """The field of rationals; elements are ``fractions.Fraction``."""

    characteristic = 0

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def from_int(self, m: int):
        return Fraction(m)

    def inv_nat(self, m: int):
        if m == 0:
            raise CharacteristicError("division by zero")
        return Fraction(1, m)

    def parse(self, text: str):
        return Fraction(text)

    def format(self, elem) -> str:
        return str(elem)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p."""

    p: int

    def __post_init__(self):
        if self.p < 2 or any(self.p % q == 0 for q in range(2, int(self.p**0.5) + 1)):
            raise ValueError(f"{self.p} is not prime")

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def zero(self):
        return PrimeFieldElem(0, self.p)

    @property
    def one(self):
        return PrimeFieldElem(1, self.p)

    def from_int(self, m: int):
        return PrimeFieldElem(m, self.p)

    def inv_nat(self, m: int):
        if m % self.p == 0:
            raise CharacteristicError(f"{m} is not invertible in F_{self.p}")
        return PrimeFieldElem(pow(m, -1, self.p), self.p)

    def parse(self, text: str):
        if "/" in text:
            num, den = text.split("/", 1)
            return self.from_int(int(num)) / self.from_int(int(den))
        return self.from_int(int(text))

    def format(self, elem) -> str:
        return str(elem.value)

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


@dataclass(frozen=True)
class Poly:
    """Sparse multivariate polynomial in canonical form.

    ``terms`` maps exponent tuples to nonzero coefficients and is stored as a
    tuple sorted in graded-lex order, so equal polynomials compare and hash
    equal.
    """

    field: object
    n: int
    terms: tuple[tuple[Index, object], ...]

    @classmethod
    def from_dict(cls, field, n: int, coeffs: dict) -> "Poly":
        items = tuple(
            (e, c) for e, c in sorted(coeffs.items(), key=lambda t: mi.grlex_key(t[0])) if c
        )
        for e, _ in items:
            if len(e) != n or any(x < 0 for x in e):
                raise ValueError(f"bad exponent {e} for arity {n}")
        return cls(field, n, items)

    @classmethod
    def zero(cls, field, n: int) -> "Poly":
        return cls(field, n, ())

    @classmethod
    def one(cls, field, n: int) -> "Poly":
        return cls(field, n, ((mi.zero(n), field.one),))

    @classmethod
    def constant(cls, field, n: int, c) -> "Poly":
        return cls.from_dict(field, n, {mi.zero(n): c})

    @classmethod
    def variable(cls, field, n: int, j: int) -> "Poly":
        return cls(field, n, ((mi.unit(n, j), field.one),))

    @classmethod
    def monomial(cls, field, exponents: Index, c=None) -> "Poly":
        n = len(exponents)
        return cls.from_dict(field, n, {tuple(exponents): field.one if c is None else c})

    def _check(self, other: "Poly"):
        if self.field != other.field or self.n != other.n:
            raise ValueError("polynomial ring mismatch")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        coeffs = dict(self.terms)
        for e, c in other.terms:
            s = coeffs.get(e)
            coeffs[e] = c if s is None else s + c
        return Poly.from_dict(self.field, self.n, coeffs)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly(self.field, self.n, tuple((e, -c) for e, c in self.terms))

    def __mul__(self, other):
        if isinstance(other, Poly):
            self._check(other)
            coeffs: dict = {}
            for e1, c1 in self.terms:
                for e2, c2 in other.terms:
                    e = mi.add(e1, e2)
                    c = c1 * c2
                    s = coeffs.get(e)
                    coeffs[e] = c if s is None else s + c
            return Poly.from_dict(self.field, self.n, coeffs)
        if isinstance(other, (int, Fraction, PrimeFieldElem)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, PrimeFieldElem)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "Poly":
        if isinstance(c, int):
            c = self.field.from_int(c)
        return Poly.from_dict(self.field, self.n, {e: c * cf for e, cf in self.terms})

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        out = Poly.one(self.field, self.n)
        for _ in range(k):
            out = out * self
        return out

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_one(self) -> bool:
        if len(self.terms) != 1:
            return False
        e, c = self.terms[0]
        return e == mi.zero(self.n) and c == self.field.one

    def coefficient(self, e: Index):
        for e1, c in self.terms:
            if e1 == e:
                return c
        return self.field.zero

    def degree(self) -> int:
        """Total degree; 0 for the zero polynomial."""
        return max((mi.total(e) for e, _ in self.terms), default=0)

    def partial(self, j: int) -> "Poly":
        """Formal partial derivative with respect to the j-th variable."""
        coeffs: dict = {}
        for e, c in self.terms:
            if e[j] == 0:
                continue
            e2 = tuple(x - 1 if i == j else x for i, x in enumerate(e))
            coeffs[e2] = coeffs.get(e2, self.field.zero) + e[j] * c
        return Poly.from_dict(self.field, self.n, coeffs)

    def __str__(self):
        return poly_to_str(self)

    def __repr__(self):
        return f"Poly({poly_to_str(self)!r})"


def poly_to_str(f: Poly) -> str:
    """Render in the text syntax, highest graded-lex term first."""
    if not f.terms:
        return "0"
    parts = []
    for e, c in reversed(f.terms):
        text = f.field.format(c)
        negative = text.startswith("-")
        mag = text[1:] if negative else text
        factors = [
            f"x{j + 1}" + (f"^{k}" if k > 1 else "")
            for j, k in enumerate(e)
            if k > 0
        ]
        if factors:
            body = "*".join(factors) if mag == "1" else mag + "*" + "*".join(factors)
        else:
            body = mag
        if not parts:
            parts.append(("-" if negative else "") + body)
        else:
            parts.append((" - " if negative else " + ") + body)
    return "".join(parts)


class PolyParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>x\d+)|(?P<op>[-+*^]))")


def parse_poly(text: str, field, n: int) -> Poly:
    """Parse the text syntax, e.g. ``3/2*x1^2*x2 - x3``.

    Grammar: sum of terms, each term a ``*``-product of a coefficient and/or
    variable powers ``xJ^K``.  Errors report line and column.
    """

    def error(msg: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        raise PolyParseError(msg, line, column)

    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            error(f"unexpected character {text[pos:].lstrip()[0]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))

    cursor = 0

    def peek():
        return tokens[cursor]

    def advance():
        nonlocal cursor
        tok = tokens[cursor]
        cursor += 1
        return tok

    def parse_factor() -> Poly:
        kind, value, at = peek()
        if kind == "num":
            advance()
            return Poly.constant(field, n, field.parse(value))
        if kind == "var":
            advance()
            j = int(value[1:]) - 1
            if not 0 <= j < n:
                error(f"variable {value} out of range for {n} variables", at)
            k = 1
            if peek()[0] == "op" and peek()[1] == "^":
                advance()
                kind2, value2, at2 = advance()
                if kind2 != "num" or "/" in value2:
                    error("expected integer exponent after '^'", at2)
                k = int(value2)
            return Poly.variable(field, n, j) ** k
        error("expected a coefficient or variable", at)

    def parse_term() -> Poly:
        sign = 1
        while peek()[0] == "op" and peek()[1] in "+-":
            if advance()[1] == "-":
                sign = -sign
        f = parse_factor()
        while peek()[0] == "op" and peek()[1] == "*":
            advance()
            f = f * parse_factor()
        return f.scale(sign)

    result = parse_term()
    while True:
        kind, value, at = peek()
        if kind == "end":
            break
        if kind == "op" and value in "+-":
            result = result + parse_term()
        else:
            error(f"unexpected token {value!r}", at)
    return result


@dataclass(frozen=True)
class ClassicalDerivation:
    """A derivation of the polynomial algebra, stored by generator images.

    The action on any f is sum_j images[j] * df/dx_j, which satisfies the
    Leibniz rule identically.
    """

    images: tuple[Poly, ...]

    def __post_init__(self):
        if not self.images:
            raise ValueError("need at least one generator image")
        n = self.images[0].n
        if any(g.n != n or g.field != self.field for g in self.images):
            raise ValueError("generator images live in different rings")

    @property
    def field(self):
        return self.images[0].field

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def zero(cls, field, n: int) -> "ClassicalDerivation":
        return cls(tuple(Poly.zero(field, n) for _ in range(n)))

    @classmethod
    def partial(cls, field, n: int, j: int) -> "ClassicalDerivation":
        """d/dx_j."""
        return cls(
            tuple(
                Poly.one(field, n) if i == j else Poly.zero(field, n) for i in range(n)
            )
        )

    def apply(self, f: Poly) -> Poly:
        if f.n != self.n or f.field != self.field:
            raise ValueError("arity or field mismatch")
        out = Poly.zero(self.field, self.n)
        for j, g in enumerate(self.images):
            if g:
                out = out + g * f.partial(j)
        return out

    def __add__(self, other: "ClassicalDerivation") -> "ClassicalDerivation":
        return ClassicalDerivation(
            tuple(a + b for a, b in zip(self.images, other.images, strict=True))
        )

    def __sub__(self, other: "ClassicalDerivation") -> "ClassicalDerivation":
        return self + (-other)

    def __neg__(self) -> "ClassicalDerivation":
        return ClassicalDerivation(tuple(-g for g in self.images))

    def scale(self, c) -> "ClassicalDerivation":
        """Scale by a scalar or by a polynomial (module action)."""
        return ClassicalDerivation(tuple(g * c if isinstance(c, Poly) else g.scale(c) for g in self.images))

    def __rmul__(self, c):
        return self.scale(c)

    def __bool__(self) -> bool:
        return any(self.images)

    def bracket(self, other: "ClassicalDerivation") -> "ClassicalDerivation":
        """Lie bracket: generator images of the commutator of the two actions."""
        return ClassicalDerivation(
            tuple(
                self.apply(other.images[j]) - other.apply(self.images[j])
                for j in range(self.n)
            )
        )


def lie_bracket(a: ClassicalDerivation, b: ClassicalDerivation) -> ClassicalDerivation:
    return a.bracket(b)


def product_of(polys) -> Poly:
    return reduce(lambda a, b: a * b, polys)
