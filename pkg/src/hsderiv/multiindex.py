"""Multi-indices in N^p and finite down-closed exponent sets (co-ideals).

Multi-indices are plain ``tuple[int, ...]``; this module supplies the
componentwise order, graded-lexicographic canonical ordering and the
ordered-partition enumeration Par(alpha, d) used by the closed inversion
formulas.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator

Index = tuple[int, ...]


def zero(p: int) -> Index:
    return (0,) * p


def unit(p: int, axis: int) -> Index:
    """The standard basis vector along ``axis`` (0-based)."""
    if not 0 <= axis < p:
        raise ValueError(f"axis {axis} out of range for arity {p}")
    return tuple(1 if i == axis else 0 for i in range(p))


def add(a: Index, b: Index) -> Index:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def sub(a: Index, b: Index) -> Index:
    """Componentwise difference; requires b <= a."""
    if not leq(b, a):
        raise ValueError(f"{b} is not componentwise <= {a}")
    return tuple(x - y for x, y in zip(a, b))


def leq(a: Index, b: Index) -> bool:
    """Componentwise partial order."""
    return all(x <= y for x, y in zip(a, b, strict=True))


def total(a: Index) -> int:
    """Total degree |a|."""
    return sum(a)


def support(a: Index) -> tuple[int, ...]:
    """Axes with a nonzero entry (0-based)."""
    return tuple(i for i, x in enumerate(a) if x)


def grlex_key(a: Index):
    """Sort key: total degree first, then lexicographic with earlier axes heavier.

    Within a degree block (1,0) precedes (0,1).
    """
    return (sum(a), tuple(-x for x in a))


def below(a: Index) -> Iterator[Index]:
    """All b with b <= a, in graded-lex order."""
    yield from sorted(itertools.product(*(range(x + 1) for x in a)), key=grlex_key)


def splittings(a: Index) -> Iterator[tuple[Index, Index]]:
    """All ordered pairs (b, c) with b + c = a."""
    for b in below(a):
        yield b, sub(a, b)


def partitions(a: Index, d: int) -> Iterator[tuple[Index, ...]]:
    """Ordered d-tuples of nonzero multi-indices summing to ``a``.

    Enumerated lazily in graded-lex order on the tuple; empty when
    d > |a| or d < 1.  The count over all d is the number of ordered
    compositions of ``a`` into nonzero parts, which grows fast: prefer
    the recursive inverse over the closed formula at high degree.
    """
    if a == zero(len(a)) or d < 1 or d > total(a):
        return
    if d == 1:
        yield (a,)
        return
    for first in below(a):
        if total(first) == 0 or total(sub(a, first)) < d - 1:
            continue
        for rest in partitions(sub(a, first), d - 1):
            yield (first,) + rest


def format_index(a: Index) -> str:
    """Textual form "(a1,...,ap)"."""
    return "(" + ",".join(str(x) for x in a) + ")"


_INDEX_RE = re.compile(r"^\(\s*(-?\d+\s*(?:,\s*-?\d+\s*)*)\)$")


def parse_index(text: str) -> Index:
    m = _INDEX_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a multi-index: {text!r}")
    entries = tuple(int(x) for x in m.group(1).split(","))
    if any(x < 0 for x in entries):
        raise ValueError(f"negative entry in multi-index: {text!r}")
    return entries


def is_down_closed(elements: Iterable[Index]) -> bool:
    """True iff the set contains every index below each of its members.

    The empty set counts as down-closed; a non-empty down-closed set
    necessarily contains 0.
    """
    members = set(elements)
    if not members:
        return True
    p = len(next(iter(members)))
    if any(len(a) != p for a in members):
        raise ValueError("mixed arities")
    return all(b in members for a in members for b in below(a))


@dataclass(frozen=True)
class CoIdeal:
    """A finite down-closed subset of N^p: the allowed supports of a truncation.

    Iteration and serialization always follow graded-lex order.
    """

    p: int
    members: frozenset[Index]

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("arity must be >= 1")
        for a in self.members:
            if len(a) != self.p:
                raise ValueError(f"{a} has arity {len(a)}, expected {self.p}")
            if any(x < 0 for x in a):
                raise ValueError(f"negative entry in {a}")

    @classmethod
    def degree_bound(cls, p: int, m: int) -> "CoIdeal":
        """All alpha with |alpha| <= m."""
        elems = (
            a
            for deg in range(m + 1)
            for a in itertools.product(range(deg + 1), repeat=p)
            if sum(a) == deg
        )
        return cls(p, frozenset(elems))

    @classmethod
    def box(cls, beta: Index) -> "CoIdeal":
        """All alpha with alpha <= beta componentwise."""
        return cls(len(beta), frozenset(below(beta)))

    @classmethod
    def from_elements(cls, p: int, elements: Iterable[Index]) -> "CoIdeal":
        members = frozenset(tuple(a) for a in elements)
        out = cls(p, members)
        if members and not is_down_closed(members):
            raise ValueError("set is not down-closed")
        return out

    @property
    def elements(self) -> tuple[Index, ...]:
        return tuple(sorted(self.members, key=grlex_key))

    def __contains__(self, a: Index) -> bool:
        return a in self.members

    def __iter__(self) -> Iterator[Index]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.members)

    def is_subset(self, other: "CoIdeal") -> bool:
        return self.p == other.p and self.members <= other.members

    def _check_same_arity(self, other: "CoIdeal"):
        if self.p != other.p:
            raise ValueError(f"arity mismatch: {self.p} vs {other.p}")

    def __or__(self, other: "CoIdeal") -> "CoIdeal":
        self._check_same_arity(other)
        return CoIdeal(self.p, self.members | other.members)

    def __and__(self, other: "CoIdeal") -> "CoIdeal":
        self._check_same_arity(other)
        return CoIdeal(self.p, self.members & other.members)

    def times_unit_interval(self) -> "CoIdeal":
        """The product co-ideal in arity p+1 with last entry in {0, 1}."""
        if not self.members:
            raise ValueError("empty co-ideal")
        return CoIdeal(
            self.p + 1, frozenset(a + (t,) for a in self.members for t in (0, 1))
        )

    def max_total(self) -> int:
        return max((total(a) for a in self.members), default=0)


def common_refinement(*coideals: CoIdeal) -> CoIdeal:
    """Union of finitely many co-ideals of the same arity."""
    return reduce(lambda a, b: a | b, coideals)
