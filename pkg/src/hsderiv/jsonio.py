"""Canonical JSON forms for every value the command line exchanges.

Serialization always follows graded-lex ordering, so serialize -> parse ->
serialize is byte-identical.  Carrier payloads inside series are dispatched
by a ``carrier`` tag: "field", "poly", "derivation" or "operator".
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import multiindex as mi
from .algebra import GF, QQ, ClassicalDerivation, Poly, PrimeFieldElem
from .hs import HSDerivation
from .linop import DerivationOp, HSComponent, LinOp, MulBy
from .multiindex import CoIdeal
from .series import Series
from .subst import SubstMap


class SchemaError(ValueError):
    pass


def _expect(obj, key, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"missing key {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise SchemaError(f"key {key!r} has wrong type {type(val).__name__}")
    return val


def field_to_json(field):
    return "Q" if field == QQ else {"Fp": field.p}


def field_from_json(obj):
    if obj == "Q":
        return QQ
    if isinstance(obj, dict) and "Fp" in obj:
        return GF(int(obj["Fp"]))
    raise SchemaError(f"unknown field descriptor {obj!r}")


def coideal_to_json(c: CoIdeal) -> dict:
    return {"p": c.p, "kind": "explicit", "data": [list(a) for a in c.elements]}


def coideal_from_json(obj) -> CoIdeal:
    p = int(_expect(obj, "p"))
    kind = _expect(obj, "kind", str)
    data = _expect(obj, "data")
    if kind == "degree":
        return CoIdeal.degree_bound(p, int(data))
    if kind == "box":
        return CoIdeal.box(tuple(int(x) for x in data))
    if kind == "explicit":
        return CoIdeal.from_elements(p, [tuple(int(x) for x in a) for a in data])
    raise SchemaError(f"unknown co-ideal kind {kind!r}")


def poly_to_json(f: Poly) -> dict:
    return {
        "field": field_to_json(f.field),
        "n": f.n,
        "terms": [list(e) + [f.field.format(c)] for e, c in f.terms],
    }


def poly_from_json(obj) -> Poly:
    field = field_from_json(_expect(obj, "field"))
    n = int(_expect(obj, "n"))
    coeffs = {}
    for row in _expect(obj, "terms", list):
        if len(row) != n + 1:
            raise SchemaError(f"term row of length {len(row)}, expected {n + 1}")
        e = tuple(int(x) for x in row[:n])
        coeffs[e] = coeffs.get(e, field.zero) + field.parse(str(row[n]))
    return Poly.from_dict(field, n, coeffs)


def derivation_to_json(d: ClassicalDerivation) -> dict:
    return {"images": [poly_to_json(g) for g in d.images]}


def derivation_from_json(obj) -> ClassicalDerivation:
    return ClassicalDerivation(
        tuple(poly_from_json(g) for g in _expect(obj, "images", list))
    )


def _prim_to_json(prim) -> dict:
    if isinstance(prim, MulBy):
        return {"kind": "mulby", "poly": poly_to_json(prim.poly)}
    if isinstance(prim, DerivationOp):
        return {"kind": "derivation", **derivation_to_json(prim.derivation)}
    return {
        "kind": "hs_component",
        "alpha": list(prim.alpha),
        "hs": hs_to_json(prim.hs),
    }


def _prim_from_json(obj):
    kind = _expect(obj, "kind", str)
    if kind == "mulby":
        return MulBy(poly_from_json(_expect(obj, "poly")))
    if kind == "derivation":
        return DerivationOp(derivation_from_json(obj))
    if kind == "hs_component":
        return HSComponent(
            hs_from_json(_expect(obj, "hs")),
            tuple(int(x) for x in _expect(obj, "alpha", list)),
        )
    raise SchemaError(f"unknown primitive kind {kind!r}")


def linop_to_json(op: LinOp) -> dict:
    return {
        "field": field_to_json(op.field),
        "n": op.n,
        "sum": [
            {"scalar": op.field.format(s), "chain": [_prim_to_json(p) for p in chain]}
            for s, chain in op.terms
        ],
    }


def linop_from_json(obj) -> LinOp:
    field = field_from_json(_expect(obj, "field"))
    n = int(_expect(obj, "n"))
    pairs = []
    for term in _expect(obj, "sum", list):
        scalar = field.parse(str(_expect(term, "scalar")))
        chain = tuple(_prim_from_json(p) for p in _expect(term, "chain", list))
        pairs.append((scalar, chain))
    return LinOp._build(field, n, pairs)


_CARRIERS = {
    "field": (
        lambda c, field: field.format(c),
        lambda obj, field, n: field.parse(str(obj)),
    ),
    "poly": (
        lambda c, field: poly_to_json(c),
        lambda obj, field, n: poly_from_json(obj),
    ),
    "derivation": (
        lambda c, field: derivation_to_json(c),
        lambda obj, field, n: derivation_from_json(obj),
    ),
    "operator": (
        lambda c, field: linop_to_json(c),
        lambda obj, field, n: linop_from_json(obj),
    ),
}


def carrier_of(value) -> str:
    if isinstance(value, (Fraction, PrimeFieldElem)):
        return "field"
    if isinstance(value, Poly):
        return "poly"
    if isinstance(value, ClassicalDerivation):
        return "derivation"
    if isinstance(value, LinOp):
        return "operator"
    raise SchemaError(f"unknown carrier type {type(value).__name__}")


def series_to_json(s: Series, carrier: str | None = None, field=None, n=None) -> dict:
    first = next(iter(s.coeffs.values()), None)
    if carrier is None:
        if first is None:
            raise SchemaError("cannot infer the carrier of a zero series")
        carrier = carrier_of(first)
    if field is None and first is not None:
        field = first.field if hasattr(first, "field") else None
        if field is None and isinstance(first, Fraction):
            field = QQ
        if field is None and isinstance(first, PrimeFieldElem):
            field = GF(first.p)
    if carrier == "field" and isinstance(first, Fraction):
        field = QQ
    elif carrier == "field" and isinstance(first, PrimeFieldElem):
        field = GF(first.p)
    if field is None:
        raise SchemaError("cannot infer the field of a zero series")
    if n is None:
        n = getattr(first, "n", 1)
    encode = _CARRIERS[carrier][0]
    return {
        "carrier": carrier,
        "field": field_to_json(field),
        "n": n,
        "coideal": coideal_to_json(s.coideal),
        "coeffs": [[list(a), encode(c, field)] for a, c in s.items()],
    }


def series_from_json(obj) -> Series:
    carrier = _expect(obj, "carrier", str)
    if carrier not in _CARRIERS:
        raise SchemaError(f"unknown carrier {carrier!r}")
    field = field_from_json(_expect(obj, "field"))
    n = int(_expect(obj, "n"))
    coideal = coideal_from_json(_expect(obj, "coideal"))
    decode = _CARRIERS[carrier][1]
    coeffs = {}
    for row in _expect(obj, "coeffs", list):
        if len(row) != 2:
            raise SchemaError("series coefficient rows must be [index, payload]")
        a = tuple(int(x) for x in row[0])
        coeffs[a] = decode(row[1], field, n)
    return Series(coideal, coeffs)


def hs_to_json(d: HSDerivation) -> dict:
    return {
        "p": d.p,
        "coideal": coideal_to_json(d.coideal),
        "n": d.n,
        "images": [series_to_json(img, "poly", d.field, d.n) for img in d.images],
    }


def hs_from_json(obj) -> HSDerivation:
    images = tuple(series_from_json(s) for s in _expect(obj, "images", list))
    d = HSDerivation(images)
    if d.p != int(_expect(obj, "p")) or d.n != int(_expect(obj, "n")):
        raise SchemaError("declared shape does not match the images")
    return d


def subst_to_json(m: SubstMap) -> dict:
    return {
        "source": {"p": m.p, "coideal": coideal_to_json(m.source)},
        "target": {"p": m.q, "coideal": coideal_to_json(m.target)},
        "images": [series_to_json(img, "poly", m.field, m.n) for img in m.images],
    }


def subst_from_json(obj) -> SubstMap:
    source = coideal_from_json(_expect(_expect(obj, "source"), "coideal"))
    target = coideal_from_json(_expect(_expect(obj, "target"), "coideal"))
    images = tuple(series_from_json(s) for s in _expect(obj, "images", list))
    field = n = None
    for img in images:
        first = next(iter(img.coeffs.values()), None)
        if first is not None:
            field, n = first.field, first.n
            break
    if field is None:
        for img_json in _expect(obj, "images", list):
            field = field_from_json(_expect(img_json, "field"))
            n = int(_expect(img_json, "n"))
            break
    if field is None:
        raise SchemaError("cannot infer field from an image-free map")
    return SubstMap(source, target, images, field, n)


def dumps(obj) -> str:
    """Canonical textual form: compact separators, keys in construction order."""
    return json.dumps(obj, separators=(",", ":"))


def loads(text: str):
    return json.loads(text)
