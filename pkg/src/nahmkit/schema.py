"""JSON document schema: exact, float-free serialization.

Rationals are {"num": ..., "den": ...}; scalars are term lists over the
cyclotomic power basis; series carry valuation, coefficient array and
precision.  A document declares its own session field, so parsing is
self-contained: parse(emit(x)) == x for every suite object.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import InputError
from .field import FieldContext
from .filtered import FilteredLattice
from .higgs import ElementaryBlock, HiggsGerm
from .lmatrix import LaurentMatrix
from .series import TruncatedLaurent
from .torus import TorusPoint
from .elliptic import AdmissibleHiggsData, FilteredBundleData, SingularPoint

SCHEMA_VERSION = 1


# -- rationals --


def rat_to_json(q):
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


def rat_from_json(obj):
    if not isinstance(obj, dict) or set(obj) != {"num", "den"}:
        raise InputError(f"not a rational: {obj!r}")
    return Fraction(obj["num"], obj["den"])


# -- scalars --


def _poly_to_json(ctx, p):
    terms = []
    for mono, cyc in sorted(p.items()):
        terms.append({"m": list(mono), "c": [rat_to_json(x) for x in cyc]})
    return terms


def _poly_from_json(ctx, terms):
    out = {}
    for t in terms:
        mono = tuple(int(e) for e in t["m"])
        if len(mono) != ctx.nvars:
            raise InputError("monomial arity does not match the declared symbols")
        cyc = tuple(rat_from_json(x) for x in t["c"])
        if len(cyc) != ctx.cyc.degree:
            raise InputError("cyclotomic coordinate length mismatch")
        out[mono] = cyc
    return out


def scalar_to_json(s):
    return {"num": _poly_to_json(s.ctx, s.num), "den": _poly_to_json(s.ctx, s.den)}


def scalar_from_json(ctx, obj):
    from .field import Scalar

    return Scalar(ctx, _poly_from_json(ctx, obj["num"]), _poly_from_json(ctx, obj["den"]))


# -- series and matrices --


def series_to_json(s):
    return {
        "val": s.val,
        "coeffs": [scalar_to_json(c) for c in s.coeffs],
        "prec": s.prec,
        "exact": s.exact,
    }


def series_from_json(ctx, obj):
    return TruncatedLaurent(
        ctx,
        int(obj["val"]),
        [scalar_from_json(ctx, c) for c in obj["coeffs"]],
        prec=obj.get("prec"),
        exact=bool(obj.get("exact", False)),
    )


def matrix_to_json(m):
    return [[series_to_json(e) for e in row] for row in m.entries]


def matrix_from_json(ctx, obj):
    return LaurentMatrix(ctx, [[series_from_json(ctx, e) for e in row] for row in obj])


def lattice_to_json(lat):
    return {
        "rank": lat.rank,
        "level": rat_to_json(lat.level),
        "weights": [rat_to_json(w) for w in lat.weights],
        "frame": None if lat.frame is None else matrix_to_json(lat.frame),
    }


def lattice_from_json(ctx, obj):
    frame = obj.get("frame")
    return FilteredLattice(
        ctx,
        [rat_from_json(w) for w in obj["weights"]],
        level=rat_from_json(obj["level"]),
        frame=None if frame is None else matrix_from_json(ctx, frame),
    )


# -- torus points --


def point_to_json(pt):
    return {
        "lattice": pt.lattice,
        "q1": rat_to_json(pt.q1),
        "q2": rat_to_json(pt.q2),
        "sym": {k: rat_to_json(v) for k, v in pt.sym},
        "const": None if pt.const is None else scalar_to_json(pt.const),
        "lift": pt.is_lift,
    }


def point_from_json(ctx, obj):
    const = obj.get("const")
    return TorusPoint(
        obj["lattice"],
        rat_from_json(obj["q1"]),
        rat_from_json(obj["q2"]),
        {k: rat_from_json(v) for k, v in obj.get("sym", {}).items()},
        None if const is None else scalar_from_json(ctx, const),
        is_lift=bool(obj.get("lift", False)),
    )


# -- elementary blocks --


def block_to_json(b):
    out = {
        "p": b.p,
        "m": b.m,
        "a_coeffs": None,
        "a_radicand": None,
        "alpha": scalar_to_json(b.alpha),
        "nilpotent": [[scalar_to_json(c) for c in row] for row in b.nilp] if b.nilp else [],
        "weights": [rat_to_json(w) for w in b.weights],
        "degrees": list(b.degrees),
        "twists": [None if t is None else point_to_json(t) for t in b.twists] if b.twists else [],
        "injection": None if b.injection is None else block_to_json(b.injection),
    }
    if b.m > 0:
        if b.lead is not None:
            out["a_coeffs"] = [scalar_to_json(b.lead)] + [scalar_to_json(a) for a in b.tail]
        else:
            out["a_radicand"] = scalar_to_json(b.radicand)
            if any(not a.is_zero() for a in b.tail):
                out["a_coeffs"] = [None] + [scalar_to_json(a) for a in b.tail]
    return out


def block_from_json(ctx, obj, degrees=None):
    p, m = int(obj["p"]), int(obj["m"])
    lead = radicand = None
    tail = ()
    ac = obj.get("a_coeffs")
    if ac:
        lead = None if ac[0] is None else scalar_from_json(ctx, ac[0])
        tail = tuple(scalar_from_json(ctx, a) for a in ac[1:])
    ar = obj.get("a_radicand")
    if ar is not None:
        radicand = scalar_from_json(ctx, ar)
    nilp = tuple(
        tuple(scalar_from_json(ctx, c) for c in row) for row in obj.get("nilpotent", [])
    )
    twists = tuple(
        None if t is None else point_from_json(ctx, t) for t in obj.get("twists", [])
    )
    inj = obj.get("injection")
    injection = None if inj is None else block_from_json(ctx, inj)
    if degrees is None:
        degrees = obj.get("degrees", [0] * len(obj["weights"]))
    return ElementaryBlock.make(
        ctx, p, m,
        alpha=scalar_from_json(ctx, obj["alpha"]),
        weights=tuple(rat_from_json(w) for w in obj["weights"]),
        degrees=tuple(int(d) for d in degrees),
        lead=lead, radicand=radicand, tail=tail,
        nilp=nilp if nilp else (), twists=twists if any(t is not None for t in twists) else (),
        injection=injection,
    )


# -- global data --


def data_to_json(data):
    points = [sp.point for sp in data.points]
    return {
        "tau_tag": "infinity" if isinstance(data, FilteredBundleData) else "finite",
        "spectrum": [point_to_json(p.reduce()) for p in points],
        "lifts": [point_to_json(p) for p in points],
        "germs": [
            {"blocks": [block_to_json(b) for b in sp.germ.blocks]}
            for sp in data.points
        ],
        "base_degrees": [
            [[d for d in b.degrees] for b in sp.germ.blocks] for sp in data.points
        ],
    }


def data_from_json(ctx, kind, obj):
    cls = AdmissibleHiggsData if kind == "higgs" else FilteredBundleData
    coord = "finite" if kind == "higgs" else "infinity"
    lifts = obj.get("lifts") or obj["spectrum"]
    degrees = obj["base_degrees"]
    points = []
    for i, (pt_json, germ_json) in enumerate(zip(lifts, obj["germs"])):
        pt = point_from_json(ctx, pt_json)
        blocks = [
            block_from_json(ctx, bjson, degrees[i][j])
            for j, bjson in enumerate(germ_json["blocks"])
        ]
        points.append(
            SingularPoint(point=pt, germ=HiggsGerm.from_blocks(ctx, blocks, coord))
        )
    return cls(ctx, points)


# -- config documents --


def document_to_json(doc):
    return {
        "schema": SCHEMA_VERSION,
        "field": {"M": doc["ctx"].M, "symbols": list(doc["ctx"].symbols)},
        "precision": doc.get("precision"),
        "kind": doc["kind"],
        "payload": data_to_json(doc["data"]),
    }


def document_from_json(obj):
    if not isinstance(obj, dict) or "payload" not in obj:
        raise InputError("not a nahmkit document (missing payload)")
    fdecl = obj.get("field", {})
    ctx = FieldContext(
        M=int(fdecl.get("M", 12)), symbols=tuple(fdecl.get("symbols", ("x1",)))
    )
    kind = obj.get("kind")
    if kind not in ("higgs", "bundle"):
        raise InputError("document kind must be 'higgs' or 'bundle'")
    data = data_from_json(ctx, kind, obj["payload"])
    return {"ctx": ctx, "kind": kind, "data": data, "precision": obj.get("precision")}


def dumps(doc):
    return json.dumps(document_to_json(doc), indent=2)


def loads(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc
    return document_from_json(obj)
