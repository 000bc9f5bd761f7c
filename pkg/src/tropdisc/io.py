"""JSON input and output for maps and pipeline results."""

from __future__ import annotations

import json
from dataclasses import fields, is_dataclass
from fractions import Fraction
from functools import singledispatch

import jsonschema

from .classify import CellClass
from .curves import SupportedMap, TropCurve, TropMonomial, TropPoly
from .discriminant import PLSet
from .geometry import Fan, LatticePolygon, Piece
from .newton import CurveProbe, LineProbe, NewtonSolution
from .oracle import ValuationCloud
from .overlay import Cell, PlaneSubdivision, Region

RATIONAL = r"^-?[0-9]+(/[0-9]+)?$"

MONOMIAL_SCHEMA = {
    "type": "object",
    "required": ["exp", "val"],
    "additionalProperties": False,
    "properties": {
        "exp": {
            "type": "array",
            "items": {"type": "integer", "minimum": 0},
            "minItems": 2,
            "maxItems": 2,
        },
        "val": {"type": "string", "pattern": RATIONAL},
        "lead": {
            "type": "array",
            "items": {"type": "string", "pattern": RATIONAL},
            "minItems": 2,
            "maxItems": 2,
        },
    },
}

MAP_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["f1", "f2"],
    "additionalProperties": False,
    "properties": {
        "f1": {"type": "array", "minItems": 1, "items": MONOMIAL_SCHEMA},
        "f2": {"type": "array", "minItems": 1, "items": MONOMIAL_SCHEMA},
    },
}


class SchemaError(ValueError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


class DomainError(ValueError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def _rational(text: str, pointer: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(pointer, f"not a rational number: {text!r}") from exc


def parse_map(text: str) -> SupportedMap:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc
    errors = sorted(
        jsonschema.Draft202012Validator(MAP_SCHEMA).iter_errors(doc),
        key=lambda e: list(e.absolute_path),
    )
    if errors:
        err = errors[0]
        raise SchemaError(_pointer(err.absolute_path), err.message)
    polys = []
    for key in ("f1", "f2"):
        monos, seen = [], set()
        for i, rec in enumerate(doc[key]):
            here = f"/{key}/{i}"
            exp = tuple(rec["exp"])
            if exp == (0, 0):
                raise DomainError(here + "/exp", "the origin is not an allowed exponent")
            if exp in seen:
                raise DomainError(here + "/exp", f"exponent {list(exp)} repeated")
            seen.add(exp)
            val = _rational(rec["val"], here + "/val")
            lead = None
            if "lead" in rec:
                lead = tuple(_rational(c, f"{here}/lead/{j}") for j, c in enumerate(rec["lead"]))
                if lead == (0, 0):
                    raise DomainError(here + "/lead", "lead coefficient is zero")
            monos.append(TropMonomial(exp, val, lead))
        polys.append(TropPoly(tuple(monos)))
    return SupportedMap(polys[0], polys[1])


def map_document(m: SupportedMap) -> dict:
    def record(t: TropMonomial) -> dict:
        out = {"exp": list(t.exponent), "val": str(t.valuation)}
        if t.lead is not None:
            out["lead"] = [str(c) for c in t.lead]
        return out

    return {key: [record(t) for t in P.monomials] for key, P in (("f1", m.f1), ("f2", m.f2))}


@singledispatch
def to_jsonable(obj):
    """Plain JSON structure with rationals as "p/q" strings."""
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@to_jsonable.register(type(None))
@to_jsonable.register(bool)
@to_jsonable.register(int)
@to_jsonable.register(str)
def _(obj):
    return obj


@to_jsonable.register
def _(obj: float):
    return round(obj, 12)


@to_jsonable.register
def _(obj: Fraction):
    return str(obj)


@to_jsonable.register(list)
@to_jsonable.register(tuple)
def _(obj):
    return [to_jsonable(v) for v in obj]


@to_jsonable.register(set)
@to_jsonable.register(frozenset)
def _(obj):
    return sorted((to_jsonable(v) for v in obj), key=json.dumps)


@to_jsonable.register
def _(obj: dict):
    return {str(k): to_jsonable(v) for k, v in obj.items()}


@to_jsonable.register
def _(obj: SupportedMap):
    return map_document(obj)


@to_jsonable.register
def _(obj: PLSet):
    return {
        "points": [to_jsonable(p) for p in obj.points],
        "segments": [{"start": to_jsonable(p), "end": to_jsonable(q)} for p, q in obj.segments],
        "rays": [{"base": to_jsonable(b), "direction": list(d)} for b, d in obj.rays],
    }


@to_jsonable.register
def _(obj: Piece):
    out = {"kind": obj.kind, "base": to_jsonable(obj.base), "direction": list(obj.direction)}
    if obj.kind == "segment":
        out["end"] = to_jsonable(obj.end)
    return out


@to_jsonable.register
def _(obj: TropCurve):
    return {
        "vertices": to_jsonable(obj.vertices),
        "edges": [
            {**to_jsonable(e.piece), "weight": e.weight, "dual": to_jsonable(e.dual)}
            for e in obj.edges
        ],
    }


@to_jsonable.register
def _(obj: LatticePolygon):
    return {"vertices": [list(v) for v in obj.vertices]}


@to_jsonable.register
def _(obj: Fan):
    return {"rays": [list(r) for r in obj.rays]}


@to_jsonable.register
def _(obj: Region):
    return {"points": to_jsonable(obj.points), "directions": [list(d) for d in obj.directions]}


@to_jsonable.register
def _(obj: Cell):
    return {
        "index": obj.index,
        "dim": obj.dim,
        "geometry": to_jsonable(obj.geometry),
        "signature": [to_jsonable(obj.sig1), to_jsonable(obj.sig2)],
        "dual": to_jsonable(obj.delta),
    }


@to_jsonable.register
def _(obj: CellClass):
    return {
        "label": obj.label,
        "relevance": obj.relevance,
        "curves": list(obj.curves),
        "super_critical": sorted(obj.rays),
    }


@to_jsonable.register
def _(obj: PlaneSubdivision):
    return {"cells": [to_jsonable(c) for c in obj.cells]}


@to_jsonable.register
def _(obj: LineProbe):
    return {"normal": list(obj.nu), "offset": to_jsonable(obj.offset), "families": sorted(obj.K)}


@to_jsonable.register
def _(obj: CurveProbe):
    return {
        "support": [list(e) for e in obj.support],
        "vertex": to_jsonable(obj.vertex),
        "coefficients": to_jsonable(obj.coefficients),
    }


@to_jsonable.register
def _(obj: NewtonSolution):
    return {
        "polygon": to_jsonable(obj.polygon),
        "normalized": to_jsonable(obj.polygon.normalized()),
        "fan": to_jsonable(obj.fan),
        "lengths": list(obj.lengths),
        "probes": [to_jsonable(p) for p in obj.probes],
        "matrix": to_jsonable(obj.matrix),
        "rhs": to_jsonable(obj.rhs),
        "valuations": map_document(obj.valuations),
    }


@to_jsonable.register
def _(obj: ValuationCloud):
    return {
        "points": [
            {"at": [round(x, 9), round(y, 9)], "confidence": round(c, 6)}
            for (x, y), c in obj.points
        ],
        "dropped": obj.dropped,
    }


def classification_table(Xi: PlaneSubdivision, classes: dict, images: dict | None = None) -> dict:
    """Cell-indexed case labels, with images when given."""
    rows = []
    for c in Xi.cells:
        row = {"index": c.index, "dim": c.dim, "sample": to_jsonable(c.sample_point())}
        row.update(to_jsonable(classes[c.index]))
        if images is not None:
            row["image"] = to_jsonable(images[c.index])
        rows.append(row)
    return {"cells": rows}


def emit_json(result) -> str:
    return json.dumps(to_jsonable(result), sort_keys=True, indent=2) + "\n"
