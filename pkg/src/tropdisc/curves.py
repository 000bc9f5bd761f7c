"""Max-plus polynomials in two variables and their corner loci."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .geometry import (
    LatticePolygon,
    Piece,
    RegularSubdivision,
    Vec2,
    convex_hull,
    cross,
    dot,
    lattice_length,
    line_piece,
    lower_hull_subdivision,
    primitive,
    ray_piece,
    segment_piece,
    sub,
)


class MissingLeads(ValueError):
    """A monomial has no leading coefficient."""


@dataclass(frozen=True)
class TropMonomial:
    exponent: tuple
    valuation: Fraction
    lead: tuple | None = None  # (real, imaginary) as Fractions

    def __post_init__(self):
        e = tuple(int(c) for c in self.exponent)
        if len(e) != 2 or min(e) < 0:
            raise ValueError(f"exponent {self.exponent} is not in N^2")
        object.__setattr__(self, "exponent", e)
        object.__setattr__(self, "valuation", Fraction(self.valuation))
        if self.lead is not None:
            re, im = (Fraction(c) for c in self.lead)
            if re == 0 and im == 0:
                raise ValueError(f"zero lead on monomial {e}")
            object.__setattr__(self, "lead", (re, im))


@dataclass(frozen=True)
class TropPoly:
    """x -> max over monomials of <x, exponent> + valuation."""

    monomials: tuple

    def __post_init__(self):
        mons = tuple(self.monomials)
        if not mons:
            raise ValueError("a tropical polynomial needs at least one monomial")
        exps = [m.exponent for m in mons]
        if len(set(exps)) != len(exps):
            raise ValueError("repeated exponent in tropical polynomial")
        object.__setattr__(self, "monomials", tuple(sorted(mons, key=lambda m: m.exponent)))

    @classmethod
    def from_pairs(cls, pairs: Iterable, leads: Sequence | None = None) -> TropPoly:
        """Build from ``(exponent, valuation)`` pairs, with optional leads."""
        pairs = list(pairs)
        leads = leads if leads is not None else [None] * len(pairs)
        return cls(tuple(TropMonomial(e, v, ld) for (e, v), ld in zip(pairs, leads)))

    @property
    def support(self) -> list:
        return [m.exponent for m in self.monomials]

    @property
    def valuations(self) -> dict:
        return {m.exponent: m.valuation for m in self.monomials}

    def shifted(self, c) -> TropPoly:
        return TropPoly(
            tuple(TropMonomial(m.exponent, m.valuation + c, m.lead) for m in self.monomials)
        )


@dataclass(frozen=True)
class SupportedMap:
    f1: TropPoly
    f2: TropPoly

    def __post_init__(self):
        for poly in (self.f1, self.f2):
            if (0, 0) in poly.support:
                raise ValueError("supports of a map must avoid the origin")

    @property
    def has_leads(self) -> bool:
        return all(m.lead is not None for p in (self.f1, self.f2) for m in p.monomials)


def evaluate(F: TropPoly, x: Vec2) -> tuple[Fraction, frozenset]:
    """Exact maximum and the full set of exponents attaining it."""
    best = None
    arg: list = []
    for m in F.monomials:
        v = m.exponent[0] * x[0] + m.exponent[1] * x[1] + m.valuation
        if best is None or v > best:
            best, arg = v, [m.exponent]
        elif v == best:
            arg.append(m.exponent)
    return Fraction(best), frozenset(arg)


def initial_form(F: TropPoly, x: Vec2) -> dict:
    """Leading coefficients of the terms that are maximal at x, keyed by exponent."""
    if any(m.lead is None for m in F.monomials):
        raise MissingLeads("initial_form needs every monomial to carry a lead")
    _, arg = evaluate(F, x)
    return {m.exponent: m.lead for m in F.monomials if m.exponent in arg}


@dataclass(frozen=True)
class CurveEdge:
    piece: Piece
    dual: frozenset  # exponents maximal along the edge
    weight: int


@dataclass(frozen=True)
class TropCurve:
    vertices: tuple
    vertex_duals: tuple
    edges: tuple
    poly: TropPoly | None = None

    @property
    def segments(self) -> list[CurveEdge]:
        return [e for e in self.edges if e.piece.kind == "segment"]

    @property
    def rays(self) -> list[CurveEdge]:
        return [e for e in self.edges if e.piece.kind == "ray"]

    @property
    def lines(self) -> list[CurveEdge]:
        return [e for e in self.edges if e.piece.kind == "line"]

    @property
    def is_empty(self) -> bool:
        return not self.edges

    def contains(self, p: Vec2) -> bool:
        return any(e.piece.contains(p) for e in self.edges)

    def incident_edges(self, v: Vec2) -> list[CurveEdge]:
        out = []
        for e in self.edges:
            if e.piece.kind == "line":
                continue
            if e.piece.base == v or (e.piece.kind == "segment" and e.piece.end == v):
                out.append(e)
        return out


def _tie_point(F_vals: dict, a, b, c) -> Vec2:
    """The point where three affinely independent monomials take equal values."""
    r1, r2 = sub(a, b), sub(a, c)
    s1, s2 = F_vals[b] - F_vals[a], F_vals[c] - F_vals[a]
    det = cross(r1, r2)
    return (Fraction(s1 * r2[1] - s2 * r1[1], det), Fraction(r1[0] * s2 - r2[0] * s1, det))


def corner_locus(F: TropPoly) -> tuple[TropCurve, RegularSubdivision]:
    """The tropical curve of F together with its dual regular subdivision."""
    vals = F.valuations
    sub_div = lower_hull_subdivision(F.support, vals)
    if len(F.monomials) == 1:
        return TropCurve((), (), (), F), sub_div
    if sub_div.dim == 1:
        edges = []
        for cell, pts in zip(sub_div.cells, sub_div.cell_points):
            p, q = cell.vertices
            n = sub(p, q)
            c = vals[q] - vals[p]
            base = (Fraction(c * n[0], dot(n, n)), Fraction(c * n[1], dot(n, n)))
            edges.append(CurveEdge(line_piece(base, (-n[1], n[0])), pts, lattice_length(p, q)))
        return TropCurve((), (), tuple(edges), F), sub_div

    vertex_of = {}
    for cell, pts in zip(sub_div.cells, sub_div.cell_points):
        vertex_of[pts] = _tie_point(vals, *cell.vertices[:3])
    edge_faces: dict = {}
    edge_dir: dict = {}
    for cell, pts in zip(sub_div.cells, sub_div.cell_points):
        for u, v in cell.edges():
            on = frozenset(p for p in pts if LatticePolygon((u, v)).contains(p))
            edge_faces.setdefault(on, []).append(pts)
            edge_dir.setdefault(on, (u, v))
    edges = []
    for on, faces in edge_faces.items():
        u, v = edge_dir[on]
        w = lattice_length(u, v)
        if len(faces) == 2:
            p, q = sorted((vertex_of[faces[0]], vertex_of[faces[1]]))
            edges.append(CurveEdge(segment_piece(p, q), on, w))
        else:
            d = sub(v, u)
            outward = primitive((d[1], -d[0]))
            edges.append(CurveEdge(ray_piece(vertex_of[faces[0]], outward), on, w))
    order = sorted(vertex_of, key=lambda k: vertex_of[k])
    edges.sort(key=lambda e: (e.piece.base, e.piece.direction))
    return (
        TropCurve(tuple(vertex_of[k] for k in order), tuple(order), tuple(edges), F),
        sub_div,
    )


def curve_of(F: TropPoly) -> TropCurve:
    return corner_locus(F)[0]


def dual_polygon(points: Iterable) -> LatticePolygon:
    return convex_hull(points)
