"""The common refinement of two tropical curves and its mixed dual cells.

Every cell is determined by its pair of argmax sets (one per polynomial), so
cells are keyed by that signature. Closures follow from signature
containment: a cell lies in the closure of another exactly when both of its
argmax sets contain the other's.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .curves import SupportedMap, TropCurve, TropPoly, corner_locus, evaluate
from .geometry import (
    LatticePolygon,
    Piece,
    Vec2,
    convex_hull,
    cross,
    dot,
    line_intersection,
    minkowski_sum,
    primitive,
    ray_piece,
    rot90,
    segment_piece,
    sub,
)


@dataclass(frozen=True)
class Region:
    """Closed convex region conv(points) + cone(directions)."""

    points: tuple
    directions: tuple

    @property
    def bounded(self) -> bool:
        return not self.directions


@dataclass(frozen=True)
class Cell:
    index: int
    dim: int
    geometry: object  # Vec2 for 0-cells, Piece for 1-cells, Region for 2-cells
    sig1: frozenset
    sig2: frozenset
    delta1: LatticePolygon
    delta2: LatticePolygon
    delta: LatticePolygon

    @property
    def signature(self) -> tuple:
        return (self.sig1, self.sig2)

    @property
    def bounded(self) -> bool:
        if self.dim == 0:
            return True
        if self.dim == 1:
            return self.geometry.kind == "segment"
        return self.geometry.bounded

    def sample_point(self) -> Vec2:
        """A rational point in the relative interior."""
        if self.dim == 0:
            return self.geometry
        if self.dim == 1:
            return self.geometry.interior_point()
        pts, dirs = self.geometry.points, self.geometry.directions
        cx = sum(Fraction(p[0]) for p in pts) / len(pts)
        cy = sum(Fraction(p[1]) for p in pts) / len(pts)
        for d in dirs:
            cx, cy = cx + d[0], cy + d[1]
        return (cx, cy)


@dataclass
class PlaneSubdivision:
    cells: list
    T1: TropCurve
    T2: TropCurve
    boundary: dict = field(default_factory=dict)  # index -> lower-dim cells in closure
    cofaces: dict = field(default_factory=dict)  # index -> higher-dim cells containing it
    by_signature: dict = field(default_factory=dict)

    def of_dim(self, d: int) -> list[Cell]:
        return [c for c in self.cells if c.dim == d]

    def cell_at(self, x: Vec2) -> Cell:
        sig = (evaluate(self.T1.poly, x)[1], evaluate(self.T2.poly, x)[1])
        return self.by_signature[sig]

    def adjacent_2cells(self, c: Cell) -> list[Cell]:
        return [self.cells[j] for j in self.cofaces[c.index] if self.cells[j].dim == 2]

    def endpoints(self, c: Cell) -> list[Cell]:
        return [self.cells[j] for j in self.boundary[c.index] if self.cells[j].dim == 0]

    def edges_of(self, c: Cell) -> list[Cell]:
        """The 1-cells directly adjacent to a 2-cell."""
        return [self.cells[j] for j in self.boundary[c.index] if self.cells[j].dim == 1]

    @property
    def Delta(self) -> LatticePolygon:
        return minkowski_sum(convex_hull(self.T1.poly.support), convex_hull(self.T2.poly.support))


def _max_along(sig: frozenset, n: Vec2) -> frozenset:
    best = max(dot(n, a) for a in sig)
    return frozenset(a for a in sig if dot(n, a) == best)


def _breakpoints(pieces_a: list, pieces_b: list) -> tuple[list, list]:
    bp_a = [set() for _ in pieces_a]
    bp_b = [set() for _ in pieces_b]
    for i, f in enumerate(pieces_a):
        for j, g in enumerate(pieces_b):
            hit = line_intersection(f.base, f.direction, g.base, g.direction)
            if hit is not None:
                t, s = hit
                if f.holds(t) and g.holds(s):
                    bp_a[i].add(t)
                    bp_b[j].add(s)
            elif cross(sub(g.base, f.base), f.direction) == 0:
                for src, dst, bp in ((g, f, bp_a[i]), (f, g, bp_b[j])):
                    for t in (src.lo, src.hi):
                        if t is None:
                            continue
                        u = dst.param_of(src.at(t))
                        if dst.holds(u):
                            bp.add(u)
    for pieces, bps in ((pieces_a, bp_a), (pieces_b, bp_b)):
        for f, bp in zip(pieces, bps):
            bp.update(t for t in (f.lo, f.hi) if t is not None)
    return bp_a, bp_b


def _split(f: Piece, params: set) -> list[Piece]:
    ts = sorted(params)
    if not ts:
        return [f]
    out = []
    if f.lo is None:
        out.append(ray_piece(f.at(ts[0]), (-f.direction[0], -f.direction[1])))
    out.extend(segment_piece(f.at(a), f.at(b)) for a, b in zip(ts, ts[1:]))
    if f.hi is None:
        out.append(ray_piece(f.at(ts[-1]), f.direction))
    return out


def _recession_generators(a, A1, b, A2) -> tuple:
    normals = [sub(a, c) for c in A1 if c != a] + [sub(b, c) for c in A2 if c != b]
    if not normals:
        return ((1, 0), (0, 1), (-1, 0), (0, -1))
    candidates = set()
    for m in normals:
        for v in (rot90(m), (m[1], -m[0]), m):
            candidates.add(primitive(v))
    return tuple(sorted(d for d in candidates if all(dot(d, m) >= 0 for m in normals)))


def overlay(T1: TropCurve, T2: TropCurve) -> PlaneSubdivision:
    """Cells of the subdivision cut out by T1 and T2 together."""
    F1, F2 = T1.poly, T2.poly

    def signature(x):
        return evaluate(F1, x)[1], evaluate(F2, x)[1]

    p1 = [e.piece for e in T1.edges]
    p2 = [e.piece for e in T2.edges]
    bp1, bp2 = _breakpoints(p1, p2)

    zero: dict = {}
    one: dict = {}
    for pieces, bps in ((p1, bp1), (p2, bp2)):
        for f, bp in zip(pieces, bps):
            for t in bp:
                x = f.at(t)
                zero.setdefault(signature(x), x)
            for piece in _split(f, bp):
                one.setdefault(signature(piece.interior_point()), piece)
    for T in (T1, T2):
        for v in T.vertices:
            zero.setdefault(signature(v), v)

    two: set = set()
    for (s1, s2), piece in one.items():
        n = rot90(piece.direction)
        for side in (n, (-n[0], -n[1])):
            two.add((_max_along(s1, side), _max_along(s2, side)))
    if not one:
        two.add(signature((0, 0)))

    cells: list[Cell] = []

    def make(dim, geom, sig):
        d1, d2 = convex_hull(sig[0]), convex_hull(sig[1])
        cells.append(Cell(len(cells), dim, geom, sig[0], sig[1], d1, d2, minkowski_sum(d1, d2)))

    for sig in sorted(zero, key=lambda k: zero[k]):
        make(0, zero[sig], sig)
    for sig in sorted(one, key=lambda k: (one[k].base, one[k].direction, one[k].hi or 0)):
        make(1, one[sig], sig)

    A1, A2 = F1.support, F2.support
    for sig in sorted(two, key=lambda k: (sorted(k[0]), sorted(k[1]))):
        (a,), (b,) = sig
        pts = [z for s, z in zero.items() if a in s[0] and b in s[1]]
        pts += [pc.base for s, pc in one.items() if pc.kind == "line" and a in s[0] and b in s[1]]
        if not pts:
            pts = [(Fraction(0), Fraction(0))]
        region = Region(tuple(sorted(set(pts))), _recession_generators(a, A1, b, A2))
        make(2, region, sig)

    sub_div = PlaneSubdivision(cells, T1, T2)
    sub_div.by_signature = {c.signature: c for c in cells}
    sub_div.boundary = {c.index: [] for c in cells}
    sub_div.cofaces = {c.index: [] for c in cells}
    for hi in cells:
        for lo in cells:
            if lo.dim < hi.dim and hi.sig1 <= lo.sig1 and hi.sig2 <= lo.sig2:
                sub_div.boundary[hi.index].append(lo.index)
                sub_div.cofaces[lo.index].append(hi.index)
    return sub_div


def _convex_position(sig: frozenset) -> bool:
    return len(convex_hull(sig).vertices) == len(sig)


def unstable_cells(Xi: PlaneSubdivision) -> list[Cell]:
    bad = []
    for c in Xi.cells:
        additive = c.delta.dim == c.delta1.dim + c.delta2.dim
        if not (additive and _convex_position(c.sig1) and _convex_position(c.sig2)):
            bad.append(c)
    return bad


def is_stable(Xi: PlaneSubdivision) -> tuple[bool, list[Cell]]:
    bad = unstable_cells(Xi)
    return not bad, bad


@dataclass(frozen=True)
class GenericityReport:
    triangulation: tuple  # per polynomial
    trivalent: tuple  # per curve
    stable: bool
    nonempty: tuple
    offending: tuple = ()

    @property
    def ok(self) -> bool:
        return (
            all(self.triangulation) and all(self.trivalent) and self.stable and all(self.nonempty)
        )

    def failures(self) -> list[str]:
        out = []
        for i in (0, 1):
            if not self.nonempty[i]:
                out.append(f"curve {i + 1} is empty")
            if not self.triangulation[i]:
                out.append(f"dual subdivision {i + 1} is not a triangulation")
            if not self.trivalent[i]:
                out.append(f"curve {i + 1} has a vertex that is not trivalent")
        if not self.stable:
            out.append("overlay is not stable")
        return out


def _is_triangulation(sub_div) -> bool:
    return all(len(pts) == cell.dim + 1 for cell, pts in zip(sub_div.cells, sub_div.cell_points))


def validate_genericity(m: SupportedMap) -> GenericityReport:
    curves = [corner_locus(m.f1), corner_locus(m.f2)]
    tri = tuple(_is_triangulation(sd) for _, sd in curves)
    trivalent = tuple(all(len(T.incident_edges(v)) == 3 for v in T.vertices) for T, _ in curves)
    nonempty = tuple(not T.is_empty for T, _ in curves)
    Xi = overlay(curves[0][0], curves[1][0])
    bad = unstable_cells(Xi)
    return GenericityReport(tri, trivalent, not bad, nonempty, tuple(c.index for c in bad))


def overlay_of(m: SupportedMap) -> PlaneSubdivision:
    return overlay(corner_locus(m.f1)[0], corner_locus(m.f2)[0])


def poly_pair(Xi: PlaneSubdivision) -> tuple[TropPoly, TropPoly]:
    return Xi.T1.poly, Xi.T2.poly
