"""Images of overlay cells and their union, the tropical discriminant."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .classify import (
    DIAGONAL,
    LATERAL,
    CriticalCurve,
    classify_all,
    critical_curve,
    is_essential,
)
from .curves import SupportedMap
from .geometry import (
    Piece,
    Vec2,
    add,
    cross,
    dot,
    primitive_direction,
    scale,
    sub,
)
from .overlay import Cell, PlaneSubdivision, overlay_of, validate_genericity


class NonGenericInput(ValueError):
    def __init__(self, failures: list[str]):
        super().__init__("; ".join(failures))
        self.failures = failures


WEST, SOUTH = (-1, 0), (0, -1)


def _q(p) -> Vec2:
    return (Fraction(p[0]), Fraction(p[1]))


@dataclass(frozen=True)
class PLSet:
    """Finite union of closed points, segments and rays, kept in reduced form.

    A full line is stored as two opposite rays from the point of the line
    closest to the origin.
    """

    points: tuple = ()
    segments: tuple = ()
    rays: tuple = ()

    @classmethod
    def build(cls, points=(), segments=(), rays=()) -> PLSet:
        return _canonical([_q(p) for p in points], segments, rays, ())

    @property
    def is_empty(self) -> bool:
        return not (self.points or self.segments or self.rays)

    def union(self, *others: PLSet) -> PLSet:
        return union_all((self, *others))

    def pieces(self) -> list[Piece]:
        out = [Piece(p, (1, 0), Fraction(0), Fraction(0)) for p in self.points]
        for p, q in self.segments:
            d = primitive_direction(sub(q, p))
            out.append(Piece(p, d, Fraction(0), Fraction(dot(sub(q, p), d), dot(d, d))))
        out.extend(Piece(b, d, Fraction(0), None) for b, d in self.rays)
        return out

    def contains(self, p: Vec2) -> bool:
        return any(piece.contains(_q(p)) for piece in self.pieces())

    def includes(self, other: PLSet) -> bool:
        """Whether other is a subset, comparing one carrier line at a time."""
        if not all(self.contains(p) for p in other.points):
            return False
        for key, local in other._by_line.items():
            mine = self._by_line.get(key, EMPTY)
            if mine.union(local) != mine:
                return False
        return True

    @cached_property
    def _by_line(self) -> dict:
        groups: dict = {}
        for p, q in self.segments:
            key = _line_key(p, primitive_direction(sub(q, p)))
            groups.setdefault(key, ([], []))[0].append((p, q))
        for b, d in self.rays:
            groups.setdefault(_line_key(b, d), ([], []))[1].append((b, d))
        return {k: _canonical((), segs, rays, ()) for k, (segs, rays) in groups.items()}

    def translate(self, v: Vec2) -> PLSet:
        return PLSet.build(
            [add(p, v) for p in self.points],
            [(add(p, v), add(q, v)) for p, q in self.segments],
            [(add(b, v), d) for b, d in self.rays],
        )

    def vertices(self) -> list[Vec2]:
        out = list(self.points)
        for p, q in self.segments:
            out += [p, q]
        out += [b for b, _ in self.rays]
        return out


def _line_key(p: Vec2, d: Vec2):
    if d[0] < 0 or (d[0] == 0 and d[1] < 0):
        d = (-d[0], -d[1])
    return d, cross(d, p)


def _canonical(points, segments, rays, lines) -> PLSet:
    groups: dict = {}

    def put(p, d, lo, hi):
        d = primitive_direction(d)
        key = _line_key(p, d)
        dd = key[0]
        sign = 1 if dd == d else -1
        t = Fraction(dot(p, dd))
        if sign == 1:
            groups.setdefault(key, []).append(
                (t + lo if lo is not None else None, None if hi is None else t + hi)
            )
        else:
            groups.setdefault(key, []).append(
                (None if hi is None else t - hi, t - lo if lo is not None else None)
            )

    pts = set()
    for p in points:
        pts.add(_q(p))
    for p, q in segments:
        p, q = _q(p), _q(q)
        if p == q:
            pts.add(p)
            continue
        d = primitive_direction(sub(q, p))
        put(p, d, Fraction(0), Fraction(dot(sub(q, p), d)))
    for b, d in rays:
        put(_q(b), d, Fraction(0), None)
    for b, d in lines:
        put(_q(b), d, None, None)

    segs, rs = [], []
    pieces: list[Piece] = []
    for (d, c), ivs in groups.items():
        n2 = dot(d, d)
        foot = scale(Fraction(c, n2), (-d[1], d[0]))

        # t = <p, d> parametrizes the line as foot + (t / |d|^2) d
        def at(t, foot=foot, n2=n2, d=d):
            return add(foot, scale(t / n2, d))

        ivs.sort(key=lambda iv: (iv[0] is not None, iv[0] if iv[0] is not None else 0))
        merged: list = []
        for lo, hi in ivs:
            if merged:
                plo, phi = merged[-1]
                if phi is None or lo is None or lo <= phi:
                    merged[-1] = (plo, None if (phi is None or hi is None) else max(phi, hi))
                    continue
            merged.append((lo, hi))
        for lo, hi in merged:
            if lo is None and hi is None:
                rs += [(foot, d), (foot, (-d[0], -d[1]))]
                pieces.append(Piece(foot, d, None, None))
            elif lo is None:
                rs.append((at(hi), (-d[0], -d[1])))
                pieces.append(Piece(at(hi), (-d[0], -d[1]), Fraction(0), None))
            elif hi is None:
                rs.append((at(lo), d))
                pieces.append(Piece(at(lo), d, Fraction(0), None))
            elif lo == hi:
                pts.add(at(lo))
            else:
                segs.append((at(lo), at(hi)))
                pieces.append(Piece(at(lo), d, Fraction(0), (hi - lo) / n2))
    lone = sorted(p for p in pts if not any(pc.contains(p) for pc in pieces))
    return PLSet(tuple(lone), tuple(sorted(segs)), tuple(sorted(rs)))


def union_all(sets: Iterable[PLSet]) -> PLSet:
    pts, segs, rays = [], [], []
    for s in sets:
        pts += s.points
        segs += s.segments
        rays += s.rays
    return _canonical(pts, segs, rays, ())


EMPTY = PLSet()


def ray_w(p: Vec2) -> PLSet:
    return PLSet.build(rays=[(_q(p), WEST)])


def ray_s(p: Vec2) -> PLSet:
    return PLSet.build(rays=[(_q(p), SOUTH)])


def ray_sw(p: Vec2) -> PLSet:
    return PLSet.build(rays=[(_q(p), WEST), (_q(p), SOUTH)])


class TwoDimensionalImage(ValueError):
    pass


def from_generators(points: list, directions: list) -> PLSet:
    """conv(points) + cone(directions), provided that set is at most 1-dimensional."""
    points = [_q(p) for p in points]
    dirs = [d for d in directions if d != (0, 0)]
    p0 = points[0]
    spans = [sub(p, p0) for p in points[1:] if p != p0] + dirs
    if not spans:
        return PLSet.build(points=[p0])
    u = spans[0]
    if any(cross(u, v) != 0 for v in spans):
        raise TwoDimensionalImage("image is two-dimensional")
    u = primitive_direction(u)
    ts = [Fraction(dot(sub(p, p0), u)) / dot(u, u) for p in points]
    forward = any(dot(d, u) > 0 for d in dirs)
    backward = any(dot(d, u) < 0 for d in dirs)
    lo, hi = min(ts), max(ts)
    if forward and backward:
        return _canonical([], [], [], [(p0, u)])
    if forward:
        return PLSet.build(rays=[(add(p0, scale(lo, u)), u)])
    if backward:
        return PLSet.build(rays=[(add(p0, scale(hi, u)), (-u[0], -u[1]))])
    return PLSet.build(segments=[(add(p0, scale(lo, u)), add(p0, scale(hi, u)))])


def affine_map(Xi: PlaneSubdivision, xi: Cell):
    """F restricted to the closure of xi, as a function on points and its linear part."""
    F1, F2 = Xi.T1.poly.valuations, Xi.T2.poly.valuations
    a, b = min(xi.sig1), min(xi.sig2)
    ca, cb = F1[a], F2[b]

    def point(x):
        return (dot(a, x) + ca, dot(b, x) + cb)

    def linear(d):
        return (dot(a, d), dot(b, d))

    return point, linear


def image_of_cell(Xi: PlaneSubdivision, xi: Cell) -> PLSet:
    point, linear = affine_map(Xi, xi)
    g = xi.geometry
    if xi.dim == 0:
        return PLSet.build(points=[point(g)])
    if xi.dim == 1:
        if g.kind == "segment":
            return from_generators([point(g.base), point(g.end)], [])
        dirs = [linear(g.direction)]
        if g.kind == "line":
            dirs.append(linear((-g.direction[0], -g.direction[1])))
        return from_generators([point(g.base)], dirs)
    return from_generators([point(p) for p in g.points], [linear(d) for d in g.directions])


def image_point(Xi: PlaneSubdivision, xi: Cell) -> Vec2:
    """F(xi) for cells on which F is constant."""
    img = image_of_cell(Xi, xi)
    if len(img.points) != 1 or img.segments or img.rays:
        raise ValueError(f"F is not constant on cell {xi.index}")
    return img.points[0]


ESSENTIAL, CRITICAL = "essential", "critical"


def phi(Xi: PlaneSubdivision, classes: dict, xi: Cell, critical=None, lateral=ESSENTIAL) -> PLSet:
    """Image of one cell.

    Lateral 2-cells use the images of their essential edges by default. With
    ``lateral="critical"`` they use F of their intersection with the critical
    curve instead, which needs ``critical``.
    """
    cls = classes[xi.index]
    if cls.rays:
        y = image_point(Xi, xi)
        return union_all([ray_w(y) if i == 1 else ray_s(y) for i in sorted(cls.rays)])
    if cls.label in ("1.1", "2.2.1"):
        return image_of_cell(Xi, xi)
    if cls.label == "2.2.2":
        if lateral == CRITICAL:
            return union_all(
                image_of_hit(Xi, xi, e.piece, iv) for e, iv in meets_critical(Xi, xi, critical)
            )
        return union_all(image_of_cell(Xi, g) for g in Xi.edges_of(xi) if is_essential(g, xi, Xi))
    return EMPTY


@dataclass
class DiscriminantResult:
    plset: PLSet
    subdivision: PlaneSubdivision
    classes: dict
    images: dict
    critical: CriticalCurve
    flagged: list = field(default_factory=list)  # crossings where both half-line rules fire


def analyze(m: SupportedMap, lateral: str = ESSENTIAL) -> DiscriminantResult:
    """Run the full cell-by-cell computation; raises on non-generic or non-dominant maps.

    A map without critical points has an empty discriminant, whatever its curves look like.
    """
    if lateral not in (ESSENTIAL, CRITICAL):
        raise ValueError(f"unknown lateral rule {lateral!r}")
    C = critical_curve(m)
    if C.is_empty:
        Xi = overlay_of(m)
        return DiscriminantResult(EMPTY, Xi, {}, {c.index: EMPTY for c in Xi.cells}, C)
    report = validate_genericity(m)
    if not report.ok:
        raise NonGenericInput(report.failures())
    Xi = overlay_of(m)
    classes = classify_all(Xi)
    images = {c.index: phi(Xi, classes, c, C, lateral) for c in Xi.cells}
    flagged = [i for i, k in classes.items() if k.label == "0.1.1" and len(k.curves) == 2]
    return DiscriminantResult(union_all(images.values()), Xi, classes, images, C, flagged)


def trop_discriminant(m: SupportedMap, lateral: str = ESSENTIAL) -> PLSet:
    return analyze(m, lateral).plset


# exact intersection of cells with the critical curve


def _cell_constraints(Xi: PlaneSubdivision, xi: Cell):
    """Equalities and strict inequalities cutting out the relatively open cell."""
    eqs, gts = [], []
    for P, sig in ((Xi.T1.poly, xi.sig1), (Xi.T2.poly, xi.sig2)):
        vals = P.valuations
        a0 = min(sig)
        for a in sig:
            if a != a0:
                eqs.append((sub(a, a0), vals[a] - vals[a0]))
        for c in P.support:
            if c not in sig:
                gts.append((sub(a0, c), vals[a0] - vals[c]))
    return eqs, gts


def _feasible_params(piece: Piece, eqs, gts):
    """Parameters t with piece.at(t) satisfying all constraints, as (lo, lo_open, hi, hi_open).

    Each constraint is (n, c) meaning <n, x> + c == 0 or > 0.
    """
    lo, lo_open = piece.lo, False
    hi, hi_open = piece.hi, False
    for n, c in eqs:
        alpha = dot(n, piece.direction)
        beta = dot(n, piece.base) + c
        if alpha == 0:
            if beta != 0:
                return None
            continue
        t = Fraction(-beta) / alpha
        if (lo is not None and (t < lo or (t == lo and lo_open))) or (
            hi is not None and (t > hi or (t == hi and hi_open))
        ):
            return None
        lo, hi, lo_open, hi_open = t, t, False, False
    for n, c in gts:
        alpha = dot(n, piece.direction)
        beta = dot(n, piece.base) + c
        if alpha == 0:
            if beta <= 0:
                return None
            continue
        t = Fraction(-beta) / alpha
        if alpha > 0 and (lo is None or t >= lo):
            lo, lo_open = t, True
        elif alpha < 0 and (hi is None or t <= hi):
            hi, hi_open = t, True
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and (lo_open or hi_open)):
            return None
    return lo, lo_open, hi, hi_open


def meets_critical(Xi: PlaneSubdivision, xi: Cell, C: CriticalCurve, extra_eqs=()) -> list:
    """Nonempty parameter intervals of C's edges inside xi (plus extra equalities)."""
    eqs, gts = _cell_constraints(Xi, xi)
    eqs = eqs + list(extra_eqs)
    hits = []
    for e in C.curve.edges:
        iv = _feasible_params(e.piece, eqs, gts)
        if iv is not None:
            hits.append((e, iv))
    return hits


def _samples(S: PLSet) -> list[Vec2]:
    out = list(S.points)
    for p, q in S.segments:
        d = sub(q, p)
        out += [add(p, scale(Fraction(k, 4), d)) for k in (1, 2, 3)]
    for b, d in S.rays:
        out.append(add(b, d))
    return out


def _gap_samples(Xi: PlaneSubdivision, xi: Cell, image: PLSet) -> list[Vec2]:
    """Points of F(xi) outside Phi(xi), for a lateral cell."""
    full = image_of_cell(Xi, xi)
    if image.is_empty:
        return _samples(full)
    pieces = full.pieces()
    base = pieces[0]
    line = Piece(base.base, base.direction, None, None)
    ts = sorted({line.param_of(v) for v in image.vertices() + full.vertices()})
    cand = [(ts[k] + ts[k + 1]) / 2 for k in range(len(ts) - 1)] + [ts[0] - 1, ts[-1] + 1]
    return [
        line.at(t) for t in cand if full.contains(line.at(t)) and not image.contains(line.at(t))
    ]


def image_of_hit(Xi: PlaneSubdivision, xi: Cell, piece: Piece, interval) -> PLSet:
    """Closure of F applied to the part of a critical edge inside xi."""
    point, linear = affine_map(Xi, xi)
    lo, _, hi, _ = interval
    if lo is not None and hi is not None:
        return from_generators([point(piece.at(lo)), point(piece.at(hi))], [])
    d = piece.direction
    if lo is not None:
        return from_generators([point(piece.at(lo))], [linear(d)])
    if hi is not None:
        return from_generators([point(piece.at(hi))], [linear((-d[0], -d[1]))])
    return from_generators([point(piece.base)], [linear(d), linear((-d[0], -d[1]))])


@dataclass
class CrosscheckReport:
    """Cell-wise comparison of images against the critical curve.

    ``failures`` lists violations of the cell-wise statements; ``uncovered``
    lists critical values F(x), x on the critical curve, that the union of all
    images misses.
    """

    failures: list = field(default_factory=list)
    uncovered: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def union_ok(self) -> bool:
        return not self.uncovered


def crosscheck_critical(result: DiscriminantResult, preimages: bool = True) -> CrosscheckReport:
    """Compare each image with where the critical curve actually meets the cell.

    With ``preimages`` false only emptiness, boundedness and coverage are checked.
    """
    Xi, C = result.subdivision, result.critical
    report = CrosscheckReport()
    if C.is_empty:
        # every image is empty and nothing meets the curve
        report.checked = len(Xi.cells)
        return report
    for xi in Xi.cells:
        img = result.images[xi.index]
        hits = meets_critical(Xi, xi, C)
        report.checked += 1
        if img.is_empty != (not hits):
            report.failures.append((xi.index, "emptiness", result.classes[xi.index].label))
        for e, iv in hits:
            reached = image_of_hit(Xi, xi, e.piece, iv)
            if not result.plset.includes(reached):
                report.uncovered.append((xi.index, reached))
        if result.classes[xi.index].label == "1.3.2.1":
            if any(iv[0] is None or iv[2] is None for _, iv in hits):
                report.failures.append((xi.index, "unbounded", "1.3.2.1"))
        if not preimages or xi.dim != 2:
            continue
        if result.classes[xi.index].relevance not in (DIAGONAL, LATERAL):
            continue
        (a,), (b,) = xi.sig1, xi.sig2
        va, vb = Xi.T1.poly.valuations[a], Xi.T2.poly.valuations[b]

        def fibre(y, a=a, b=b, va=va, vb=vb):
            return [(a, va - y[0]), (b, vb - y[1])]

        for y in _samples(img):
            if not meets_critical(Xi, xi, C, fibre(y)):
                report.failures.append((xi.index, "missing preimage", y))
        if result.classes[xi.index].relevance == LATERAL:
            for y in _gap_samples(Xi, xi, img):
                if meets_critical(Xi, xi, C, fibre(y)):
                    report.failures.append((xi.index, "extra preimage", y))
    return report


def translate_check_map(m: SupportedMap, c1, c2) -> SupportedMap:
    return SupportedMap(m.f1.shifted(c1), m.f2.shifted(c2))
