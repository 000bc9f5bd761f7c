"""Newton polygon of the discriminant from the unbounded part of its tropicalization.

Rays of the tropical discriminant are grouped by direction; each group is dual
to one edge of the polygon, whose lattice length is unknown. Far-away lines
crossing the rays give linear equations in those lengths: a tropical line with
normal nu meets the rays pointing into its side with total multiplicity
sum(l_i * |det(u_i, nu)|), and that count equals a mixed volume computable from
the supports alone. Solving the system and walking the edges recovers the
polygon up to translation.

Lines only measure widths, which cannot tell apart polygons differing by a
shift of length between opposite edges. When the fan has three or more
antipodal pairs, far tropical curves with triangular support supply the
missing equations.
"""

from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import count, islice

from .classify import NotDominant
from .curves import SupportedMap, TropPoly
from .discriminant import ESSENTIAL, NonGenericInput, PLSet, trop_discriminant
from .geometry import (
    Fan,
    LatticePolygon,
    SingularMatrix,
    Vec2,
    add,
    angle_key,
    convex_hull,
    cross,
    dot,
    minkowski_sum,
    mixed_volume,
    primitive,
    rot90,
    scale,
    solve_linear,
    sub,
)


class NoRays(ValueError):
    pass


class NonClosing(ValueError):
    pass


class NonIntegralLengths(ValueError):
    pass


class InconsistentProbes(ValueError):
    """Held-out probes disagree with the solved lengths."""


class ProbeSelectionFailed(RuntimeError):
    """No nonsingular set of probe lines was found within the search radius."""


@dataclass(frozen=True)
class EdgeFamily:
    """All rays sharing one primitive direction, dual to one polygon edge."""

    index: int
    direction: Vec2  # outer normal of the dual edge
    u: Vec2  # counterclockwise edge direction
    rays: tuple


@dataclass(frozen=True)
class LineProbe:
    """The line <nu, x> = offset together with the families it crosses."""

    nu: Vec2
    offset: Fraction
    K: frozenset

    @property
    def direction(self) -> Vec2:
        return rot90(self.nu)


@dataclass(frozen=True)
class CurveProbe:
    """A far tropical curve max_m(<m, x - vertex>) over a triangle of exponents.

    Every monomial ties at the vertex, so the curve is three rays from there.
    ``coefficients`` holds the crossing multiplicity of each ray family.
    """

    support: tuple
    vertex: Vec2
    coefficients: tuple


def dual_fan_from_rays(D: PLSet) -> tuple[Fan, list[EdgeFamily]]:
    groups: dict = {}
    for base, d in D.rays:
        groups.setdefault(primitive(d), []).append(base)
    if not groups:
        raise NoRays("the set has no unbounded pieces")
    dirs = sorted(groups, key=angle_key)
    families = [
        EdgeFamily(i, d, rot90(d), tuple((b, d) for b in sorted(groups[d])))
        for i, d in enumerate(dirs)
    ]
    return Fan(tuple(dirs)), families


def _far_offset(D: PLSet, nu: Vec2, side: int) -> Fraction:
    """An offset putting the line strictly beyond the inflated bounding box on one side."""
    vs = D.vertices()
    xs = [v[0] for v in vs]
    ys = [v[1] for v in vs]
    corners = [(x, y) for x in (min(xs) - 1, max(xs) + 1) for y in (min(ys) - 1, max(ys) + 1)]
    values = [side * dot(nu, c) for c in corners]
    return Fraction(side * (max(values) + 1))


def _crossed_families(D: PLSet, families: list[EdgeFamily], nu: Vec2, offset) -> frozenset | None:
    """Families whose rays meet the line; None when the line touches anything else."""
    for piece in D.points:
        if dot(nu, piece) == offset:
            return None
    for p, q in D.segments:
        a, b = dot(nu, p) - offset, dot(nu, q) - offset
        if a * b <= 0:
            return None
    hit = set()
    for fam in families:
        for base, d in fam.rays:
            gap = offset - dot(nu, base)
            speed = dot(nu, d)
            if speed == 0:
                if gap == 0:
                    return None
                continue
            t = Fraction(gap) / speed
            if t > 0:
                hit.add(fam.index)
            elif t == 0:
                return None
    return frozenset(hit)


def _primitive_normals(radius: int):
    """Primitive integer vectors ordered by max-norm, then by angle."""
    for r in range(1, radius + 1):
        ring = [
            (p, q)
            for p in range(-r, r + 1)
            for q in range(-r, r + 1)
            if max(abs(p), abs(q)) == r and primitive((p, q)) == (p, q)
        ]
        yield from sorted(ring, key=angle_key)


def _rank(rows: list) -> int:
    m = [list(map(Fraction, r)) for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(rank + 1, len(m)):
            f = m[i][col] / m[rank][col]
            m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def probe_row(probe, families: list[EdgeFamily]) -> list[int]:
    if isinstance(probe, CurveProbe):
        return list(probe.coefficients)
    return [abs(cross(f.u, probe.nu)) if f.index in probe.K else 0 for f in families]


def _width_rank_bound(families: list[EdgeFamily]) -> int:
    """Largest rank reachable by straight-line probes.

    Straight lines only measure widths, and shifting length between opposite
    edges along a linear relation among their directions leaves every width
    unchanged, so each antipodal pair beyond two costs one rank.
    """
    dirs = {f.direction for f in families}
    pairs = sum(1 for d in dirs if (-d[0], -d[1]) in dirs) // 2
    return len(families) - max(0, pairs - 2)


def _dominant(support, vertex: Vec2, x: Vec2, d: Vec2 | None = None):
    """The unique exponent maximizing <m, x - vertex> (ties broken by <m, d>), or None."""
    y = sub(x, vertex)
    key = (lambda m: dot(m, y)) if d is None else (lambda m: (dot(m, d), dot(m, y)))
    ranked = sorted(support, key=key, reverse=True)
    return None if key(ranked[0]) == key(ranked[1]) else ranked[0]


def _curve_crossings(D: PLSet, families: list[EdgeFamily], support, vertex: Vec2):
    """Per-family crossing multiplicity with a far tropical curve, or None.

    Along a ray the tropical polynomial is convex and piecewise linear, so the
    multiplicity is the slope gained between the base and infinity. Rejects
    placements where the curve touches a point or a segment, or where rays of
    one family disagree.
    """
    for p in D.vertices():
        if _dominant(support, vertex, p) is None:
            return None
    for p, q in D.segments:
        if _dominant(support, vertex, p) != _dominant(support, vertex, q):
            return None
    coefficients = []
    for fam in families:
        seen = set()
        for base, d in fam.rays:
            start = _dominant(support, vertex, base)
            end = _dominant(support, vertex, base, d)
            if end is None:
                return None
            seen.add(dot(sub(end, start), d))
        if len(seen) != 1:
            return None
        coefficients.append(seen.pop())
    return tuple(coefficients)


def _probe_triangles(size: int):
    """Exponent triangles with one vertex at the origin, smallest first."""
    for n in range(2, size + 1):
        for a in range(1, n):
            b = n - a
            yield ((0, 0), (a, 0), (0, b))
            yield ((0, 0), (a, 0), (a, b))
            yield ((0, 0), (0, b), (a, b))


def _curve_probes(D: PLSet, families: list[EdgeFamily], size: int):
    """Far tropical curves placed so that the whole set sits in the origin's region."""
    vs = D.vertices()
    xs = [v[0] for v in vs]
    ys = [v[1] for v in vs]
    center = ((min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2)
    reach = max(max(xs) - min(xs), max(ys) - min(ys)) + 2
    for support in _probe_triangles(size):
        for k in range(8):
            vertex = add(center, (reach * 2**k, reach * 2**k))
            row = _curve_crossings(D, families, support, vertex)
            if row is not None:
                if any(row):
                    yield CurveProbe(support, vertex, row)
                break


CURVE_PROBE_SIZE = 12


def select_lines(D: PLSet, families: list[EdgeFamily], radius: int = 32) -> list[LineProbe]:
    """Greedily collect far-away probe lines until their rows span all lengths.

    Candidate normals are tried in order of increasing size, each on both sides
    of the set; a probe is kept when it raises the rank of the system. When
    straight lines cannot reach full rank, far tropical curves with triangular
    supports fill the gap.
    """
    r = len(families)
    width_bound = _width_rank_bound(families)
    chosen: list = []
    rows: list = []
    for nu in _primitive_normals(radius):
        if len(rows) == width_bound:
            break
        if any(dot(nu, f.direction) == 0 for f in families):
            continue
        for side in (1, -1):
            offset = _far_offset(D, nu, side)
            K = _crossed_families(D, families, nu, offset)
            if K is None or not K:
                continue
            probe = LineProbe(nu, offset, K)
            row = probe_row(probe, families)
            if _rank(rows + [row]) > len(rows):
                chosen.append(probe)
                rows.append(row)
                if len(rows) == r:
                    return chosen
    for probe in _curve_probes(D, families, CURVE_PROBE_SIZE):
        row = probe_row(probe, families)
        if _rank(rows + [row]) > len(rows):
            chosen.append(probe)
            rows.append(row)
            if len(rows) == r:
                return chosen
    raise ProbeSelectionFailed(f"only {len(rows)} of {r} independent probes within radius {radius}")


def _supports(A) -> tuple[list, list]:
    if isinstance(A, SupportedMap):
        return A.f1.support, A.f2.support
    A1, A2 = A
    return [tuple(a) for a in A1], [tuple(b) for b in A2]


def newton_polytope_jacobian(A) -> LatticePolygon:
    """Hull of a+b-(1,1) over pairs with det(a, b) != 0."""
    A1, A2 = _supports(A)
    pts = [(a[0] + b[0] - 1, a[1] + b[1] - 1) for a in A1 for b in A2 if cross(a, b) != 0]
    if not pts:
        raise NotDominant("every pair of exponents is parallel")
    return convex_hull(pts)


def _dilate(P: LatticePolygon, k: int) -> LatticePolygon:
    return (
        LatticePolygon(tuple(scale(k, v) for v in P.vertices)) if k else LatticePolygon(((0, 0),))
    )


def newton_polytope_composition(A, NB) -> LatticePolygon:
    """Newton polygon of B(f1, f2) for B with support NB and generic coefficients."""
    exponents = {tuple(v) for v in NB}
    if len(exponents) < 2:
        raise ValueError("the support of B needs at least two distinct exponents")
    A1, A2 = _supports(A)
    D1, D2 = convex_hull(A1), convex_hull(A2)
    pieces = [minkowski_sum(_dilate(D1, e[0]), _dilate(D2, e[1])) for e in exponents]
    return convex_hull([v for P in pieces for v in P.vertices])


def nb_segment(nu: Vec2) -> tuple[Vec2, Vec2]:
    """A binomial support in N^2 spanning the primitive vector nu."""
    p, q = abs(nu[0]), abs(nu[1])
    if nu[0] * nu[1] >= 0:
        return (0, 0), (p, q)
    return (0, q), (p, 0)


def mv_rhs(A, NB) -> Fraction:
    """Generic number of critical values on the curve B = 0, as MV(N(J), N(B o f))."""
    return mixed_volume(newton_polytope_jacobian(A), newton_polytope_composition(A, NB))


def probe_rhs(probe, A) -> Fraction:
    support = probe.support if isinstance(probe, CurveProbe) else nb_segment(probe.nu)
    return mv_rhs(A, support)


def edge_length_system(probes: Sequence, families: list[EdgeFamily], A):
    D = [probe_row(p, families) for p in probes]
    M = [probe_rhs(p, A) for p in probes]
    return D, M


def reconstruct_polygon(fan: Fan, lengths: Sequence) -> LatticePolygon:
    if any(Fraction(x).denominator != 1 or x <= 0 for x in lengths):
        raise ValueError("lengths must be positive integers")
    p = (0, 0)
    walk = [p]
    for d, ell in zip(fan.rays, lengths):
        p = add(p, scale(int(ell), rot90(d)))
        walk.append(p)
    if walk[-1] != (0, 0):
        raise NonClosing(f"edges sum to {walk[-1]}, not zero")
    return convex_hull(walk)


@dataclass(frozen=True)
class NewtonSolution:
    polygon: LatticePolygon
    fan: Fan
    families: tuple
    probes: tuple
    matrix: tuple
    rhs: tuple
    lengths: tuple
    valuations: SupportedMap


HELD_OUT_CURVES = 6


def _check_held_out(D: PLSet, families, probes, ell, A) -> None:
    """Curve probe counts rest on a Bernstein bound that is not always sharp, so
    a solution using them must also match further curve probes."""
    used = {p.support for p in probes if isinstance(p, CurveProbe)}
    extra = (p for p in _curve_probes(D, families, CURVE_PROBE_SIZE) if p.support not in used)
    for probe in islice(extra, HELD_OUT_CURVES):
        lhs = sum(a * b for a, b in zip(probe_row(probe, families), ell))
        if lhs != probe_rhs(probe, A):
            raise InconsistentProbes(
                f"curve probe on {list(probe.support)} counts {lhs}, expected {probe_rhs(probe, A)}"
            )


def solve_lengths(D: PLSet, A) -> tuple:
    """Families, probes, system and integer lengths for one tropical discriminant."""
    fan, families = dual_fan_from_rays(D)
    probes = select_lines(D, families)
    matrix, rhs = edge_length_system(probes, families, A)
    try:
        ell = solve_linear(matrix, rhs)
    except SingularMatrix as exc:  # select_lines guarantees full rank
        raise ProbeSelectionFailed(str(exc)) from exc
    if any(x.denominator != 1 or x <= 0 for x in ell):
        raise NonIntegralLengths(f"solved lengths {[str(x) for x in ell]}")
    if any(isinstance(p, CurveProbe) for p in probes):
        _check_held_out(D, families, probes, ell, A)
    return fan, families, probes, matrix, rhs, tuple(int(x) for x in ell)


def random_valuations(A, rng: random.Random, spread: int = 20) -> SupportedMap:
    A1, A2 = _supports(A)

    def poly(support):
        return TropPoly.from_pairs(
            (a, Fraction(rng.randint(-spread * 12, spread * 12), rng.choice((1, 3, 7, 11))))
            for a in support
        )

    return SupportedMap(poly(A1), poly(A2))


def newton_solution(
    A,
    m: SupportedMap | None = None,
    seed: int = 0,
    attempts: int = 20,
    lateral: str = ESSENTIAL,
) -> NewtonSolution:
    """Run the pipeline, resampling valuations on genericity failures.

    With ``m`` given, only that tropical map is tried.
    """
    newton_polytope_jacobian(A)
    rng = random.Random(seed)
    errors = []
    for attempt in count():
        if attempt >= (1 if m is not None else attempts):
            break
        trial = m if m is not None else random_valuations(A, rng)
        try:
            D = trop_discriminant(trial, lateral)
            fan, families, probes, matrix, rhs, ell = solve_lengths(D, A)
            polygon = reconstruct_polygon(fan, ell)
        except (NonGenericInput, NonIntegralLengths, InconsistentProbes, NonClosing, NoRays) as exc:
            errors.append(f"{type(exc).__name__}: {exc}")
            continue
        return NewtonSolution(
            polygon,
            fan,
            tuple(families),
            tuple(probes),
            tuple(map(tuple, matrix)),
            tuple(rhs),
            ell,
            trial,
        )
    raise NonIntegralLengths(
        "no valuation sample produced a consistent polygon: " + "; ".join(errors)
    )


def newton_polytope_of_discriminant(
    A, vals: SupportedMap | None = None, seed: int = 0, lateral: str = ESSENTIAL
) -> LatticePolygon:
    return newton_solution(A, vals, seed, lateral=lateral).polygon
