"""Invariant checkers returning lists of violations, shared by property tests and acceptance."""

from __future__ import annotations

import random
from fractions import Fraction
from math import lcm

from tropdisc.curves import TropCurve, TropPoly, evaluate
from tropdisc.discriminant import crosscheck_critical
from tropdisc.geometry import (
    LatticePolygon,
    Piece,
    add,
    orient,
    primitive_direction,
    rot90,
    scale,
    sub,
)


def outgoing(T: TropCurve, v) -> list:
    out = []
    for e in T.incident_edges(v):
        d = e.piece.direction
        out.append((e.weight, d if e.piece.base == v else scale(-1, d)))
    return out


def balancing_violations(T: TropCurve) -> list:
    bad = []
    for v in T.vertices:
        total = [sum(w * d[k] for w, d in outgoing(T, v)) for k in (0, 1)]
        if total != [0, 0]:
            bad.append((v, total))
    return bad


def grid_points(rng: random.Random, n: int, box: int = 40, den: int = 97) -> list:
    """Random points (i/den, j/den) given by their integer numerators."""
    return [
        (rng.randint(-box * den, box * den), rng.randint(-box * den, box * den)) for _ in range(n)
    ]


def _lcm_den(values) -> int:
    return lcm(1, *(Fraction(v).denominator for v in values))


def kapranov_violations(F: TropPoly, T: TropCurve, points, den: int = 97) -> list:
    """Grid points where a tie in the maximum disagrees with lying on a computed edge.

    Both sides run in scaled integer arithmetic, independently of the library's
    evaluation. Vertices and edge interior points are checked as well, exactly.
    """
    scale_v = _lcm_den(m.valuation for m in F.monomials)
    terms = [
        (a * scale_v, b * scale_v, int(m.valuation * scale_v * den))
        for m in F.monomials
        for a, b in [m.exponent]
    ]
    lines = []
    for e in T.edges:
        (bx, by), (dx, dy) = e.piece.base, e.piece.direction
        k = _lcm_den((bx, by))
        lines.append((e.piece, k, int(bx * k), int(by * k), dx, dy))

    def tied(i, j) -> bool:
        vals = sorted((a * i + b * j + c for a, b, c in terms), reverse=True)
        return vals[0] == vals[1]

    def on_curve(i, j) -> bool:
        for piece, k, bx, by, dx, dy in lines:
            rx, ry = i * k - bx * den, j * k - by * den
            if rx * dy - ry * dx == 0 and piece.holds(
                Fraction(rx * dx + ry * dy, k * den * (dx * dx + dy * dy))
            ):
                return True
        return False

    bad = [(Fraction(i, den), Fraction(j, den)) for i, j in points if tied(i, j) != on_curve(i, j)]
    on_curve_pts = list(T.vertices) + [e.piece.interior_point() for e in T.edges]
    bad += [p for p in on_curve_pts if len(evaluate(F, p)[1]) < 2]
    return bad


def on_edge_of(delta: LatticePolygon, Delta: LatticePolygon) -> bool:
    """True when a dual cell lies inside one edge of the Minkowski sum."""
    return any(
        all(orient(a, b, v) == 0 and Delta.contains(v) for v in delta.vertices)
        for a, b in Delta.edges()
    )


def duality_violations(Xi) -> list:
    """Dimension complement, orthogonality of dual edges, and unboundedness on the boundary."""
    bad = []
    for c in Xi.cells:
        if c.dim + c.delta.dim != 2:
            bad.append((c.index, "dimension"))
        if c.dim == 1:
            p, q = c.delta.vertices
            e = primitive_direction(sub(q, p))
            d = c.geometry.direction if isinstance(c.geometry, Piece) else None
            if d is None or d[0] * e[0] + d[1] * e[1] != 0:
                bad.append((c.index, "orthogonality"))
        if c.dim > 0 and (not c.bounded) != on_edge_of(c.delta, Xi.Delta):
            bad.append((c.index, "boundary"))
    return bad


def emptiness_violations(result) -> list:
    """Cells whose image is empty exactly when the critical curve misses them, violated."""
    report = crosscheck_critical(result, preimages=False)
    return [f for f in report.failures if f[1] == "emptiness"]


def closure_violations(fan, lengths) -> list:
    """Nonpositive or fractional lengths, or a nonzero sum of length times edge direction."""
    bad = [x for x in lengths if Fraction(x).denominator != 1 or x <= 0]
    end = (0, 0)
    for d, ell in zip(fan.rays, lengths):
        end = add(end, scale(ell, rot90(d)))
    if end != (0, 0):
        bad.append(("open", end))
    return bad


def contains_some_translate(P: LatticePolygon, Q: LatticePolygon) -> bool:
    """Whether an integer translate of Q fits inside P."""
    q0 = Q.vertices[0]
    xs = [p[0] for p in P.vertices]
    ys = [p[1] for p in P.vertices]
    for x in range(int(min(xs)), int(max(xs)) + 1):
        for y in range(int(min(ys)), int(max(ys)) + 1):
            t = (x - q0[0], y - q0[1])
            if all(P.contains(add(v, t)) for v in Q.vertices):
                return True
    return False
