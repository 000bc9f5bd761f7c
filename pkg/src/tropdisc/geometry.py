"""Exact planar geometry over the rationals.

Points are plain ``(x, y)`` tuples whose entries are ``int`` or ``Fraction``.
Nothing in this module ever rounds.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd, lcm

Vec2 = tuple  # (x, y) with int or Fraction entries


class SingularMatrix(ValueError):
    """Raised when a linear system has no unique solution."""


def vec(x, y) -> Vec2:
    """Build a point with exact rational coordinates."""
    return (Fraction(x), Fraction(y))


def add(p: Vec2, q: Vec2) -> Vec2:
    return (p[0] + q[0], p[1] + q[1])


def sub(p: Vec2, q: Vec2) -> Vec2:
    return (p[0] - q[0], p[1] - q[1])


def scale(c, p: Vec2) -> Vec2:
    return (c * p[0], c * p[1])


def dot(p: Vec2, q: Vec2):
    return p[0] * q[0] + p[1] * q[1]


def cross(p: Vec2, q: Vec2):
    """The 2x2 determinant det(p, q)."""
    return p[0] * q[1] - p[1] * q[0]


def rot90(p: Vec2) -> Vec2:
    """Counterclockwise quarter turn."""
    return (-p[1], p[0])


def orient(p: Vec2, q: Vec2, r: Vec2):
    """Positive when p, q, r turn counterclockwise."""
    return cross(sub(q, p), sub(r, p))


def _is_integral(v) -> bool:
    return isinstance(v, int) or (isinstance(v, Fraction) and v.denominator == 1)


def primitive(v: Vec2) -> Vec2:
    """Divide an integer vector by the gcd of its coordinates."""
    x, y = v
    if not (_is_integral(x) and _is_integral(y)):
        raise ValueError(f"primitive() needs an integer vector, got {v}")
    x, y = int(x), int(y)
    if x == 0 and y == 0:
        raise ValueError("primitive() of the zero vector")
    g = gcd(x, y)
    return (x // g, y // g)


def primitive_direction(v: Vec2) -> Vec2:
    """Primitive integer vector pointing along a nonzero rational vector."""
    x, y = Fraction(v[0]), Fraction(v[1])
    m = lcm(x.denominator, y.denominator)
    return primitive((int(x * m), int(y * m)))


def lattice_length(p: Vec2, q: Vec2) -> int:
    """Number of lattice points on the integer segment [p, q], minus one."""
    d = sub(q, p)
    if not (_is_integral(d[0]) and _is_integral(d[1])):
        raise ValueError("lattice_length needs integer endpoints")
    return gcd(int(d[0]), int(d[1]))


def angle_key(v: Vec2):
    """Sort key ordering nonzero vectors counterclockwise starting from (1, 0)."""
    x, y = v
    half = 0 if (y > 0 or (y == 0 and x > 0)) else 1
    # within a half-plane, order by cross product through a comparable slope proxy
    return (half, _PseudoAngle(v))


@dataclass(frozen=True)
class _PseudoAngle:
    v: Vec2

    def __lt__(self, other: _PseudoAngle) -> bool:
        return cross(self.v, other.v) > 0


@dataclass(frozen=True)
class LatticePolygon:
    """Convex polygon given by its counterclockwise vertex list.

    Points and segments are legal; ``dim`` tells them apart.
    """

    vertices: tuple

    @property
    def dim(self) -> int:
        return min(len(self.vertices) - 1, 2)

    def edges(self) -> list[tuple[Vec2, Vec2]]:
        vs = self.vertices
        if len(vs) < 2:
            return []
        if len(vs) == 2:
            return [(vs[0], vs[1])]
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def contains(self, p: Vec2) -> bool:
        """Closed containment test."""
        vs = self.vertices
        if len(vs) == 1:
            return tuple(p) == tuple(vs[0])
        if len(vs) == 2:
            a, b = vs
            if orient(a, b, p) != 0:
                return False
            return dot(sub(p, a), sub(b, a)) >= 0 and dot(sub(p, b), sub(a, b)) >= 0
        return all(orient(a, b, p) >= 0 for a, b in self.edges())

    def on_boundary(self, p: Vec2) -> bool:
        if self.dim < 2:
            return self.contains(p)
        return self.contains(p) and any(orient(a, b, p) == 0 for a, b in self.edges())

    def translate(self, v: Vec2) -> LatticePolygon:
        return LatticePolygon(tuple(add(p, v) for p in self.vertices))

    def normalized(self) -> LatticePolygon:
        """Translate so the lexicographically smallest vertex sits at the origin."""
        low = min(self.vertices)
        return self.translate((-low[0], -low[1]))


def convex_hull(points: Iterable[Vec2]) -> LatticePolygon:
    """Counterclockwise hull without collinear vertices (monotone chain)."""
    pts = sorted(set((Fraction(p[0]), Fraction(p[1])) for p in points))
    if not pts:
        raise ValueError("convex_hull of an empty set")
    pts = [(_demote(x), _demote(y)) for x, y in pts]
    if len(pts) <= 2:
        return LatticePolygon(tuple(pts))

    def chain(seq):
        out: list = []
        for p in seq:
            while len(out) >= 2 and orient(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        hull = hull[:1]
    return LatticePolygon(tuple(hull))


def _demote(v):
    """Keep integers as ``int`` so lattice data stays readable."""
    v = Fraction(v)
    return int(v) if v.denominator == 1 else v


def minkowski_sum(P: LatticePolygon, Q: LatticePolygon) -> LatticePolygon:
    return convex_hull(add(p, q) for p in P.vertices for q in Q.vertices)


def area(P: LatticePolygon) -> Fraction:
    vs = P.vertices
    if len(vs) < 3:
        return Fraction(0)
    twice = sum(cross(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))
    return Fraction(twice, 2)


def mixed_volume(P: LatticePolygon, Q: LatticePolygon) -> Fraction:
    """Vol(P+Q) - Vol(P) - Vol(Q)."""
    return area(minkowski_sum(P, Q)) - area(P) - area(Q)


def affine_dim(points: Iterable[Vec2]) -> int:
    pts = list(points)
    if not pts:
        return -1
    return convex_hull(pts).dim


@dataclass(frozen=True)
class Fan:
    """Primitive rays with distinct directions in counterclockwise order."""

    rays: tuple

    def __post_init__(self):
        for r in self.rays:
            if primitive(r) != tuple(r):
                raise ValueError(f"fan ray {r} is not primitive")
        keys = [angle_key(r) for r in self.rays]
        if any(not (keys[i] < keys[i + 1]) for i in range(len(keys) - 1)):
            raise ValueError("fan rays must be strictly counterclockwise ordered")


@dataclass(frozen=True)
class RegularSubdivision:
    """Subdivision induced by lifting each support point a to height -lift(a).

    ``cell_points[i]`` lists every support point lying on the lower face whose
    projection is ``cells[i]``, including non-vertex points.
    """

    cells: tuple
    cell_points: tuple
    lifting: Mapping = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.cells), default=-1)


def lower_hull_subdivision(
    support: Sequence[Vec2], lift: Mapping[Vec2, Fraction]
) -> RegularSubdivision:
    """Project the lower faces of conv{(a, -lift(a))} to the plane.

    With this sign, a cell collects the exponents that attain
    max <x, a> + lift(a) simultaneously for some x.
    """
    support = [tuple(int(c) for c in a) for a in support]
    if not support:
        raise ValueError("empty support")
    if len(set(support)) != len(support):
        raise ValueError("support has repeated points")
    lifting = {a: Fraction(lift[a]) for a in support}
    den = reduce(lcm, (v.denominator for v in lifting.values()), 1)
    # heights scaled to integers so the orientation tests stay in int arithmetic
    height = {a: -int(v * den) for a, v in lifting.items()}
    dim = affine_dim(support)
    if dim == 0:
        cells, groups = [LatticePolygon((support[0],))], [frozenset(support)]
    elif dim == 1:
        cells, groups = _lower_chain(support, height)
    else:
        cells, groups = _lower_faces(support, height)
    order = sorted(range(len(cells)), key=lambda i: cells[i].vertices)
    return RegularSubdivision(
        tuple(cells[i] for i in order), tuple(groups[i] for i in order), lifting
    )


def _lower_chain(support, height):
    a0 = min(support)
    d = primitive(sub(max(support), a0))
    idx = 0 if d[0] else 1
    param = {a: (a[idx] - a0[idx]) // d[idx] for a in support}
    pts = sorted(support, key=lambda a: param[a])
    chain: list = []
    for a in pts:
        while len(chain) >= 2:
            p, q = chain[-2], chain[-1]
            turn = (param[q] - param[p]) * (height[a] - height[p]) - (height[q] - height[p]) * (
                param[a] - param[p]
            )
            if turn <= 0:
                chain.pop()
            else:
                break
        chain.append(a)
    cells, groups = [], []
    for p, q in zip(chain, chain[1:]):
        on = [
            a
            for a in pts
            if param[p] <= param[a] <= param[q]
            and (param[q] - param[p]) * (height[a] - height[p])
            == (height[q] - height[p]) * (param[a] - param[p])
        ]
        cells.append(convex_hull([p, q]))
        groups.append(frozenset(on))
    return cells, groups


def _above(p, q, r, s, h) -> int:
    """Sign-bearing determinant: positive when s lies above plane(p, q, r).

    Assumes p, q, r are counterclockwise in the plane projection.
    """
    ax, ay, az = q[0] - p[0], q[1] - p[1], h[q] - h[p]
    bx, by, bz = r[0] - p[0], r[1] - p[1], h[r] - h[p]
    cx, cy, cz = s[0] - p[0], s[1] - p[1], h[s] - h[p]
    return ax * (by * cz - bz * cy) - ay * (bx * cz - bz * cx) + az * (bx * cy - by * cx)


def _lower_faces(support, h):
    start = None
    for p, q, r in combinations(support, 3):
        o = orient(p, q, r)
        if o == 0:
            continue
        if o < 0:
            q, r = r, q
        if all(_above(p, q, r, s, h) >= 0 for s in support):
            start = (p, q, r)
            break
    assert start is not None, "a 2-dimensional support always has a lower facet"

    def face_of(p, q, r):
        return frozenset(s for s in support if _above(p, q, r, s, h) == 0)

    seen = {face_of(*start)}
    queue = deque(seen)
    while queue:
        face = queue.popleft()
        for u, v in convex_hull(face).edges():
            beyond = [s for s in support if orient(u, v, s) < 0]
            if not beyond:
                continue
            r = beyond[0]
            for s in beyond[1:]:
                if _above(v, u, r, s, h) < 0:
                    r = s
            nxt = face_of(v, u, r)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    groups = sorted(seen, key=lambda g: sorted(g))
    return [convex_hull(g) for g in groups], groups


def solve_linear(D: Sequence[Sequence], M: Sequence) -> list[Fraction]:
    """Solve D x = M exactly by fraction-free (Bareiss) elimination."""
    n = len(D)
    if any(len(row) != n for row in D) or len(M) != n:
        raise ValueError("solve_linear needs a square system")
    # clear denominators row by row so the elimination runs over the integers
    rows = []
    for row, rhs in zip(D, M):
        entries = [Fraction(v) for v in row] + [Fraction(rhs)]
        m = reduce(lcm, (e.denominator for e in entries), 1)
        rows.append([int(e * m) for e in entries])
    prev = 1
    for k in range(n):
        pivot = next((i for i in range(k, n) if rows[i][k] != 0), None)
        if pivot is None:
            raise SingularMatrix("matrix is singular")
        rows[k], rows[pivot] = rows[pivot], rows[k]
        pk = rows[k][k]
        for i in range(k + 1, n):
            rik = rows[i][k]
            rows[i] = [
                (pk * rows[i][j] - rik * rows[k][j]) // prev if j > k else 0 for j in range(n + 1)
            ]
        prev = pk
    x = [Fraction(0)] * n
    for i in reversed(range(n)):
        acc = Fraction(rows[i][n]) - sum(rows[i][j] * x[j] for j in range(i + 1, n))
        x[i] = acc / rows[i][i]
    return x


def line_intersection(p: Vec2, d: Vec2, q: Vec2, e: Vec2):
    """Parameters (t, s) with p + t d = q + s e, or None for parallel lines."""
    den = cross(d, e)
    if den == 0:
        return None
    w = sub(q, p)
    return Fraction(cross(w, e)) / den, Fraction(cross(w, d)) / den


@dataclass(frozen=True)
class Piece:
    """A closed segment, ray or line: ``base + t * direction`` for t in [lo, hi].

    ``direction`` is a primitive integer vector. ``lo`` is 0 or None (line),
    ``hi`` is a positive rational or None (unbounded forward).
    """

    base: Vec2
    direction: Vec2
    lo: Fraction | None = Fraction(0)
    hi: Fraction | None = None

    @property
    def kind(self) -> str:
        if self.lo is None:
            return "line"
        return "ray" if self.hi is None else "segment"

    def at(self, t) -> Vec2:
        return add(self.base, scale(t, self.direction))

    @property
    def end(self) -> Vec2:
        return self.at(self.hi)

    def param_of(self, p: Vec2) -> Fraction:
        """Parameter of the orthogonal projection of p onto the carrier line."""
        d = self.direction
        return Fraction(dot(sub(p, self.base), d)) / dot(d, d)

    def holds(self, t) -> bool:
        return (self.lo is None or t >= self.lo) and (self.hi is None or t <= self.hi)

    def contains(self, p: Vec2) -> bool:
        if cross(sub(p, self.base), self.direction) != 0:
            return False
        return self.holds(self.param_of(p))

    def interior_point(self) -> Vec2:
        if self.kind == "segment":
            return self.at(self.hi / 2)
        if self.kind == "ray":
            return self.at(1)
        return self.base


def segment_piece(p: Vec2, q: Vec2) -> Piece:
    d = primitive_direction(sub(q, p))
    length = Fraction(dot(sub(q, p), d)) / dot(d, d)
    return Piece(tuple(p), d, Fraction(0), length)


def ray_piece(p: Vec2, d: Vec2) -> Piece:
    return Piece(tuple(p), primitive_direction(d), Fraction(0), None)


def line_piece(p: Vec2, d: Vec2) -> Piece:
    return Piece(tuple(p), primitive_direction(d), None, None)
