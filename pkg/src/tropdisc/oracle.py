"""Independent checks: exact elimination for tiny maps and numeric valuation sampling."""

from __future__ import annotations

import cmath
import math
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curves import SupportedMap
from .discriminant import PLSet
from .geometry import convex_hull, cross

NVARS = 4
Z1, Z2, W1, W2 = range(NVARS)
VAR_NAMES = ("z1", "z2", "w1", "w2")


class ZeroPolynomial(ValueError):
    pass


class GuardExceeded(RuntimeError):
    pass


class IllConditioned(ArithmeticError):
    pass


class EmptySet(ValueError):
    pass


def _unit(var: int, power: int = 1) -> tuple:
    e = [0] * NVARS
    e[var] = power
    return tuple(e)


class MultiPoly:
    """Sparse polynomial in z1, z2, w1, w2; coefficients are Fractions or complex numbers."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {tuple(e): c for e, c in (terms or {}).items() if c != 0}

    @classmethod
    def constant(cls, c) -> MultiPoly:
        return cls({(0,) * NVARS: c})

    @classmethod
    def var(cls, v: int) -> MultiPoly:
        return cls({_unit(v): Fraction(1)})

    @classmethod
    def from_terms(cls, pairs: Iterable) -> MultiPoly:
        """Build from ``((e1, e2), coeff)`` pairs in z1, z2."""
        out: dict = {}
        for e, c in pairs:
            key = (int(e[0]), int(e[1]), 0, 0)
            out[key] = out.get(key, 0) + c
        return cls(out)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            mono = "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(VAR_NAMES, e) if k)
            parts.append(f"({self.terms[e]})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: MultiPoly) -> MultiPoly:
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(out)

    def __neg__(self) -> MultiPoly:
        return MultiPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: MultiPoly) -> MultiPoly:
        return self + (-other)

    def __mul__(self, other: MultiPoly) -> MultiPoly:
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(out)

    def __pow__(self, k: int) -> MultiPoly:
        out = MultiPoly.constant(Fraction(1))
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c) -> MultiPoly:
        return MultiPoly({e: c * v for e, v in self.terms.items()})

    def degree(self, var: int) -> int:
        return max((e[var] for e in self.terms), default=-1)

    def coefficients(self, var: int) -> list[MultiPoly]:
        """Coefficients as polynomials in the other variables, lowest power first."""
        out = [dict() for _ in range(self.degree(var) + 1)]
        for e, c in self.terms.items():
            rest = list(e)
            rest[var] = 0
            out[e[var]][tuple(rest)] = c
        return [MultiPoly(d) for d in out]

    def derivative(self, var: int) -> MultiPoly:
        out = {}
        for e, c in self.terms.items():
            if e[var]:
                d = list(e)
                d[var] -= 1
                out[tuple(d)] = c * e[var]
        return MultiPoly(out)

    def support(self, variables: Sequence[int]) -> list[tuple]:
        return sorted({tuple(e[v] for v in variables) for e in self.terms})

    def evaluate(self, values: Sequence):
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, k in zip(values, e):
                if k:
                    term = term * v**k
            total += term
        return total

    def leading(self) -> tuple:
        e = max(self.terms)
        return e, self.terms[e]

    def exact_div(self, other: MultiPoly) -> MultiPoly:
        """Quotient of an exact division; raises ArithmeticError when a remainder appears."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        le, lc = other.leading()
        rem = MultiPoly(dict(self.terms))
        quot: dict = {}
        while not rem.is_zero():
            e, c = rem.leading()
            shift = tuple(a - b for a, b in zip(e, le))
            if min(shift) < 0:
                raise ArithmeticError("division is not exact")
            q = c / lc
            quot[shift] = q
            rem = rem - other * MultiPoly({shift: q})
        return MultiPoly(quot)


def jacobian_determinant(f1: MultiPoly, f2: MultiPoly) -> MultiPoly:
    return f1.derivative(Z1) * f2.derivative(Z2) - f1.derivative(Z2) * f2.derivative(Z1)


def _bareiss_det(M: list) -> MultiPoly:
    n = len(M)
    M = [row[:] for row in M]
    sign = 1
    prev = MultiPoly.constant(Fraction(1))
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if swap is None:
                return MultiPoly()
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]).exact_div(prev)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign > 0 else -det


def sylvester_matrix(p: MultiPoly, q: MultiPoly, var: int) -> list:
    P, Q = p.coefficients(var), q.coefficients(var)
    m, n = len(P) - 1, len(Q) - 1
    size = m + n
    zero = MultiPoly()
    rows = []
    for i in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(P)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(Q)):
            row[i + k] = c
        rows.append(row)
    return rows


def sylvester_resultant(p: MultiPoly, q: MultiPoly, var: int, guard: int = 64) -> MultiPoly:
    if p.is_zero() or q.is_zero():
        raise ZeroPolynomial("resultant of a zero polynomial")
    m, n = p.degree(var), q.degree(var)
    if m < 1 or n < 1:
        raise ValueError(f"both polynomials need positive degree in {VAR_NAMES[var]}")
    if m + n > guard:
        raise GuardExceeded(f"Sylvester matrix of size {m + n} exceeds {guard}")
    return _bareiss_det(sylvester_matrix(p, q, var))


def _resultant_or_power(p: MultiPoly, q: MultiPoly, var: int, guard: int) -> MultiPoly:
    """Resultant, extended to the case where one side is constant in var."""
    m, n = p.degree(var), q.degree(var)
    if m == 0:
        return p**n
    if n == 0:
        return q**m
    return sylvester_resultant(p, q, var, guard)


@dataclass(frozen=True)
class Elimination:
    """A polynomial in w1, w2 vanishing on the critical values, or a degeneracy note."""

    poly: MultiPoly
    minimal: bool = False
    note: str = ""

    @property
    def degenerate(self) -> bool:
        return self.poly.is_zero() or self.poly.degree(W1) + self.poly.degree(W2) <= 0

    def newton_polygon(self):
        if self.degenerate:
            raise ValueError("no Newton polygon for a degenerate elimination: " + self.note)
        return convex_hull(self.poly.support((W1, W2)))


def explicit_map(m: SupportedMap) -> tuple[MultiPoly, MultiPoly]:
    """The rational-coefficient map whose coefficients are the leads (real parts only)."""
    if not m.has_leads:
        raise ValueError("an explicit map needs a lead on every monomial")
    out = []
    for P in (m.f1, m.f2):
        if any(t.lead[1] != 0 for t in P.monomials):
            raise ValueError("exact elimination needs rational leads")
        out.append(MultiPoly.from_terms((t.exponent, t.lead[0]) for t in P.monomials))
    return out[0], out[1]


def eliminate_discriminant_tiny(f, guard: int = 64) -> Elimination:
    """Iterated resultants eliminating z from f - w and the Jacobian."""
    f1, f2 = explicit_map(f) if isinstance(f, SupportedMap) else f
    J = jacobian_determinant(f1, f2)
    if J.degree(Z1) <= 0 and J.degree(Z2) <= 0:
        return Elimination(MultiPoly(), note="the Jacobian has no zeros")
    g1 = f1 - MultiPoly.var(W1)
    g2 = f2 - MultiPoly.var(W2)
    if J.degree(Z2) >= 1:
        R1 = _resultant_or_power(g1, J, Z2, guard)
        R2 = _resultant_or_power(g2, J, Z2, guard)
        last = Z1
    else:
        R1 = _resultant_or_power(g1, J, Z1, guard)
        R2 = _resultant_or_power(g2, J, Z1, guard)
        last = Z2
    if R1.degree(last) < 1 or R2.degree(last) < 1:
        return Elimination(MultiPoly(), note="a partial resultant is free of the last variable")
    R = sylvester_resultant(R1, R2, last, guard)
    if R.is_zero():
        return Elimination(R, note="the partial resultants share a factor")
    return Elimination(R, note="iterated resultants may carry extraneous factors")


# numeric root finding


def _tropical_initial_guesses(coeffs: np.ndarray) -> np.ndarray:
    """Starting points on circles whose radii come from the upper hull of log|c_k|."""
    n = len(coeffs) - 1
    logs = np.array([math.log(abs(c)) if c != 0 else -np.inf for c in coeffs])
    pts = [(k, logs[k]) for k in range(n + 1) if np.isfinite(logs[k])]
    hull: list = []
    for p in pts:
        while (
            len(hull) >= 2
            and cross(
                (hull[-1][0] - hull[-2][0], hull[-1][1] - hull[-2][1]),
                (p[0] - hull[-2][0], p[1] - hull[-2][1]),
            )
            >= 0
        ):
            hull.pop()
        hull.append(p)
    guesses = []
    for (k0, l0), (k1, l1) in zip(hull, hull[1:]):
        radius = math.exp(-(l1 - l0) / (k1 - k0))
        cnt = k1 - k0
        for j in range(cnt):
            angle = 2 * math.pi * j / cnt + 0.4 + 0.1 * k0
            guesses.append(radius * cmath.exp(1j * angle))
    zeros_at_origin = int(hull[0][0]) if hull else 0
    return np.array([0j] * zeros_at_origin + guesses, dtype=complex)


def _horner_with_derivative(coeffs: np.ndarray, z: np.ndarray):
    """coeffs lowest degree first."""
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for c in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


@dataclass(frozen=True)
class RootReport:
    roots: list
    max_residual: float


def _aberth(low_first: np.ndarray, max_iter: int = 500) -> np.ndarray:
    """Aberth-Ehrlich iteration; coefficients lowest degree first, leading one nonzero."""
    z = _tropical_initial_guesses(low_first)
    fixed = z == 0
    for _ in range(max_iter):
        p, dp = _horner_with_derivative(low_first, z)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1)
            inv = 1 / diff
            np.fill_diagonal(inv, 0)
            w = ratio / (1 - ratio * inv.sum(axis=1))
        w = np.where(fixed | ~np.isfinite(w), 0, w)
        z = z - w
        if np.all(np.abs(w) <= 1e-15 * (1 + np.abs(z))):
            break
    return z


def univariate_roots_report(coeffs: Sequence, tol: float = 1e-8) -> RootReport:
    """All roots, coefficients highest degree first.

    Coefficients are scaled to unit maximum; each root r must then satisfy
    |p(r)| <= tol * (1 + |r|)^deg.
    """
    c = np.array(coeffs, dtype=complex)
    if len(c) < 2:
        raise ValueError("degree must be at least one")
    if abs(c[0]) <= 1e-12 * max(1.0, float(np.max(np.abs(c)))):
        raise ValueError("leading coefficient is numerically zero")
    low_first = c[::-1] / np.max(np.abs(c))
    z = _aberth(low_first)
    res, _ = _horner_with_derivative(low_first, z)
    rel = np.abs(res) / (1 + np.abs(z)) ** (len(c) - 1)
    worst = float(np.max(rel))
    if not np.all(np.isfinite(z)) or worst > tol:
        raise IllConditioned(f"residual {worst:.3g} exceeds {tol:g}")
    return RootReport([complex(x) for x in z], worst)


def _scaled_roots(coeffs: list, tol: float = 1e-9) -> list[complex]:
    """Roots of a polynomial with wildly varying coefficient sizes, checked by backward error."""
    low_first = np.array(coeffs[::-1], dtype=complex)
    z = _aberth(low_first)
    with np.errstate(over="ignore", invalid="ignore"):
        res, _ = _horner_with_derivative(low_first, z)
        size, _ = _horner_with_derivative(np.abs(low_first), np.abs(z))
        backward = np.abs(res) / size
    backward = np.where(z == 0, 0, backward)
    if not np.all(np.isfinite(z)) or not np.all(backward <= tol):
        raise IllConditioned("root backward error too large")
    return [complex(x) for x in z]


def univariate_roots(coeffs: Sequence, tol: float = 1e-8) -> list[complex]:
    return univariate_roots_report(coeffs, tol).roots


# valuation sampling


@dataclass(frozen=True)
class ValuationCloud:
    points: tuple  # ((x, y), confidence)
    dropped: int = 0
    sources: tuple = ()  # scaled log-coordinates of the critical point behind each point, at t1

    def confident(self, threshold: float = 0.5) -> list:
        return [p for p, c in self.points if c > threshold]


def _numeric_map(m: SupportedMap, t: float):
    """Coefficients lead * t^(-val) for each polynomial, keyed by exponent."""
    out = []
    for P in (m.f1, m.f2):
        out.append(
            {
                mono.exponent: complex(float(mono.lead[0]), float(mono.lead[1]))
                * t ** (-float(mono.valuation))
                for mono in P.monomials
            }
        )
    return out


def _jacobian_terms(F1: dict, F2: dict) -> dict:
    out: dict = {}
    for a, ca in F1.items():
        for b, cb in F2.items():
            d = a[0] * b[1] - a[1] * b[0]
            if d:
                e = (a[0] + b[0] - 1, a[1] + b[1] - 1)
                out[e] = out.get(e, 0) + ca * cb * d
    return out


def _eval(terms: dict, z: tuple) -> complex:
    return sum(c * z[0] ** e[0] * z[1] ** e[1] for e, c in terms.items())


def _critical_points(J: dict, fixed_var: int, value: complex) -> list:
    """Solve J = 0 with one coordinate fixed."""
    free = 1 - fixed_var
    deg = max(e[free] for e in J)
    coeffs = [0j] * (deg + 1)
    for e, c in J.items():
        coeffs[deg - e[free]] += c * value ** e[fixed_var]
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) < 2:
        return []
    roots = _scaled_roots(coeffs)
    out = []
    for r in roots:
        if r == 0:
            continue
        out.append((value, r) if fixed_var == 0 else (r, value))
    return out


def _log_coords(z: tuple, t: float) -> tuple:
    return tuple(-math.log(abs(c)) / math.log(t) for c in z)


def _sweep_values(m: SupportedMap, sweep: int, span: float | None, rng: random.Random):
    vals = [abs(float(x)) for P in (m.f1, m.f2) for x in P.valuations.values()]
    span = span if span is not None else max(vals, default=0) + 4
    xs = np.linspace(-span, span, sweep)
    return [(float(x), rng.uniform(0, 2 * math.pi)) for x in xs]


def sample_critical_valuations(
    m: SupportedMap,
    t_values: Sequence[float] = (1e-3, 1e-4),
    sweep: int = 200,
    seed: int = 0,
    span: float | None = None,
) -> ValuationCloud:
    """Estimate Val(f(z)) for critical points z traced over a grid of one coordinate.

    The grid point x with random phase theta fixes z_i = exp(i theta) t^(-x); the
    other coordinate solves J = 0. Roots for two values of t are paired by their
    log-coordinates and the valuation of f(z) is the slope of log|w| against log t.
    A third t (the geometric mean when only two are given) measures agreement.
    """
    if not m.has_leads:
        raise ValueError("sampling needs a lead on every monomial")
    if len(t_values) < 2:
        raise ValueError("at least two t values are needed")
    t1, t2 = t_values[0], t_values[1]
    t3 = t_values[2] if len(t_values) > 2 else math.sqrt(t1 * t2)
    ts = (t1, t2, t3)
    maps = [_numeric_map(m, t) for t in ts]
    jacs = [_jacobian_terms(F1, F2) for F1, F2 in maps]
    if not jacs[0]:
        return ValuationCloud(())
    rng = random.Random(seed)
    grid = _sweep_values(m, sweep, span, rng)
    points, dropped = [], 0
    for fixed_var in (0, 1):
        if max(e[1 - fixed_var] for e in jacs[0]) == 0:
            continue
        for x, theta in grid:
            phase = cmath.exp(1j * theta)
            per_t = []
            try:
                for t, J in zip(ts, jacs):
                    per_t.append(_critical_points(J, fixed_var, phase * t ** (-x)))
            except (IllConditioned, OverflowError, ZeroDivisionError):
                dropped += 1
                continue
            points.extend(_pair_and_estimate(per_t, ts, maps))
    return ValuationCloud(tuple(p for p, _ in points), dropped, tuple(s for _, s in points))


def _pair_and_estimate(per_t: list, ts: tuple, maps: list) -> list:
    out = []
    logs = [[_log_coords(z, t) for z in zs] for zs, t in zip(per_t, ts)]
    for i, z1 in enumerate(per_t[0]):
        matches = []
        for k in (1, 2):
            if not logs[k]:
                return out
            dists = sorted((math.dist(logs[0][i], q), j) for j, q in enumerate(logs[k]))
            best = dists[0]
            second = dists[1][0] if len(dists) > 1 else math.inf
            matches.append((per_t[k][best[1]], best[0], second))
        try:
            ws = [
                [_eval(F, z) for F in maps[k]]
                for k, z in ((0, z1), (1, matches[0][0]), (2, matches[1][0]))
            ]
        except OverflowError:
            continue
        if any(w == 0 or not cmath.isfinite(w) for row in ws for w in row):
            continue
        lt = [math.log(t) for t in ts]
        est12 = [
            -(math.log(abs(ws[0][c])) - math.log(abs(ws[1][c]))) / (lt[0] - lt[1]) for c in (0, 1)
        ]
        est13 = [
            -(math.log(abs(ws[0][c])) - math.log(abs(ws[2][c]))) / (lt[0] - lt[2]) for c in (0, 1)
        ]
        disagreement = max(abs(a - b) for a, b in zip(est12, est13))
        ambiguity = max(d / s if s > 0 else 1.0 for _, d, s in matches)
        confidence = 1.0 / (1.0 + 10 * disagreement) * (1.0 - min(ambiguity, 0.99) / 2)
        out.append((((est12[0], est12[1]), confidence), logs[0][i]))
    return out


def distance_to_plset(p: Sequence[float], S: PLSet) -> float:
    if S.is_empty:
        raise EmptySet("distance to an empty set")
    px, py = float(p[0]), float(p[1])
    best = math.inf
    for q in S.points:
        best = min(best, math.hypot(px - float(q[0]), py - float(q[1])))
    for a, b in S.segments:
        best = min(best, _segment_distance(px, py, a, b, bounded=True))
    for base, d in S.rays:
        end = (base[0] + d[0], base[1] + d[1])
        best = min(best, _segment_distance(px, py, base, end, bounded=False))
    return best


def _segment_distance(px, py, a, b, bounded: bool) -> float:
    ax, ay, bx, by = float(a[0]), float(a[1]), float(b[0]), float(b[1])
    dx, dy = bx - ax, by - ay
    s = ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy)
    s = max(0.0, min(1.0, s) if bounded else s)
    return math.hypot(px - ax - s * dx, py - ay - s * dy)


def proximity(
    cloud: ValuationCloud, S: PLSet, radius: float = 0.15, threshold: float = 0.5
) -> tuple:
    """Fraction of confident cloud points within radius of S, and the confident count."""
    pts = cloud.confident(threshold)
    if not pts:
        return 1.0, 0
    near = sum(distance_to_plset(p, S) <= radius for p in pts)
    return near / len(pts), len(pts)
