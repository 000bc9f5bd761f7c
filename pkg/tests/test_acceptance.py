"""Acceptance run: one PASS/FAIL line per criterion, printed after the test summary.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import random
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

import pytest
from conftest import ACCEPTANCE_LINES
from golden import CONIC_CUBIC_UNION, NONEMPTY_ONE_CELL_IMAGES, ZERO_CELLS
from instances import generic_instances
from invariants import (
    balancing_violations,
    closure_violations,
    contains_some_translate,
    duality_violations,
    emptiness_violations,
    grid_points,
    kapranov_violations,
)
from sympy import Poly
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from tropdisc.classify import (
    Unclassifiable,
    classify_all,
    critical_curve,
    is_super_critical,
    trop_jacobian,
)
from tropdisc.curves import curve_of
from tropdisc.discriminant import CRITICAL, ESSENTIAL, analyze, ray_sw
from tropdisc.fixtures import (
    HEXAGON_LENGTH_MATRIX,
    HEXAGON_LENGTH_RHS,
    HEXAGON_LENGTHS,
    conic_cubic_map,
    hexagon_map,
    parabola_map,
)
from tropdisc.geometry import convex_hull, mixed_volume, solve_linear
from tropdisc.newton import (
    NonIntegralLengths,
    ProbeSelectionFailed,
    mv_rhs,
    newton_polytope_of_discriminant,
    newton_solution,
)
from tropdisc.oracle import (
    eliminate_discriminant_tiny,
    proximity,
    sample_critical_valuations,
    univariate_roots,
)
from tropdisc.overlay import overlay_of

DATA = Path(__file__).resolve().parent / "data"
INSTANCES, INSTANCE_SEED = 200, 7
GRID_POINTS = 1000


def verdict(n: int, ok: bool, detail: str, elapsed: float, budget: float | None) -> bool:
    within = budget is None or elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    timing = f"{elapsed:.3g} s" + ("" if budget is None else f" of {budget:g} s")
    ACCEPTANCE_LINES.append(f"criterion {n}: {status} | {detail} | {timing}")
    return status == "PASS"


def info(text: str) -> None:
    ACCEPTANCE_LINES.append(f"info: {text}")


def best_of(runs: int, fn):
    """Smallest wall time over several runs, and the last result."""
    best, result = float("inf"), None
    for _ in range(runs):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def test_criterion_1_length_system():
    elapsed, ell = best_of(5, lambda: solve_linear(HEXAGON_LENGTH_MATRIX, HEXAGON_LENGTH_RHS))
    residual_free = all(
        sum(a * x for a, x in zip(row, ell)) == b
        for row, b in zip(HEXAGON_LENGTH_MATRIX, HEXAGON_LENGTH_RHS)
    )
    ok = tuple(ell) == HEXAGON_LENGTHS and residual_free
    assert verdict(1, ok, f"lengths {tuple(map(int, ell))}, best of 5", elapsed, 1e-3)


def printed_discriminant_hull():
    text = (DATA / "hexagon_discriminant.txt").read_text()
    transformations = standard_transformations + (
        implicit_multiplication_application,
        convert_xor,
    )
    expr = parse_expr(text, transformations=transformations)
    a, b = sorted(expr.free_symbols, key=str)
    return convex_hull(Poly(expr, a, b).monoms())


def test_criterion_2_end_to_end_polygon():
    start = time.perf_counter()
    polygon = newton_polytope_of_discriminant(hexagon_map())
    elapsed = time.perf_counter() - start
    expected = printed_discriminant_hull().normalized()
    ok = polygon.normalized() == expected
    detail = f"vertices {polygon.normalized().vertices}"
    assert verdict(2, ok, detail, elapsed, 5)


def test_criterion_3_mixed_volumes():
    segment = convex_hull([(0, 0), (1, 1)])
    delta = printed_discriminant_hull()
    ell = HEXAGON_LENGTHS

    def run():
        return (
            mixed_volume(delta, segment),
            ell[3] * 1 + ell[4] * 2 + ell[5] * 1,
            mv_rhs(hexagon_map(), ((0, 0), (1, 1))),
        )

    elapsed, values = best_of(3, run)
    values = tuple(int(v) if v.denominator == 1 else v for v in map(Fraction, values))
    assert verdict(3, values == (16, 16, 16), f"MV, family sum, composed MV = {values}", elapsed, 1)


def test_criterion_4_golden_table():
    start = time.perf_counter()
    result = analyze(conic_cubic_map())
    elapsed = time.perf_counter() - start
    Xi = result.subdivision
    mismatches = []
    for point, label, image in ZERO_CELLS:
        cell = Xi.cell_at(point)
        if result.classes[cell.index].label != label or result.images[cell.index] != image:
            mismatches.append(point)
    ones = {result.images[c.index] for c in Xi.of_dim(1) if not result.images[c.index].is_empty}
    twos = [c for c in Xi.of_dim(2) if not result.images[c.index].is_empty]
    sigma_ok = len(twos) == 1 and result.classes[twos[0].index].label == "2.2.1"
    ok = (
        not mismatches
        and len(Xi.of_dim(0)) == len(ZERO_CELLS)
        and ones == NONEMPTY_ONE_CELL_IMAGES
        and sigma_ok
        and result.plset == CONIC_CUBIC_UNION
    )
    detail = f"{len(ZERO_CELLS)} vertices, {len(ones)} edge images, one bounded 2-cell image"
    assert verdict(4, ok, detail, elapsed, 1)


def test_criterion_5_single_vertex_map():
    def run():
        m = parabola_map()
        result = analyze(m)
        Xi = result.subdivision
        origin = Xi.cell_at((0, 0))
        return (
            result.images[origin.index] == ray_sw((0, 0))
            and sorted(trop_jacobian(m).support) == [(0, 0), (0, 1), (1, 0)]
            and all(is_super_critical(origin, i, Xi, result.classes) for i in (1, 2))
        )

    elapsed, ok = best_of(3, run)
    assert verdict(5, ok, "image, Jacobian support, super-criticality; best of 3", elapsed, 1e-2)


def _line_and_conic_roots(t: float) -> list:
    """Roots of 1 + 2 z1 + z2 = 1 + z1 z2 = 0; the coefficients carry no power of t."""
    # substituting z2 = -1 - 2 z1 into 1 + z1 z2 gives -2 z1^2 - z1 + 1
    roots = ((z, -1 - 2 * z) for z in univariate_roots([-2, -1, 1]))
    return sorted(roots, key=lambda r: r[0].real)


def _valuation(z_t1: complex, z_t2: complex, t1: float, t2: float) -> float:
    return -(math.log(abs(z_t1)) - math.log(abs(z_t2))) / (math.log(t1) - math.log(t2))


def test_criterion_6_unstable_intersection():
    t1, t2 = 1e-3, 1e-4
    start = time.perf_counter()
    at_t1, at_t2 = _line_and_conic_roots(t1), _line_and_conic_roots(t2)
    elapsed = time.perf_counter() - start
    close = all(
        abs(a - x) < 1e-8 and abs(b - y) < 1e-8
        for (a, b), (x, y) in zip(at_t1, [(-1, 1), (0.5, -2)])
    )
    vals = [_valuation(p[k], q[k], t1, t2) for p, q in zip(at_t1, at_t2) for k in (0, 1)]
    flat = max(abs(v) for v in vals) < 0.05
    # with 1 - z1 z2 the same substitution gives 2 z1^2 + z1 + 1 and complex roots
    opposite = univariate_roots([2, 1, 1])
    detail = (
        "1 + 2 z1 + z2 = 1 + z1 z2 = 0 solved to 1e-8, valuations (0, 0); "
        f"with 1 - z1 z2 the roots are {', '.join(f'{z:.4f}' for z in opposite)}"
    )
    assert verdict(6, close and flat, detail, elapsed, None)


def _property_suite(instances, rule):
    rng = random.Random(INSTANCE_SEED)
    counts = Counter()
    labels = Counter()
    for m in instances:
        Xi = overlay_of(m)
        counts["duality"] += bool(duality_violations(Xi))
        C = critical_curve(m)
        curves = [(m.f1, curve_of(m.f1)), (m.f2, curve_of(m.f2)), (C.jacobian, C.curve)]
        counts["balancing"] += any(balancing_violations(T) for _, T in curves)
        points = grid_points(rng, GRID_POINTS)
        counts["kapranov"] += any(kapranov_violations(F, T, points) for F, T in curves)
        try:
            classify_all(Xi)
        except Unclassifiable:
            counts["unclassifiable"] += 1
        bad = emptiness_violations(analyze(m, rule))
        counts["emptiness"] += bool(bad)
        labels.update(label for *_, label in bad)
        try:
            solution = newton_solution(m, m, lateral=rule)
        except (NonIntegralLengths, ProbeSelectionFailed):
            counts["closure"] += 1
            continue
        counts["closure"] += bool(closure_violations(solution.fan, solution.lengths))
    return counts, labels


def _summary(counts, labels) -> str:
    parts = [f"{k} {counts[k]}" for k in ("duality", "balancing", "kapranov", "unclassifiable")]
    parts.append(
        f"emptiness {counts['emptiness']} (failing cells by case {dict(sorted(labels.items()))})"
    )
    parts.append(f"closure {counts['closure']}")
    return "instances failing: " + ", ".join(parts)


@pytest.fixture(scope="module")
def instances():
    return generic_instances(INSTANCES, seed=INSTANCE_SEED)


@pytest.mark.xfail(
    strict=True,
    reason="image emptiness does not track the critical curve on half-line cells; "
    "the essential lateral rule also misses lateral cells and leaves length systems unsolvable",
)
def test_criterion_7_property_suite(instances):
    start = time.perf_counter()
    counts, labels = _property_suite(instances, ESSENTIAL)
    elapsed = time.perf_counter() - start
    ok = not any(counts.values())
    assert verdict(7, ok, f"{INSTANCES} instances; " + _summary(counts, labels), elapsed, 120)


def test_criterion_7_under_the_critical_rule(instances):
    start = time.perf_counter()
    counts, labels = _property_suite(instances, CRITICAL)
    info(f"criterion 7 with the critical lateral rule: {_summary(counts, labels)}")
    info(f"critical-rule suite took {time.perf_counter() - start:.3g} s")
    # everything except emptiness on half-line cells holds under this rule
    assert all(v == 0 for k, v in counts.items() if k != "emptiness")
    assert set(labels) <= {"1.3.2.1", "1.3.2.2"}


def test_criterion_8_oracle_proximity():
    start = time.perf_counter()
    results = {}
    for name, fixture in (("conic-cubic", conic_cubic_map), ("parabola", parabola_map)):
        m = fixture()
        cloud = sample_critical_valuations(m, (1e-3, 1e-4))
        results[name] = proximity(cloud, analyze(m).plset)
    elapsed = time.perf_counter() - start
    ok = all(fraction >= 0.95 and count > 0 for fraction, count in results.values())
    detail = ", ".join(f"{k}: {f:.3f} of {c} points" for k, (f, c) in results.items())
    assert verdict(8, ok, detail, elapsed, 30)


def test_criterion_9_oracle_containment():
    start = time.perf_counter()
    elimination = eliminate_discriminant_tiny(parabola_map())
    pipeline = newton_polytope_of_discriminant(parabola_map())
    ok = contains_some_translate(elimination.newton_polygon(), pipeline)
    elapsed = time.perf_counter() - start
    detail = f"elimination {elimination.newton_polygon().vertices} ⊇ pipeline {pipeline.vertices}"
    assert verdict(9, ok, detail, elapsed, 5)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
