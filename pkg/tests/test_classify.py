import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from instances import generic_instances, is_usable, random_map

from tropdisc.classify import (
    DIAGONAL,
    IRRELEVANT,
    LATERAL,
    EmptyJacobian,
    NotAdjacent,
    NotLateral,
    WrongDimension,
    case_of,
    classify_2cell,
    classify_all,
    critical_curve,
    essential_directions,
    is_essential,
    is_super_critical,
    relevance,
    scaled_valuations,
    trop_jacobian,
)
from tropdisc.curves import SupportedMap, TropMonomial, TropPoly
from tropdisc.fixtures import conic_cubic_map, parabola_map
from tropdisc.overlay import overlay_of

Q = Fraction


def _map(f1, f2):
    return SupportedMap(TropPoly.from_pairs(f1), TropPoly.from_pairs(f2))


def _by_duals(Xi, a, b):
    (cell,) = [c for c in Xi.of_dim(2) if c.sig1 == {a} and c.sig2 == {b}]
    return cell


def test_relevance_of_dual_pairs():
    A1, A2 = [(1, 0), (0, 1)], [(0, 1), (1, 1)]
    assert relevance((0, 1), (0, 1), A1, A2) == LATERAL
    assert relevance((1, 0), (1, 1), A1, A2) == IRRELEVANT
    assert relevance((1, 1), (2, 2), [(1, 1), (2, 0)], [(2, 2), (0, 2)]) == DIAGONAL


def test_parabola_map_two_cells():
    Xi = overlay_of(parabola_map())
    assert classify_2cell(_by_duals(Xi, (0, 1), (0, 1)), Xi).relevance == LATERAL
    assert classify_2cell(_by_duals(Xi, (1, 0), (1, 1)), Xi).relevance == IRRELEVANT


def test_conic_cubic_has_one_bounded_diagonal_cell():
    Xi = overlay_of(conic_cubic_map())
    classes = classify_all(Xi)
    diagonal = [c for c in Xi.of_dim(2) if classes[c.index].relevance == DIAGONAL]
    assert len(diagonal) == 1 and diagonal[0].bounded


def test_classify_2cell_rejects_lower_cells():
    Xi = overlay_of(parabola_map())
    with pytest.raises(WrongDimension):
        classify_2cell(Xi.of_dim(0)[0], Xi)


@pytest.mark.parametrize(
    "u, v, expected",
    [
        ((1, -1), (1, 1), True),
        ((1, 0), (0, 1), False),
        ((1, -2), (1, 1), True),
        ((2, 0), (0, 3), False),
    ],
)
def test_essential_directions(u, v, expected):
    assert essential_directions(u, v) is expected


def test_is_essential_preconditions():
    Xi = overlay_of(parabola_map())
    lateral = _by_duals(Xi, (0, 1), (0, 1))
    irrelevant = _by_duals(Xi, (1, 0), (1, 1))
    bounding = list(Xi.edges_of(lateral))
    # dual segments of direction (1,-1) and (1,0) against (0,1): unimodular
    assert len(bounding) == 2
    assert not any(is_essential(g, lateral, Xi) for g in bounding)
    far = [g for g in Xi.of_dim(1) if g not in bounding]
    with pytest.raises(NotAdjacent):
        is_essential(far[0], lateral, Xi)
    with pytest.raises(NotLateral):
        is_essential(Xi.edges_of(irrelevant)[0], irrelevant, Xi)
    with pytest.raises(WrongDimension):
        is_essential(lateral, lateral, Xi)


def test_jacobian_of_parabola_map():
    J = trop_jacobian(parabola_map())
    assert sorted(J.support) == [(0, 0), (0, 1), (1, 0)]
    assert set(J.valuations.values()) == {0}
    C = critical_curve(parabola_map()).curve
    assert list(C.vertices) == [(0, 0)]
    assert sorted(e.piece.direction for e in C.edges) == [(-1, 0), (0, -1), (1, 1)]


def test_identity_map_has_empty_critical_curve():
    m = _map([((1, 0), 0)], [((0, 1), 0)])
    assert trop_jacobian(m).support == [(0, 0)]
    assert critical_curve(m).is_empty


def test_parallel_exponents_give_empty_jacobian():
    with pytest.raises(EmptyJacobian):
        trop_jacobian(_map([((1, 1), 0)], [((1, 1), 0)]))


def test_jacobian_keeps_largest_valuation_per_exponent():
    # (1,0)+(1,1) and (2,0)+(0,1) both land on (1,0)
    m = _map([((1, 0), 3), ((2, 0), -1)], [((1, 1), 2), ((0, 1), 7)])
    assert trop_jacobian(m).valuations[(1, 0)] == 6


def test_super_critical_cells():
    Xi = overlay_of(parabola_map())
    classes = classify_all(Xi)
    origin = Xi.cell_at((0, 0))
    assert classes[origin.index].label == "0.1.2"
    assert is_super_critical(origin, 1, Xi, classes)
    assert is_super_critical(origin, 2, Xi, classes)

    Xi = overlay_of(conic_cubic_map())
    classes = classify_all(Xi)
    lam = Xi.cell_at((Q(-3, 2), Q(1, 2)))
    assert classes[lam.index].label == "0.2.1"
    assert is_super_critical(lam, 2, Xi, classes)
    assert not is_super_critical(lam, 1, Xi, classes)
    plain = [c for c in Xi.of_dim(1) if classes[c.index].label == "1.1"]
    assert plain and not any(is_super_critical(c, i, Xi, classes) for c in plain for i in (1, 2))
    with pytest.raises(WrongDimension):
        is_super_critical(Xi.of_dim(2)[0], 1, Xi, classes)


def test_conic_cubic_case_labels():
    Xi = overlay_of(conic_cubic_map())
    classes = classify_all(Xi)
    mu = case_of(Xi.cell_at((Q(-1, 2), Q(2))), Xi, classes)
    assert mu.label == "0.1.1" and len(mu.curves) == 1
    beta_lambda = Xi.cell_at((Q(-3, 4), Q(1, 2)))
    assert case_of(beta_lambda, Xi).label == "1.1"
    assert any(classes[c.index].label == "2.1" for c in Xi.of_dim(2))


def test_conic_cubic_label_census():
    classes = classify_all(overlay_of(conic_cubic_map()))
    zero = sorted(c.label for c in classes.values() if c.label.startswith("0."))
    assert zero.count("0.1.2") == 4  # beta, gamma, delta, eta
    assert zero.count("0.1.1") == 1  # mu


def _translated(m: SupportedMap, v) -> SupportedMap:
    def move(P):
        return TropPoly(
            tuple(
                TropMonomial(t.exponent, t.valuation - t.exponent[0] * v[0] - t.exponent[1] * v[1])
                for t in P.monomials
            )
        )

    return SupportedMap(move(m.f1), move(m.f2))


def _labels_by_signature(m):
    Xi = overlay_of(m)
    classes = classify_all(Xi)
    return {c.signature: classes[c.index].label for c in Xi.cells}


def _usable(seed):
    rng = random.Random(seed)
    while True:
        m = random_map(rng)
        if is_usable(m):
            return m


@settings(max_examples=30, deadline=None)
@given(
    st.integers(0, 10**6),
    st.fractions(-5, 5, max_denominator=7),
    st.fractions(-5, 5, max_denominator=7),
)
def test_labels_survive_translation(seed, vx, vy):
    m = _usable(seed)
    assert _labels_by_signature(m) == _labels_by_signature(_translated(m, (vx, vy)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.fractions(Q(1, 5), 5, max_denominator=7))
def test_labels_survive_scaling(seed, factor):
    m = _usable(seed)
    assert _labels_by_signature(m) == _labels_by_signature(scaled_valuations(m, factor))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_jacobian_support_bound(seed):
    m = random_map(random.Random(seed))
    sums = {
        (a[0] + b[0] - 1, a[1] + b[1] - 1)
        for a in m.f1.support
        for b in m.f2.support
        if a[0] * b[1] != a[1] * b[0]
    }
    try:
        J = trop_jacobian(m)
    except EmptyJacobian:
        assert not sums
        return
    assert set(J.support) == sums
    assert all(e[0] >= 0 and e[1] >= 0 for e in J.support)


def test_every_generic_instance_is_classified():
    for m in generic_instances(60, seed=11):
        Xi = overlay_of(m)
        classes = classify_all(Xi)
        assert set(classes) == {c.index for c in Xi.cells}
        for c in Xi.of_dim(1):
            kinds = {classes[s.index].relevance for s in Xi.adjacent_2cells(c)}
            if IRRELEVANT not in kinds:
                # both neighbours relevant: same kind on both sides
                assert len(kinds) == 1
            if classes[c.index].label.startswith("1.3"):
                assert IRRELEVANT not in kinds
