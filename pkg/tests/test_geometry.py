from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from instances import lattice_points

from tropdisc.fixtures import HEXAGON_LENGTH_MATRIX, HEXAGON_LENGTH_RHS, HEXAGON_LENGTHS
from tropdisc.geometry import (
    Fan,
    LatticePolygon,
    SingularMatrix,
    angle_key,
    area,
    convex_hull,
    lattice_length,
    line_intersection,
    line_piece,
    lower_hull_subdivision,
    minkowski_sum,
    mixed_volume,
    primitive,
    primitive_direction,
    ray_piece,
    segment_piece,
    solve_linear,
)

SQUARE = LatticePolygon(((0, 0), (1, 0), (1, 1), (0, 1)))


def test_hull_of_singleton_is_a_point():
    P = convex_hull([(0, 0)])
    assert P.vertices == ((0, 0),) and P.dim == 0


def test_hull_of_quintic_support():
    P = convex_hull([(0, 1), (0, 2), (1, 1), (1, 2), (2, 2)])
    assert set(P.vertices) == {(0, 1), (1, 1), (2, 2), (0, 2)}
    assert area(P) > 0  # counterclockwise


def test_hull_of_collinear_points_is_a_segment():
    P = convex_hull([(0, 0), (1, 1), (2, 2)])
    assert set(P.vertices) == {(0, 0), (2, 2)} and P.dim == 1


def test_minkowski_sum_examples():
    assert set(minkowski_sum(SQUARE, LatticePolygon(((3, 5),))).vertices) == {
        (3, 5),
        (4, 5),
        (4, 6),
        (3, 6),
    }
    diag = LatticePolygon(((0, 0), (1, 1)))
    assert set(minkowski_sum(diag, diag).vertices) == {(0, 0), (2, 2)}


def test_area_examples():
    assert area(SQUARE) == 1
    assert area(convex_hull([(0, 0), (1, 0), (0, 1)])) == Fraction(1, 2)
    assert area(LatticePolygon(((4, 4),))) == 0


def test_mixed_volume_examples():
    assert mixed_volume(SQUARE, SQUARE) == 2
    assert mixed_volume(SQUARE, LatticePolygon(((7, -2),))) == 0


@pytest.mark.parametrize("p, q, n", [((0, 0), (3, 6), 3), ((0, 0), (1, 1), 1), ((2, 2), (2, 2), 0)])
def test_lattice_length(p, q, n):
    assert lattice_length(p, q) == n


@pytest.mark.parametrize("v, w", [((4, 6), (2, 3)), ((0, -5), (0, -1)), ((-2, 0), (-1, 0))])
def test_primitive(v, w):
    assert primitive(v) == w


def test_primitive_rejects_zero():
    with pytest.raises(ValueError):
        primitive((0, 0))


def test_primitive_direction_of_rational_vector():
    assert primitive_direction((Fraction(1, 2), Fraction(-3, 4))) == (2, -3)


def test_flat_lift_on_a_line_gives_one_cell():
    sd = lower_hull_subdivision([(0, 0), (1, 0), (2, 0)], {(0, 0): 0, (1, 0): 0, (2, 0): 0})
    assert [c.vertices for c in sd.cells] == [((0, 0), (2, 0))]
    assert sd.cell_points[0] == frozenset({(0, 0), (1, 0), (2, 0)})


def test_tent_lift_on_a_line_gives_two_cells():
    sd = lower_hull_subdivision([(0, 0), (1, 0), (2, 0)], {(0, 0): 0, (1, 0): 1, (2, 0): 0})
    assert sorted(set(c.vertices) for c in sd.cells) == [{(0, 0), (1, 0)}, {(1, 0), (2, 0)}]


def test_quadric_triangulation():
    lift = {(1, 0): 0, (2, 0): Fraction(-1, 2), (0, 1): 0, (1, 1): 0, (0, 2): -2}
    sd = lower_hull_subdivision(list(lift), lift)
    triangles = {frozenset(c.vertices) for c in sd.cells if c.dim == 2}
    assert triangles == {
        frozenset({(1, 0), (0, 1), (1, 1)}),
        frozenset({(1, 0), (2, 0), (1, 1)}),
        frozenset({(0, 1), (1, 1), (0, 2)}),
    }


def test_solve_linear_examples():
    assert solve_linear([[1, 0], [0, 1]], [3, 4]) == [3, 4]
    assert tuple(solve_linear(HEXAGON_LENGTH_MATRIX, HEXAGON_LENGTH_RHS)) == HEXAGON_LENGTHS
    with pytest.raises(SingularMatrix):
        solve_linear([[1, 1], [1, 1]], [1, 2])


def test_fan_rejects_clockwise_order():
    with pytest.raises(ValueError):
        Fan(((0, 1), (1, 0)))
    assert Fan(((1, 0), (0, 1), (-1, 0))).rays[2] == (-1, 0)


def test_pieces_and_intersection():
    s = segment_piece((0, 0), (4, 2))
    assert s.kind == "segment" and s.direction == (2, 1) and s.end == (4, 2)
    assert s.contains((2, 1)) and not s.contains((6, 3))
    assert ray_piece((1, 1), (0, -3)).contains((1, -100))
    assert line_piece((0, 0), (1, 1)).contains((-5, -5))
    assert line_intersection((0, 0), (1, 0), (2, -1), (0, 1)) == (2, 1)
    assert line_intersection((0, 0), (1, 0), (0, 1), (2, 0)) is None


polygons = st.lists(lattice_points, min_size=1, max_size=7).map(convex_hull)


@given(polygons, polygons)
def test_area_of_sum_splits_into_mixed_volume(P, Q):
    assert area(minkowski_sum(P, Q)) == area(P) + area(Q) + mixed_volume(P, Q)


@given(polygons, polygons, lattice_points)
def test_mixed_volume_symmetric_and_translation_invariant(P, Q, v):
    assert mixed_volume(P, Q) == mixed_volume(Q, P) == mixed_volume(P.translate(v), Q)
    assert mixed_volume(P, LatticePolygon((v,))) == 0


@given(st.lists(lattice_points, min_size=1, max_size=10), st.randoms(use_true_random=False))
def test_hull_idempotent_and_order_free(pts, rnd):
    P = convex_hull(pts)
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    assert convex_hull(shuffled) == P == convex_hull(P.vertices)


@given(
    st.lists(lattice_points, min_size=3, max_size=8, unique=True),
    st.lists(st.fractions(-5, 5, max_denominator=4), min_size=8, max_size=8),
)
def test_subdivision_tiles_the_hull(support, heights):
    sd = lower_hull_subdivision(support, dict(zip(support, heights)))
    hull = convex_hull(support)
    if hull.dim < 2:
        return
    cells = [c for c in sd.cells if c.dim == 2]
    assert all(hull.contains(v) for c in cells for v in c.vertices)
    assert sum(area(c) for c in cells) == area(hull)
    for c in cells:
        centroid = tuple(sum(Fraction(v[k]) for v in c.vertices) / len(c.vertices) for k in (0, 1))
        owners = [d for d in cells if d.contains(centroid) and not d.on_boundary(centroid)]
        assert owners == [c]


@given(
    st.integers(1, 4).flatmap(
        lambda n: st.tuples(
            st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n),
            st.lists(st.fractions(-9, 9, max_denominator=5), min_size=n, max_size=n),
        )
    )
)
def test_solve_linear_recovers_x(system):
    D, x = system
    M = [sum(Fraction(d) * xi for d, xi in zip(row, x)) for row in D]
    try:
        assert solve_linear(D, M) == x
    except SingularMatrix:
        pass


def test_angle_key_orders_counterclockwise_from_east():
    vs = [(0, -1), (-1, 0), (1, 1), (1, 0), (-1, -1), (0, 1)]
    assert sorted(vs, key=angle_key) == [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)]
