"""Small reference maps used by the tests, the acceptance run and the docs."""

from __future__ import annotations

from fractions import Fraction

from .curves import SupportedMap, TropPoly


def _poly(terms) -> TropPoly:
    """Build from (exponent, valuation, real lead) triples."""
    terms = list(terms)
    return TropPoly.from_pairs(
        [(e, Fraction(v)) for e, v, _ in terms], [(Fraction(c), 0) for _, _, c in terms]
    )


def conic_cubic_map() -> SupportedMap:
    """A quadric and a cubic with generic valuations; 8 rays in the discriminant."""
    f1 = _poly(
        [
            ((1, 0), 0, 1),
            ((2, 0), "-1/2", -3),
            ((0, 1), 0, 4),
            ((1, 1), 0, -5),
            ((0, 2), -2, 6),
        ]
    )
    f2 = _poly(
        [
            ((1, 0), -1, -7),
            ((2, 0), "-21/5", 8),
            ((3, 0), -8, -9),
            ((0, 1), -3, 10),
            ((1, 1), "-3/2", -11),
            ((2, 1), -6, 12),
            ((0, 2), -4, -13),
            ((1, 2), -5, 14),
            ((0, 3), -9, -15),
        ]
    )
    return SupportedMap(f1, f2)


def parabola_map() -> SupportedMap:
    """(z1 + z2, z2 + z1 z2): the critical values form a parabola."""
    return SupportedMap(
        _poly([((1, 0), 0, 1), ((0, 1), 0, 1)]),
        _poly([((0, 1), 0, 1), ((1, 1), 0, 1)]),
    )


def hexagon_map() -> SupportedMap:
    """(v + v^2 + uv + uv^2 + u^2v^2, 2v + 3u^2v + 4u^2v^2) with trivial valuations.

    Its discriminant polynomial has a hexagonal Newton polygon.
    """
    return SupportedMap(
        _poly([((0, 1), 0, 1), ((0, 2), 0, 1), ((1, 1), 0, 1), ((1, 2), 0, 1), ((2, 2), 0, 1)]),
        _poly([((0, 1), 0, 2), ((2, 1), 0, 3), ((2, 2), 0, 4)]),
    )


# Edge-length system of the hexagon map: rows are far lines, columns edge families.
HEXAGON_LENGTH_MATRIX = (
    (1, 2, 3, 1, 0, 0),
    (3, 2, 1, 0, 0, 0),
    (5, 3, 1, 0, 0, 0),
    (1, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 2, 3),
    (0, 0, 0, 1, 2, 1),
)
HEXAGON_LENGTH_RHS = (22, 16, 24, 7, 22, 16)
HEXAGON_LENGTHS = (1, 6, 1, 6, 2, 6)
