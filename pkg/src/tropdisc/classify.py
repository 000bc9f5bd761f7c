"""Relevance of 2-cells, essential edges, the case tree for lower cells,
and the generic tropical critical curve."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import SupportedMap, TropCurve, TropMonomial, TropPoly, corner_locus
from .geometry import add, cross, primitive, sub
from .overlay import Cell, PlaneSubdivision


class WrongDimension(ValueError):
    pass


class NotAdjacent(ValueError):
    pass


class NotLateral(ValueError):
    pass


class Unclassifiable(ValueError):
    """No case applies; the input is not generic enough."""


class NotDominant(ValueError):
    pass


class EmptyJacobian(NotDominant):
    """Every exponent pair is parallel, so the Jacobian vanishes identically."""


IRRELEVANT, DIAGONAL, LATERAL = "irrelevant", "diagonal", "lateral"


@dataclass(frozen=True)
class CellClass:
    """Case label of a cell.

    ``curves`` names the curve(s) carrying a 0- or 1-cell; for an edge-edge
    crossing labelled 0.1.1 it names the sides whose half-line is produced.
    ``rays`` is the set of curve indices whose half-line (west for 1, south
    for 2) leaves F(cell); it is empty outside the half-line cases.
    """

    label: str
    relevance: str | None = None
    curves: tuple = ()
    rays: frozenset = frozenset()
    zeta: int | None = None  # endpoint used by cases 1.3.2.*
    gammas: tuple = ()


def _supports(Xi: PlaneSubdivision) -> tuple[list, list]:
    return Xi.T1.poly.support, Xi.T2.poly.support


def relevance(a, b, A1, A2) -> str:
    """Relevance of a 2-cell whose duals are the points a and b."""
    if cross(a, b) != 0:
        return IRRELEVANT
    sides = {(cross(a, c) > 0) - (cross(a, c) < 0) for c in list(A1) + list(A2)}
    return LATERAL if not ({1, -1} <= sides) else DIAGONAL


def classify_2cell(xi: Cell, Xi: PlaneSubdivision) -> CellClass:
    if xi.dim != 2:
        raise WrongDimension(f"cell {xi.index} has dimension {xi.dim}")
    (a,), (b,) = xi.sig1, xi.sig2
    rel = relevance(a, b, *_supports(Xi))
    label = {IRRELEVANT: "2.1", DIAGONAL: "2.2.1", LATERAL: "2.2.2"}[rel]
    return CellClass(label, rel)


def _segment_direction(cell: Cell):
    p, q = cell.delta.vertices
    return primitive(sub(q, p))


def essential_directions(v_gamma, v_xi) -> bool:
    """|det| >= 2 between the primitive directions of two dual segments."""
    return abs(cross(primitive(v_gamma), primitive(v_xi))) >= 2


def is_essential(gamma: Cell, xi: Cell, Xi: PlaneSubdivision) -> bool:
    """|det(v_gamma, v_xi)| >= 2 for a 1-cell bounding a lateral 2-cell."""
    if gamma.dim != 1 or xi.dim != 2:
        raise WrongDimension("is_essential takes a 1-cell and a 2-cell")
    if not (xi.sig1 <= gamma.sig1 and xi.sig2 <= gamma.sig2):
        raise NotAdjacent(f"cell {gamma.index} does not bound cell {xi.index}")
    if classify_2cell(xi, Xi).relevance != LATERAL:
        raise NotLateral(f"cell {xi.index} is not lateral")
    (a,), (b,) = xi.sig1, xi.sig2
    return essential_directions(_segment_direction(gamma), add(a, b))


def _carrier(c: Cell) -> int:
    """Which curve a 1-cell lies on, for generic overlays."""
    on1, on2 = len(c.sig1) > 1, len(c.sig2) > 1
    if on1 == on2:
        raise Unclassifiable(f"1-cell {c.index} lies on {'both' if on1 else 'neither'} curve")
    return 1 if on1 else 2


def _classify_0cell(z: Cell, Xi: PlaneSubdivision, rel: dict) -> CellClass:
    n1, n2 = len(z.sig1), len(z.sig2)
    around = Xi.adjacent_2cells(z)
    if n1 == 2 and n2 == 2:
        sides = []
        for i, sig in ((1, z.sig1), (2, z.sig2)):
            for s in sig:
                same_side = [c for c in around if (c.sig1 if i == 1 else c.sig2) == {s}]
                if sum(rel[c.index] != IRRELEVANT for c in same_side) >= 2:
                    sides.append(i)
                    break
        if sides:
            return CellClass("0.1.1", curves=tuple(sides), rays=frozenset(sides))
        return CellClass("0.1.2", curves=(1, 2), rays=frozenset({1, 2}))
    if {n1, n2} == {1, 3}:
        i = 1 if n1 == 3 else 2
        relevant = sum(rel[c.index] != IRRELEVANT for c in around)
        if relevant <= 1:
            return CellClass("0.2.1", curves=(i,), rays=frozenset({i}))
        return CellClass("0.2.2", curves=(i,))
    raise Unclassifiable(f"0-cell {z.index} has argmax sizes {n1}, {n2}")


def _classify_1cell(xi: Cell, Xi: PlaneSubdivision, rel: dict, zero_classes: dict) -> CellClass:
    i = _carrier(xi)
    sides = Xi.adjacent_2cells(xi)
    if len(sides) != 2:
        raise Unclassifiable(f"1-cell {xi.index} borders {len(sides)} 2-cells")
    kinds = sorted(rel[c.index] for c in sides)
    relevant = [k != IRRELEVANT for k in kinds]
    if not any(relevant):
        return CellClass("1.1", curves=(i,))
    if not all(relevant):
        return CellClass("1.2", curves=(i,))
    if kinds == [DIAGONAL, DIAGONAL]:
        return CellClass("1.3.1", curves=(i,), rays=frozenset({i}))
    if kinds != [LATERAL, LATERAL]:
        raise Unclassifiable(f"1-cell {xi.index} separates a lateral and a diagonal cell")
    ends = Xi.endpoints(xi)
    if len(ends) != 1:
        raise Unclassifiable(f"1-cell {xi.index} between lateral cells has {len(ends)} endpoints")
    zeta = ends[0]
    gammas = []
    for sigma in sides:
        others = [
            g
            for g in Xi.edges_of(sigma)
            if g.index != xi.index and zeta.index in Xi.boundary[g.index]
        ]
        if len(others) != 1:
            raise Unclassifiable(f"no unique companion edge at cell {zeta.index}")
        gammas.append(others[0])
    if all(is_essential(g, s, Xi) for g, s in zip(gammas, sides)):
        return CellClass(
            "1.3.2.1",
            curves=(i,),
            rays=frozenset({i}),
            zeta=zeta.index,
            gammas=tuple(g.index for g in gammas),
        )
    return CellClass(
        "1.3.2.2",
        curves=(i,),
        rays=zero_classes[zeta.index].rays,
        zeta=zeta.index,
        gammas=tuple(g.index for g in gammas),
    )


def classify_all(Xi: PlaneSubdivision) -> dict[int, CellClass]:
    """Case labels for every cell, keyed by cell index."""
    out: dict[int, CellClass] = {}
    for c in Xi.of_dim(2):
        out[c.index] = classify_2cell(c, Xi)
    rel = {k: v.relevance for k, v in out.items()}
    for c in Xi.of_dim(0):
        out[c.index] = _classify_0cell(c, Xi, rel)
    for c in Xi.of_dim(1):
        out[c.index] = _classify_1cell(c, Xi, rel, out)
    return out


def case_of(xi: Cell, Xi: PlaneSubdivision, classes: dict | None = None) -> CellClass:
    classes = classes if classes is not None else classify_all(Xi)
    return classes[xi.index]


def is_super_critical(xi: Cell, curve_index: int, Xi: PlaneSubdivision, classes: dict) -> bool:
    """True when the image of xi contains the half-line of the given curve."""
    if xi.dim > 1:
        raise WrongDimension("only 0- and 1-cells can be super-critical")
    return curve_index in classes[xi.index].rays


def trop_jacobian(m: SupportedMap) -> TropPoly:
    """Tropicalization of the Jacobian determinant for generic coefficients."""
    best: dict = {}
    for ma in m.f1.monomials:
        for mb in m.f2.monomials:
            a, b = ma.exponent, mb.exponent
            if cross(a, b) == 0:
                continue
            e = (a[0] + b[0] - 1, a[1] + b[1] - 1)
            v = ma.valuation + mb.valuation
            if e not in best or v > best[e]:
                best[e] = v
    if not best:
        raise EmptyJacobian("all exponent pairs are parallel; the map is not dominant")
    return TropPoly(tuple(TropMonomial(e, v) for e, v in best.items()))


@dataclass(frozen=True)
class CriticalCurve:
    curve: TropCurve
    jacobian: TropPoly

    @property
    def is_empty(self) -> bool:
        return self.curve.is_empty


def critical_curve(m: SupportedMap) -> CriticalCurve:
    J = trop_jacobian(m)
    return CriticalCurve(corner_locus(J)[0], J)


def scaled_valuations(m: SupportedMap, factor: Fraction) -> SupportedMap:
    """Multiply every valuation by a positive rational."""

    def scale_poly(P: TropPoly) -> TropPoly:
        return TropPoly(
            tuple(TropMonomial(t.exponent, t.valuation * factor, t.lead) for t in P.monomials)
        )

    return SupportedMap(scale_poly(m.f1), scale_poly(m.f2))
