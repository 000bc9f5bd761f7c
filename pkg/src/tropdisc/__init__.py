"""Tropical discriminants of planar polynomial maps and their Newton polygons."""

from .curves import SupportedMap, TropMonomial, TropPoly
from .discriminant import PLSet, analyze, trop_discriminant
from .newton import newton_polytope_of_discriminant

__all__ = [
    "PLSet",
    "SupportedMap",
    "TropMonomial",
    "TropPoly",
    "analyze",
    "newton_polytope_of_discriminant",
    "trop_discriminant",
]
