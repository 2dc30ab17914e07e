"""Face colorings of trivalent weaves, chromatic oracles, local moves and the
chain-level algebra of sheaves across Lagrangian handles."""

from .chromatic import IntPolynomial, chromatic_poly
from .coloring import ColoringProblem, count_colorings, framed_count
from .surface_map import CombMap, build_named, face_adjacency, parse, serialize
from .weave_moves import build_lambda, insert_bigon, insert_triangle

__version__ = "0.1.0"

__all__ = [
    "CombMap", "ColoringProblem", "IntPolynomial", "build_lambda", "build_named",
    "chromatic_poly", "count_colorings", "face_adjacency", "framed_count", "insert_bigon",
    "insert_triangle", "parse", "serialize",
]
