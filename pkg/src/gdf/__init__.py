"""Fiber trees, graph divisors, cylinder isomorphism and moduli of GDF surfaces."""
from .cylinders import cylinders_isomorphic_over_B, cylinders_isomorphic_fiberwise
from .divisors import BaseCurve, GraphDivisor, type_divisor
from .trees import RootedTree, tree_type

__all__ = [
    "BaseCurve",
    "GraphDivisor",
    "RootedTree",
    "cylinders_isomorphic_fiberwise",
    "cylinders_isomorphic_over_B",
    "tree_type",
    "type_divisor",
]
