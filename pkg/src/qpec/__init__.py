"""Iterative decoding and density evolution for the q-ary partial erasure channel."""

from .channel import QpecParams, capacity
from .errors import NumericalFailure, QpecError, ValidationError
from .gf import FieldSpec, make_field
from .ldpc import DegreeDistribution, TannerGraph, sample_graph
from .symbol_sets import SymbolSet

__all__ = [
    "DegreeDistribution",
    "FieldSpec",
    "NumericalFailure",
    "QpecError",
    "QpecParams",
    "SymbolSet",
    "TannerGraph",
    "ValidationError",
    "capacity",
    "make_field",
    "sample_graph",
]

__version__ = "0.1.0"
