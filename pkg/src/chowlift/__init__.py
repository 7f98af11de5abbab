"""Lifting projector decompositions of split motives across coefficient rings."""

from .errors import ChowLiftError
from .intmat import Matrix
from .lifting import DecompositionSpec, LiftReport, lift_integral
from .motive import RationalStructure, SplitMotiveSpace, TateShape
from .shapes import Block, PrimeCatalog, ShapePartition, enumerate_admissible

__all__ = [
    "Block",
    "ChowLiftError",
    "DecompositionSpec",
    "LiftReport",
    "Matrix",
    "PrimeCatalog",
    "RationalStructure",
    "ShapePartition",
    "SplitMotiveSpace",
    "TateShape",
    "enumerate_admissible",
    "lift_integral",
]
