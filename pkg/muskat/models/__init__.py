from muskat.models.grid import FieldPoint, GridFunction, PeriodicGrid, SurfaceSamples
from muskat.models.operator import (
    DensitySolution,
    DnoResult,
    KernelMatrix,
    KernelSample,
    OperatorTag,
)
from muskat.models.state import ComparisonReport, InterfaceState, Trajectory

__all__ = [
    "ComparisonReport",
    "DensitySolution",
    "DnoResult",
    "FieldPoint",
    "GridFunction",
    "InterfaceState",
    "KernelMatrix",
    "KernelSample",
    "OperatorTag",
    "PeriodicGrid",
    "SurfaceSamples",
    "Trajectory",
]
