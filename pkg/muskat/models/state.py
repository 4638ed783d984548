from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from muskat.core.errors import InvalidInputError
from muskat.models.grid import GridFunction, PeriodicGrid
from muskat.schemas.diagnostics import DiagnosticsRecord
from muskat.schemas.simulation import SimConfig


@dataclass(frozen=True, eq=False)
class InterfaceState:
    f: GridFunction
    time: float
    kappa: float
    epsilon: float

    def __post_init__(self):
        # kappa = 0 is admitted so pure diffusion can be stepped
        if not self.kappa >= 0.0:
            raise InvalidInputError("kappa must be nonnegative", kappa=self.kappa)
        if not self.epsilon >= 0.0:
            raise InvalidInputError("epsilon must be nonnegative", epsilon=self.epsilon)
        if not np.isfinite(self.time):
            raise InvalidInputError("time must be finite", time=self.time)

    @property
    def grid(self) -> PeriodicGrid:
        return self.f.grid


@dataclass(eq=False)
class Trajectory:
    config: SimConfig
    grid: PeriodicGrid
    dt: float
    mollifier_width: float
    times: List[float] = field(default_factory=list)
    snapshots: List[np.ndarray] = field(default_factory=list)
    records: List[DiagnosticsRecord] = field(default_factory=list)
    failed: bool = False
    failure: Optional[str] = None

    def append(self, state: InterfaceState, record: DiagnosticsRecord) -> None:
        if self.times and state.time <= self.times[-1]:
            raise InvalidInputError(
                "snapshot times must increase", last=self.times[-1], new=state.time
            )
        self.times.append(float(state.time))
        self.snapshots.append(np.array(state.f.values))
        self.records.append(record)

    def snapshot(self, index: int) -> GridFunction:
        return GridFunction(self.grid, self.snapshots[index])

    @property
    def final(self) -> GridFunction:
        return self.snapshot(-1)

    def as_array(self) -> np.ndarray:
        if not self.snapshots:
            return np.empty((0, self.grid.n_points))
        return np.vstack(self.snapshots)


@dataclass(eq=False)
class ComparisonReport:
    """Ordering and contraction defects between two matched trajectories"""

    times: np.ndarray
    differences: np.ndarray
    ordered: bool
    ordering_defects: np.ndarray
    contraction_defects: np.ndarray
    contraction_monotone_defect: float
    tol: float

    @property
    def passed(self) -> bool:
        worst_order = float(np.abs(self.ordering_defects).max()) if self.ordered else 0.0
        return (
            worst_order <= self.tol
            and float(self.contraction_defects.max()) <= self.tol
            and self.contraction_monotone_defect <= self.tol
        )
