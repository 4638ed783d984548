import enum
from dataclasses import dataclass

import numpy as np

from muskat.models.grid import GridFunction, PeriodicGrid


class OperatorTag(str, enum.Enum):
    KSTAR = "kstar"
    K = "k"


@dataclass(frozen=True)
class KernelSample:
    value: float
    is_diagonal: bool


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Nystrom matrix: entries already carry the trapezoid weight"""

    entries: np.ndarray
    grid: PeriodicGrid
    operator_tag: OperatorTag

    @property
    def quadrature_weight(self) -> float:
        return self.grid.spacing

    def apply(self, density: np.ndarray) -> np.ndarray:
        return self.entries @ density


@dataclass(frozen=True, eq=False)
class DensitySolution:
    theta: GridFunction
    residual_norm: float
    sigma_min_estimate: float
    iterations: int


@dataclass(frozen=True, eq=False)
class DnoResult:
    gf: GridFunction
    theta_used: DensitySolution
    pairing: float
