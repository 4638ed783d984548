import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from muskat.core.errors import InvalidInputError

MIN_POINTS = 8


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform sampling x_j = -pi + j*spacing of the torus [-pi, pi)"""

    n_points: int

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise InvalidInputError("n_points must be an integer", n_points=n)
        if n < MIN_POINTS or n & (n - 1):
            raise InvalidInputError(
                f"n_points must be a power of two >= {MIN_POINTS}", n_points=n
            )
        object.__setattr__(self, "n_points", int(n))

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.n_points

    @property
    def nodes(self) -> np.ndarray:
        return -math.pi + self.spacing * np.arange(self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Nonnegative integer wavenumbers 0..N/2 matching numpy.fft.rfft"""
        return np.arange(self.n_points // 2 + 1, dtype=float)

    def node_index(self, x: float) -> Optional[int]:
        """Index of the node at x (mod 2pi), or None when x is off-grid"""
        position = (x + math.pi) / self.spacing
        index = round(position)
        if abs(position - index) > 1e-9:
            return None
        return index % self.n_points


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise InvalidInputError(
                "sample count does not match the grid",
                expected=self.grid.n_points,
                got=values.shape,
            )
        finite = np.isfinite(values)
        if not finite.all():
            raise InvalidInputError(
                "non-finite samples", first_index=int(np.argmin(finite))
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(
        cls, grid: PeriodicGrid, func: Callable[[np.ndarray], np.ndarray]
    ) -> "GridFunction":
        return cls(grid, np.broadcast_to(func(grid.nodes), (grid.n_points,)))

    @classmethod
    def constant(cls, grid: PeriodicGrid, value: float) -> "GridFunction":
        return cls(grid, np.full(grid.n_points, float(value)))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.grid, values)

    def mean(self) -> float:
        return float(self.values.mean())

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    def shift(self, s: int) -> "GridFunction":
        """shift(u, s)(x_j) = u(x_{j-s})"""
        return self.with_values(np.roll(self.values, s))

    def _other(self, other) -> Union[np.ndarray, float]:
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise InvalidInputError(
                    "grid mismatch",
                    left=self.grid.n_points,
                    right=other.grid.n_points,
                )
            return other.values
        return float(other)

    def __add__(self, other) -> "GridFunction":
        return self.with_values(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other) -> "GridFunction":
        return self.with_values(self.values - self._other(other))

    def __rsub__(self, other) -> "GridFunction":
        return self.with_values(self._other(other) - self.values)

    def __mul__(self, other) -> "GridFunction":
        return self.with_values(self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return self.with_values(-self.values)

    def __len__(self) -> int:
        return self.grid.n_points


@dataclass(frozen=True, eq=False)
class SurfaceSamples:
    """Interface samples with spectral first and second derivatives"""

    grid: PeriodicGrid
    values: np.ndarray
    slope: np.ndarray
    curvature: np.ndarray


@dataclass(frozen=True)
class FieldPoint:
    x: float
    y: float
