"""Independent checks: the unit-disk Dirichlet-Neumann formula, the Poisson
kernel gradient and interior evaluation of the double layer potential."""

import logging
import math
import warnings
from typing import Iterable, List, Optional

import numpy as np

from muskat.core.errors import InvalidInputError, NearBoundaryWarning
from muskat.models.grid import FieldPoint, GridFunction
from muskat.numerics import bie, kernels, spectral

logger = logging.getLogger(__name__)

INTERIOR_MARGIN = 1e-6
NEAR_BOUNDARY_CELLS = 5
SMOOTHNESS_RATIO = 1.8
SPECTRAL_TAIL_TOL = 1e-10
POISSON_POINTS_PER_WIDTH = 40
POISSON_MAX_POINTS = 2**17


def _second_difference(g: GridFunction, index: Optional[int], x: float, h: float) -> float:
    if index is not None:
        step = round(h / g.grid.spacing)
        v = g.values
        n = g.grid.n_points
        return float(v[(index + step) % n] + v[(index - step) % n] - 2.0 * v[index])
    plus, minus, center = spectral.interpolate(g, np.array([x + h, x - h, x]))
    return float(plus + minus - 2.0 * center)


def _spectral_tail(g: GridFunction) -> float:
    """Largest coefficient in the top quarter of the spectrum, relative to the largest"""
    coeffs = np.abs(np.fft.rfft(g.values - g.values.mean()))
    peak = coeffs.max()
    if peak == 0.0:
        return 0.0
    return float(coeffs[3 * coeffs.size // 4 :].max() / peak)


def _check_smoothness(g: GridFunction, index: Optional[int], x: float) -> None:
    """Refuse data whose second differences blow up at x.

    Resolved high modes also grow the h-to-2h ratio, so the local test only
    counts when the top of the spectrum is populated.
    """
    h = g.grid.spacing
    q1 = abs(_second_difference(g, index, x, h)) / h**2
    q2 = abs(_second_difference(g, index, x, 2.0 * h)) / (2.0 * h) ** 2
    if q1 < SMOOTHNESS_RATIO * q2 or q1 <= 1.0 + 10.0 * g.max_abs():
        return
    tail = _spectral_tail(g)
    if tail > SPECTRAL_TAIL_TOL:
        raise InvalidInputError(
            "second differences diverge at x; data is not C^{1,alpha} there",
            x=x,
            q_h=q1,
            q_2h=q2,
            spectral_tail=tail,
        )


def disk_dno(g: GridFunction, x: float) -> float:
    """Normal derivative on the unit circle of the harmonic extension of g.

    Uses -(1/8pi) int [g(x+t) + g(x-t) - 2g(x)] / sin^2(t/2) dt with the
    removable value 4 g''(x) at t = 0, on the trapezoid nodes t_j = j*spacing.
    """
    grid = g.grid
    n = grid.n_points
    index = grid.node_index(x)
    _check_smoothness(g, index, x)

    offsets = grid.spacing * np.arange(1, n)
    if index is not None:
        shifts = np.arange(1, n)
        plus = g.values[(index + shifts) % n]
        minus = g.values[(index - shifts) % n]
        center = g.values[index]
        curvature = spectral.dft_derivative(g, order=2).values[index]
    else:
        plus = spectral.interpolate(g, x + offsets)
        minus = spectral.interpolate(g, x - offsets)
        center = float(spectral.interpolate(g, x))
        curvature = float(spectral.interpolate(spectral.dft_derivative(g, order=2), x))

    integrand = (plus + minus - 2.0 * center) / np.sin(0.5 * offsets) ** 2
    total = 4.0 * curvature + float(integrand.sum())
    return -grid.spacing * total / (8.0 * math.pi)


def _poisson_points(n: int, r: float) -> int:
    target = max(n, math.ceil(POISSON_POINTS_PER_WIDTH / (1.0 - r)))
    return min(1 << (target - 1).bit_length(), POISSON_MAX_POINTS)


def poisson_radial_derivative(g: GridFunction, r: float, x: float) -> float:
    """r d/dr of the Poisson extension of g at r e^{ix}, for 0 < r < 1"""
    if not 0.0 < r < 1.0:
        raise InvalidInputError("radius must lie in (0, 1)", r=r)
    fine = spectral.resample(g, _poisson_points(g.grid.n_points, r))
    center = float(spectral.interpolate(g, x))
    phase = x - fine.grid.nodes
    # D = |1 - r e^{i phase}|^2 without cancellation near phase = 0
    distance = (1.0 - r) ** 2 + 4.0 * r * np.sin(0.5 * phase) ** 2
    kernel = 2.0 * r * ((1.0 + r * r) * np.cos(phase) - 2.0 * r) / distance**2
    # the kernel integrates to zero, so subtracting g(x) costs nothing
    total = float(np.dot(kernel, fine.values - center))
    return fine.grid.spacing * total / (2.0 * math.pi)


def _boundary_distance(f: GridFunction, p: FieldPoint) -> float:
    dx = np.abs(np.remainder(p.x - f.grid.nodes + math.pi, 2.0 * math.pi) - math.pi)
    return float(np.sqrt(dx**2 + (p.y - f.values) ** 2).min())


def harmonic_eval(
    f: GridFunction, Theta: GridFunction, p: FieldPoint, refine: int = 1
) -> float:
    """Double layer potential with density Theta at an interior point.

    phi(x, y) = (1/4pi) int [sin(x-x') f'(x') - sinh(y-f(x'))]
                / [cosh(y-f(x')) - cos(x-x')] Theta(x') dx'

    `refine` > 1 evaluates the quadrature on the spectral interpolants of f
    and Theta sampled `refine` times more finely.
    """
    if refine < 1 or refine & (refine - 1):
        raise InvalidInputError("refine must be a power of two", refine=refine)
    surface_height = float(spectral.interpolate(f, p.x))
    if not p.y < surface_height - INTERIOR_MARGIN:
        raise InvalidInputError(
            "field point is not strictly below the interface",
            x=p.x,
            y=p.y,
            surface=surface_height,
        )
    if _boundary_distance(f, p) < NEAR_BOUNDARY_CELLS * f.grid.spacing:
        warnings.warn(
            f"field point ({p.x:.4g}, {p.y:.4g}) is within {NEAR_BOUNDARY_CELLS} cells "
            "of the interface; quadrature accuracy is reduced",
            NearBoundaryWarning,
            stacklevel=2,
        )

    if refine > 1:
        n = f.grid.n_points * refine
        f = spectral.resample(f, n)
        Theta = spectral.resample(Theta, n)
    slope = spectral.dft_derivative(f).values
    h = p.x - f.grid.nodes
    d = p.y - f.values
    ratio = kernels.hyperbolic_ratio(-1.0, np.sin(h) * slope, d, h)
    return f.grid.spacing * float(np.dot(ratio, Theta.values)) / kernels.FOUR_PI


def harmonic_field(
    f: GridFunction, g: GridFunction, points: Iterable[FieldPoint], refine: int = 1
) -> List[float]:
    """Harmonic extension of boundary data g into the region below f"""
    Theta = bie.solve_Theta(f, g)
    return [harmonic_eval(f, Theta, p, refine) for p in points]
