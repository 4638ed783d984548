"""Dirichlet-Neumann operator G(f)g below the graph y = f(x).

G(f)g = d/dx (1/4pi) int ln(cosh(f(x)-f(x')) - cos(x-x')) theta(x') dx'
with theta = (1/2 I - K*[f])^{-1} g'. Writing the logarithm as
ln(2 sin^2((x-x')/2)) plus the continuous smooth-log integrand turns the first
part into 1/2 H(theta), so only a continuous kernel is integrated numerically.
"""

import logging
from typing import Optional

import numpy as np

from muskat.core.errors import NumericalError
from muskat.models.grid import GridFunction
from muskat.models.operator import DnoResult
from muskat.numerics import bie, kernels, spectral

logger = logging.getLogger(__name__)

SHIFT_TOL = 1e-8
CONSTANT_TOL = 1e-12


def _finite(values: np.ndarray, stage: str) -> np.ndarray:
    if not np.isfinite(values).all():
        raise NumericalError(
            "non-finite intermediate in the Dirichlet-Neumann operator",
            stage=stage,
            first_index=int(np.argmin(np.isfinite(values))),
        )
    return values


def apply_dno(
    f: GridFunction, g: GridFunction, tol: Optional[float] = None
) -> DnoResult:
    grid = f.grid
    solution = bie.solve_theta(f, spectral.dft_derivative(g), tol)
    theta = solution.theta

    surface = kernels.surface_samples(f)
    smooth = kernels.smooth_log_matrix(surface) @ theta.values
    smooth = _finite(smooth * (grid.spacing / kernels.FOUR_PI), "smooth-log")

    outer = spectral.dft_derivative(GridFunction(grid, smooth)).values
    singular = spectral.hilbert_transform(theta).values
    gf = _finite(outer + 0.5 * singular, "derivative")

    pairing = grid.spacing * float(np.dot(g.values, gf))
    return DnoResult(gf=GridFunction(grid, gf), theta_used=solution, pairing=pairing)


def dno_flat(g: GridFunction) -> GridFunction:
    """G(0)g = |D|g"""
    return spectral.abs_derivative(g)


def dno_vertical_shift_invariance(
    f: GridFunction, g: GridFunction, c: float, tol: float = SHIFT_TOL
) -> bool:
    """Check G(f + c)(g + c) = G(f)g to `tol` in the max norm"""
    shifted = apply_dno(f + c, g + c).gf
    reference = apply_dno(f, g).gf
    defect = float(np.abs(shifted.values - reference.values).max())
    if defect > tol:
        logger.warning("vertical shift defect %.3e exceeds %.1e (c=%g)", defect, tol, c)
        return False
    return True


def velocity_bound_ratio(
    f: GridFunction, g: GridFunction, gf: Optional[GridFunction] = None
) -> float:
    """||G(f)g||_2 / ((1 + Lip f)^2 ||g'||_2); 0 when g is constant"""
    spacing = f.grid.spacing
    slope_norm = bie.grid_norm(spectral.dft_derivative(g).values, spacing)
    if slope_norm <= CONSTANT_TOL * max(1.0, g.max_abs()):
        return 0.0
    if gf is None:
        gf = apply_dno(f, g).gf
    lip = float(np.abs(np.diff(f.values, append=f.values[0])).max()) / spacing
    return bie.grid_norm(gf.values, spacing) / ((1.0 + lip) ** 2 * slope_norm)
