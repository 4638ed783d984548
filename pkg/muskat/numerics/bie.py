"""Nystrom assembly of K[f], K*[f] and the second-kind solves.

(1/2 I - K*) theta = rhs is solved on the mean-zero subspace: with P the
mean-removing projector and Q = I - P, the bordered operator P M P + Q acts as
M on mean-zero densities and as the identity on constants. Residuals are
measured for the projected equation. (1/2 I + K) Theta = g is solved on the
full space.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import lu_factor, lu_solve, null_space, svdvals
from scipy.sparse.linalg import LinearOperator, gmres

from muskat.config import settings
from muskat.core.errors import InvalidInputError, NumericalError, SolverStallError
from muskat.models.grid import GridFunction, SurfaceSamples
from muskat.models.operator import DensitySolution, KernelMatrix, OperatorTag
from muskat.numerics import kernels

logger = logging.getLogger(__name__)

RHS_MEAN_TOL = 1e-10
SIGMA_ITERATIONS = 8


def grid_norm(values: np.ndarray, spacing: float) -> float:
    return math.sqrt(spacing * float(np.dot(values, values)))


def assemble(
    f: GridFunction, tag: OperatorTag, surface: Optional[SurfaceSamples] = None
) -> KernelMatrix:
    if surface is None:
        surface = kernels.surface_samples(f)
    values = kernels.kernel_matrix(surface, tag)
    bad = ~np.isfinite(values)
    if bad.any():
        row, column = (int(i) for i in np.argwhere(bad)[0])
        raise NumericalError(
            "non-finite kernel value",
            stage="assembly",
            operator=tag.value,
            row=row,
            column=column,
        )
    return KernelMatrix(values * f.grid.spacing, f.grid, tag)


def _bordered(operator: np.ndarray) -> np.ndarray:
    n = operator.shape[0]
    projected = (
        operator
        - operator.mean(axis=1, keepdims=True)
        - operator.mean(axis=0, keepdims=True)
        + operator.mean()
    )
    return projected + 1.0 / n


def _estimate_sigma_min(factors, n: int) -> float:
    """Inverse iteration on Mp^T Mp started in the mean-zero subspace"""
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n)
    v -= v.mean()
    v /= np.linalg.norm(v)
    growth = 1.0
    for _ in range(SIGMA_ITERATIONS):
        w = lu_solve(factors, lu_solve(factors, v), trans=1)
        w -= w.mean()
        growth = float(np.linalg.norm(w))
        if growth == 0.0:
            break
        v = w / growth
    return 1.0 / math.sqrt(growth) if growth > 0.0 else math.inf


def _gmres(
    matvec, b: np.ndarray, atol: float
) -> Tuple[np.ndarray, int]:
    n = b.size
    history = []
    operator = LinearOperator((n, n), matvec=matvec, dtype=float)
    solution, info = gmres(
        operator,
        b,
        rtol=0.0,
        atol=atol,
        restart=settings.GMRES_MAX_ITER,
        maxiter=1,
        callback=history.append,
        callback_type="pr_norm",
    )
    if info != 0:
        best = float(min(history)) if history else float(np.linalg.norm(b))
        raise SolverStallError(
            "GMRES did not reach the tolerance",
            best_residual=best,
            iterations=len(history),
        )
    return solution, len(history)


def _check_pair(f: GridFunction, data: GridFunction) -> None:
    if f.grid != data.grid:
        raise InvalidInputError(
            "interface and data live on different grids",
            interface=f.grid.n_points,
            data=data.grid.n_points,
        )


def _tolerance(tol: Optional[float], b: np.ndarray, spacing: float) -> float:
    tol = settings.SOLVER_TOL if tol is None else tol
    return tol * max(1.0, grid_norm(b, spacing))


def solve_theta(
    f: GridFunction, rhs: GridFunction, tol: Optional[float] = None
) -> DensitySolution:
    """theta = (1/2 I - K*[f])^{-1} rhs on mean-zero densities"""
    _check_pair(f, rhs)
    if abs(rhs.mean()) > RHS_MEAN_TOL:
        raise InvalidInputError(
            "right-hand side must have zero mean", mean=rhs.mean()
        )
    grid = f.grid
    n = grid.n_points
    b = rhs.values - rhs.mean()
    threshold = _tolerance(tol, b, grid.spacing)
    operator = 0.5 * np.eye(n) - assemble(f, OperatorTag.KSTAR).entries

    if n <= settings.DENSE_SOLVE_MAX_N:
        factors = lu_factor(_bordered(operator))
        theta = lu_solve(factors, b)
        sigma = _estimate_sigma_min(factors, n)
        iterations = 1
    else:

        def matvec(v):
            v = np.ravel(v)
            w = operator @ (v - v.mean())
            return w - w.mean() + v.mean()

        theta, iterations = _gmres(matvec, b, threshold / math.sqrt(grid.spacing))
        sigma = math.nan

    if not np.isfinite(theta).all():
        raise NumericalError("non-finite density", stage="density")
    theta = theta - theta.mean()
    image = operator @ theta
    residual = grid_norm(image - image.mean() - b, grid.spacing)
    if residual > threshold:
        raise SolverStallError(
            "density residual above tolerance", best_residual=residual
        )
    logger.debug(
        "solve_theta n=%d residual=%.3e sigma_min~%.4g", n, residual, sigma
    )
    return DensitySolution(
        theta=GridFunction(grid, theta),
        residual_norm=residual,
        sigma_min_estimate=sigma,
        iterations=iterations,
    )


def solve_Theta(
    f: GridFunction, g: GridFunction, tol: Optional[float] = None
) -> GridFunction:
    """Theta = (1/2 I + K[f])^{-1} g, the double-layer density of the Dirichlet problem"""
    _check_pair(f, g)
    grid = f.grid
    n = grid.n_points
    threshold = _tolerance(tol, g.values, grid.spacing)
    operator = 0.5 * np.eye(n) + assemble(f, OperatorTag.K).entries

    if n <= settings.DENSE_SOLVE_MAX_N:
        Theta = lu_solve(lu_factor(operator), g.values)
    else:
        Theta, _ = _gmres(
            lambda v: operator @ np.ravel(v),
            g.values,
            threshold / math.sqrt(grid.spacing),
        )

    if not np.isfinite(Theta).all():
        raise NumericalError("non-finite double-layer density", stage="density")
    residual = grid_norm(operator @ Theta - g.values, grid.spacing)
    if residual > threshold:
        raise SolverStallError(
            "double-layer residual above tolerance", best_residual=residual
        )
    return GridFunction(grid, Theta)


def sigma_min_monitor(f: GridFunction, sign: int = -1) -> float:
    """Smallest singular value of (1/2 I + sign K*) on the mean-zero subspace"""
    n = f.grid.n_points
    if n > settings.SIGMA_MIN_MAX_N:
        raise InvalidInputError(
            "dense singular values are capped", n_points=n, cap=settings.SIGMA_MIN_MAX_N
        )
    if sign not in (-1, 1):
        raise InvalidInputError("sign must be -1 or +1", sign=sign)
    operator = 0.5 * np.eye(n) + sign * assemble(f, OperatorTag.KSTAR).entries
    basis = null_space(np.ones((1, n)))
    return float(svdvals(basis.T @ operator @ basis).min())


def jump_relation_defect(f: GridFunction) -> Tuple[float, float]:
    """Max row-sum of K and max column-sum of K*; both vanish as (1/2 I + K)1 = 1/2"""
    surface = kernels.surface_samples(f)
    k_rows = assemble(f, OperatorTag.K, surface).entries.sum(axis=1)
    kstar_columns = assemble(f, OperatorTag.KSTAR, surface).entries.sum(axis=0)
    return float(np.abs(k_rows).max()), float(np.abs(kstar_columns).max())
