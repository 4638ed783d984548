"""Periodic Newtonian kernel and the K, K*, Dirichlet-Neumann and smooth-log integrands.

Pointwise operations return a KernelSample; the *_matrix builders evaluate the
same formulas on every node pair for Nystrom assembly. With d = f(x) - f(x')
and h = x - x', the common denominator is written

    cosh d - cos h = 2 sinh^2(d/2) + 2 sin^2(h/2)

which avoids cancellation for nearby nodes. For |d| above HYPERBOLIC_CLAMP
numerator and denominator are divided by cosh d.
"""

import math

import numpy as np

from muskat.core.errors import InvalidInputError, NumericalError
from muskat.models.grid import GridFunction, SurfaceSamples
from muskat.models.operator import KernelSample, OperatorTag
from muskat.numerics import spectral

FOUR_PI = 4.0 * math.pi
HYPERBOLIC_CLAMP = 30.0
COINCIDENT_DENOMINATOR = 1e-300


def surface_samples(f: GridFunction) -> SurfaceSamples:
    return SurfaceSamples(
        grid=f.grid,
        values=f.values,
        slope=spectral.dft_derivative(f).values,
        curvature=spectral.dft_derivative(f, order=2).values,
    )


def _sech(d: np.ndarray) -> np.ndarray:
    e = np.exp(-np.abs(d))
    return 2.0 * e / (1.0 + e * e)


def _denominator(d: np.ndarray, h: np.ndarray) -> np.ndarray:
    return 2.0 * np.sinh(0.5 * d) ** 2 + 2.0 * np.sin(0.5 * h) ** 2


def hyperbolic_ratio(weight, offset, d, h) -> np.ndarray:
    """(weight*sinh d + offset) / (cosh d - cos h); nan where d = h = 0"""
    d = np.asarray(d, dtype=float)
    h = np.asarray(h, dtype=float)
    large = np.abs(d) > HYPERBOLIC_CLAMP
    d_moderate = np.where(large, 0.0, d)
    d_large = np.where(large, d, 2.0 * HYPERBOLIC_CLAMP)
    with np.errstate(divide="ignore", invalid="ignore"):
        moderate = (weight * np.sinh(d_moderate) + offset) / _denominator(d_moderate, h)
        sech = _sech(d_large)
        clamped = (weight * np.tanh(d_large) + offset * sech) / (1.0 - np.cos(h) * sech)
    return np.where(large, clamped, moderate)


def _log_abs_sinh(a: np.ndarray) -> np.ndarray:
    a = np.abs(a)
    large = a > HYPERBOLIC_CLAMP / 2
    with np.errstate(divide="ignore"):
        moderate = np.log(np.sinh(np.where(large, 1.0, a)))
    asymptotic = a - math.log(2.0) + np.log1p(-np.exp(-2.0 * np.where(large, a, 1.0)))
    return np.where(large, asymptotic, moderate)


def _wrap(h: float) -> float:
    return math.remainder(h, 2.0 * math.pi)


def double_layer_diagonal(slope: np.ndarray, curvature: np.ndarray) -> np.ndarray:
    """Common x = x' limit of K and K*"""
    return -curvature / (FOUR_PI * (1.0 + slope**2))


def smooth_log_diagonal(slope: np.ndarray) -> np.ndarray:
    return np.log1p(slope**2)


def _kstar_values(f_x, f_xp, slope_x, h):
    d = f_x - f_xp
    return hyperbolic_ratio(1.0, -np.sin(h) * slope_x, d, h) / FOUR_PI


def _k_values(f_x, f_xp, slope_xp, h):
    d = f_x - f_xp
    return hyperbolic_ratio(-1.0, np.sin(h) * slope_xp, d, h) / FOUR_PI


def _dno_values(f_x, f_xp, slope_x, h):
    d = f_x - f_xp
    return hyperbolic_ratio(slope_x, np.sin(h), d, h) / FOUR_PI


def _smooth_log_values(f_x, f_xp, h):
    d = np.asarray(f_x - f_xp, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        exponent = 2.0 * (_log_abs_sinh(0.5 * d) - np.log(np.abs(np.sin(0.5 * h))))
        return np.logaddexp(0.0, exponent)


def _sample_at(surface: SurfaceSamples, x: float) -> tuple[float, float, float]:
    """Value, slope and curvature at x; off-grid points use the interpolant"""
    index = surface.grid.node_index(x)
    if index is not None:
        return (
            float(surface.values[index]),
            float(surface.slope[index]),
            float(surface.curvature[index]),
        )
    grid = surface.grid
    return tuple(
        float(spectral.interpolate(GridFunction(grid, samples), x))
        for samples in (surface.values, surface.slope, surface.curvature)
    )


def _pair(surface: SurfaceSamples, x: float, xp: float):
    h = _wrap(x - xp)
    fx, sx, cx = _sample_at(surface, x)
    if h == 0.0:
        return True, h, (fx, sx, cx), (fx, sx, cx)
    return False, h, (fx, sx, cx), _sample_at(surface, xp)


def _check_denominator(d: float, h: float, x: float, xp: float) -> None:
    if abs(d) > HYPERBOLIC_CLAMP:
        return
    if _denominator(np.float64(d), np.float64(h)) < COINCIDENT_DENOMINATOR:
        raise NumericalError(
            "coincident nodes in kernel evaluation", stage="kernel", x=x, xp=xp
        )


def newtonian(x: float, y: float) -> float:
    """(1/4pi) ln(cosh y - cos x)"""
    h = _wrap(x)
    if h == 0.0 and y == 0.0:
        raise InvalidInputError("Newtonian kernel is singular at the origin", x=x, y=y)
    if abs(y) > HYPERBOLIC_CLAMP:
        ay = abs(y)
        log_cosh = ay - math.log(2.0) + math.log1p(math.exp(-2.0 * ay))
        value = log_cosh + math.log1p(-math.cos(h) * float(_sech(np.float64(y))))
    else:
        value = math.log(2.0 * math.sinh(0.5 * y) ** 2 + 2.0 * math.sin(0.5 * h) ** 2)
    return value / FOUR_PI


def kstar_integrand(surface: SurfaceSamples, x: float, xp: float) -> KernelSample:
    diagonal, h, (fx, sx, cx), (fxp, _, _) = _pair(surface, x, xp)
    if diagonal:
        return KernelSample(float(double_layer_diagonal(np.float64(sx), np.float64(cx))), True)
    _check_denominator(fx - fxp, h, x, xp)
    return KernelSample(float(_kstar_values(fx, fxp, sx, h)), False)


def k_integrand(surface: SurfaceSamples, x: float, xp: float) -> KernelSample:
    diagonal, h, (fx, sx, cx), (fxp, sxp, _) = _pair(surface, x, xp)
    if diagonal:
        return KernelSample(float(double_layer_diagonal(np.float64(sx), np.float64(cx))), True)
    _check_denominator(fx - fxp, h, x, xp)
    return KernelSample(float(_k_values(fx, fxp, sxp, h)), False)


def dno_integrand(surface: SurfaceSamples, x: float, xp: float) -> KernelSample:
    diagonal, h, (fx, sx, _), (fxp, _, _) = _pair(surface, x, xp)
    if diagonal:
        raise InvalidInputError(
            "the Dirichlet-Neumann integrand has no diagonal limit; use the log split",
            x=x,
        )
    _check_denominator(fx - fxp, h, x, xp)
    return KernelSample(float(_dno_values(fx, fxp, sx, h)), False)


def smooth_log_integrand(surface: SurfaceSamples, x: float, xp: float) -> KernelSample:
    """ln(1 + sinh^2(d/2) / sin^2(h/2)), continuous across x = x'"""
    diagonal, h, (fx, sx, _), (fxp, _, _) = _pair(surface, x, xp)
    if diagonal:
        return KernelSample(float(smooth_log_diagonal(np.float64(sx))), True)
    return KernelSample(float(_smooth_log_values(fx, fxp, h)), False)


def _differences(surface: SurfaceSamples):
    nodes = surface.grid.nodes
    h = np.subtract.outer(nodes, nodes)
    f = surface.values
    return f[:, None], f[None, :], h


def kernel_matrix(surface: SurfaceSamples, tag: OperatorTag) -> np.ndarray:
    """Integrand values K*(x_i, x_j) or K(x_i, x_j), diagonal limits on i = j"""
    f_x, f_xp, h = _differences(surface)
    if tag == OperatorTag.KSTAR:
        values = _kstar_values(f_x, f_xp, surface.slope[:, None], h)
    else:
        values = _k_values(f_x, f_xp, surface.slope[None, :], h)
    np.fill_diagonal(values, double_layer_diagonal(surface.slope, surface.curvature))
    return values


def smooth_log_matrix(surface: SurfaceSamples) -> np.ndarray:
    f_x, f_xp, h = _differences(surface)
    values = _smooth_log_values(f_x, f_xp, h)
    np.fill_diagonal(values, smooth_log_diagonal(surface.slope))
    return values
