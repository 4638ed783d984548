"""Fourier multipliers on the periodic grid.

Every operator is a single rfft/irfft pair. Odd multipliers (derivative,
Hilbert transform, |D|) zero the Nyquist mode, so |D| = H d/dx holds exactly
on every grid function.
"""

import math
from typing import Union

import numpy as np

from muskat.core.errors import InvalidInputError
from muskat.models.grid import GridFunction, PeriodicGrid


def _apply(u: GridFunction, multiplier: np.ndarray) -> GridFunction:
    coeffs = np.fft.rfft(u.values)
    return u.with_values(np.fft.irfft(coeffs * multiplier, n=u.grid.n_points))


def _odd(multiplier: np.ndarray) -> np.ndarray:
    multiplier = np.asarray(multiplier, dtype=complex).copy()
    multiplier[-1] = 0.0
    return multiplier


def dft_derivative(u: GridFunction, order: int = 1) -> GridFunction:
    if order < 0:
        raise InvalidInputError("derivative order must be nonnegative", order=order)
    k = u.grid.wavenumbers
    multiplier = (1j * k) ** order
    if order % 2:
        multiplier = _odd(multiplier)
    return _apply(u, multiplier)


def hilbert_transform(u: GridFunction) -> GridFunction:
    """Periodic Hilbert transform, multiplier -i sgn(k)"""
    k = u.grid.wavenumbers
    return _apply(u, _odd(-1j * np.sign(k)))


def abs_derivative(u: GridFunction) -> GridFunction:
    """|D|: the Dirichlet-Neumann operator of the flat interface"""
    return _apply(u, _odd(u.grid.wavenumbers))


def heat_factor(u: GridFunction, nu: float) -> GridFunction:
    """Exact heat-flow propagator exp(-nu k^2) over diffusivity*time nu"""
    if not nu >= 0.0:
        raise InvalidInputError("nu must be nonnegative", nu=nu)
    if nu == 0.0:
        return u
    k = u.grid.wavenumbers
    return _apply(u, np.exp(-nu * k**2))


def mollify(u: GridFunction, width: float) -> GridFunction:
    """Convolution with a periodized Gaussian of standard deviation `width`"""
    if not width >= 0.0:
        raise InvalidInputError("mollifier width must be nonnegative", width=width)
    return heat_factor(u, 0.5 * width**2)


def dealias(u: GridFunction) -> GridFunction:
    """Two-thirds rule: zero every mode above N/3"""
    k = u.grid.wavenumbers
    return _apply(u, (k <= u.grid.n_points / 3).astype(float))


def resample(u: GridFunction, n_points: int) -> GridFunction:
    """Trigonometric interpolant of u sampled on a grid of n_points"""
    target = PeriodicGrid(n_points)
    n = u.grid.n_points
    if n_points == n:
        return u
    coeffs = np.fft.rfft(u.values)
    if n_points > n:
        coeffs = coeffs.copy()
        # the source Nyquist mode becomes a regular mode pair on the finer grid
        coeffs[-1] *= 0.5
        padded = np.zeros(n_points // 2 + 1, dtype=complex)
        padded[: coeffs.size] = coeffs
    else:
        padded = coeffs[: n_points // 2 + 1].copy()
        padded[-1] = 2.0 * padded[-1].real
    values = np.fft.irfft(padded, n=n_points) * (n_points / n)
    return GridFunction(target, values)


def interpolate(u: GridFunction, points: Union[float, np.ndarray]) -> np.ndarray:
    """Evaluate the trigonometric interpolant of u at arbitrary points"""
    points = np.asarray(points, dtype=float)
    n = u.grid.n_points
    coeffs = np.fft.rfft(u.values) / n
    weights = np.full(coeffs.size, 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    k = u.grid.wavenumbers
    phase = np.exp(1j * np.multiply.outer(points + math.pi, k))
    return (phase * (weights * coeffs)).real.sum(axis=-1)
