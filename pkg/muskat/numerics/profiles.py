import logging
import math
from typing import Optional

import numpy as np

from muskat.config import settings
from muskat.core.errors import InvalidInputError
from muskat.models.grid import GridFunction, PeriodicGrid
from muskat.numerics import spectral
from muskat.schemas.simulation import InitialProfile, SimConfig

logger = logging.getLogger(__name__)

RANDOM_MAX_MODE = 16


def mollifier_width(config: SimConfig) -> float:
    """Configured width, or sqrt(epsilon) when the width follows the viscosity"""
    if config.mollifier_width is not None:
        return config.mollifier_width
    return math.sqrt(config.epsilon)


def _random(grid: PeriodicGrid, amplitude: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    top = min(RANDOM_MAX_MODE, grid.n_points // 4)
    k = np.arange(1, top + 1)
    a = rng.standard_normal(top) / k**2
    b = rng.standard_normal(top) / k**2
    x = grid.nodes
    values = np.cos(np.outer(x, k)) @ a + np.sin(np.outer(x, k)) @ b
    return amplitude * values / np.abs(values).max()


def _sawtooth(x: np.ndarray, amplitude: float, peak: float) -> np.ndarray:
    rising = -0.5 + (x + math.pi) / (peak + math.pi)
    falling = 0.5 - (x - peak) / (math.pi - peak)
    return amplitude * np.where(x <= peak, rising, falling)


def _samples(grid: PeriodicGrid, path) -> np.ndarray:
    try:
        values = np.loadtxt(path, dtype=float, ndmin=1).ravel()
    except OSError as exc:
        raise InvalidInputError("cannot read samples file", path=str(path)) from exc
    if values.size != grid.n_points:
        raise InvalidInputError(
            "samples file length does not match n_points",
            path=str(path),
            expected=grid.n_points,
            got=values.size,
        )
    return values


def initial_profile(
    config: SimConfig,
    grid: PeriodicGrid,
    width: Optional[float] = None,
    seed: Optional[int] = None,
) -> GridFunction:
    """Initial interface for `config`, convolved with a Gaussian of the given width"""
    x = grid.nodes
    a = config.amplitude
    profile = config.profile

    if profile == InitialProfile.FLAT:
        values = np.zeros_like(x)
    elif profile == InitialProfile.COSINE:
        values = a * np.cos(config.mode * x)
    elif profile == InitialProfile.MODES:
        values = a * sum(np.cos(k * x) for k in config.modes)
    elif profile == InitialProfile.KINK:
        values = a * (0.5 * math.pi - np.abs(x))
    elif profile == InitialProfile.SAWTOOTH:
        values = _sawtooth(x, a, config.peak)
    elif profile == InitialProfile.RANDOM:
        if seed is None:
            seed = config.seed if config.seed is not None else settings.SEED
        values = _random(grid, a, seed)
    else:
        values = _samples(grid, config.samples_path)

    f = GridFunction(grid, values + config.offset)
    width = mollifier_width(config) if width is None else width
    if width > 0.0:
        logger.debug("mollifying %s profile at width %.4g", profile.value, width)
        f = spectral.mollify(f, width)
    return f
