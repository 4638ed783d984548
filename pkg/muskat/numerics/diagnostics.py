"""Norms, maximum-principle and comparison checks, sup/inf convolutions."""

import logging
import math
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from muskat.config import invariant_tolerance
from muskat.core.errors import InvalidInputError
from muskat.models.grid import GridFunction
from muskat.models.operator import DnoResult
from muskat.models.state import ComparisonReport, InterfaceState, Trajectory
from muskat.numerics import bie, dno, spectral
from muskat.schemas.diagnostics import (
    DiagnosticsRecord,
    ModulusCheck,
    RateFit,
    TrajectoryReport,
)

logger = logging.getLogger(__name__)

Modulus = Callable[[np.ndarray], np.ndarray]

ROW_CHUNK = 256
POSITIVITY_TOL = 1e-8


def sup_norm(f: GridFunction) -> float:
    return f.max_abs()


def lip_seminorm(f: GridFunction) -> float:
    """max_j |f_{j+1} - f_j| / dx, periodic"""
    v = f.values
    return float(np.abs(np.roll(v, -1) - v).max()) / f.grid.spacing


def l2_norm(f: GridFunction) -> float:
    return bie.grid_norm(f.values, f.grid.spacing)


def h1_seminorm(f: GridFunction) -> float:
    return l2_norm(spectral.dft_derivative(f))


def record(
    state: InterfaceState, result: DnoResult, sigma_min: Optional[float] = None
) -> DiagnosticsRecord:
    f = state.f
    return DiagnosticsRecord(
        time=state.time,
        sup_norm=sup_norm(f),
        lip_seminorm=lip_seminorm(f),
        l2_norm=l2_norm(f),
        dn_pairing=result.pairing,
        theta_l2=state.kappa * l2_norm(result.theta_used.theta),
        h1_seminorm=h1_seminorm(f),
        velocity_ratio=dno.velocity_bound_ratio(f, f, result.gf),
        sigma_min=sigma_min,
    )


def _periodic_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    separation = np.abs(np.subtract.outer(a, b))
    return np.minimum(separation, 2.0 * math.pi - separation)


def modulus_check(
    f: GridFunction, gamma: Modulus, tol: Optional[float] = None
) -> ModulusCheck:
    """Exhaustive check of |f(x_i) - f(x_j)| <= gamma(d(x_i, x_j)) + tol"""
    tol = invariant_tolerance(f.grid.spacing) if tol is None else tol
    nodes = f.grid.nodes
    values = f.values
    n = f.grid.n_points
    worst, pair = -math.inf, (0, 0)
    for start in range(0, n, ROW_CHUNK):
        rows = slice(start, min(n, start + ROW_CHUNK))
        distance = _periodic_distance(nodes[rows], nodes)
        jumps = np.abs(np.subtract.outer(values[rows], values))
        excess = jumps - gamma(distance)
        i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
        if excess[i, j] > worst:
            worst, pair = float(excess[i, j]), (start + int(i), int(j))
    return ModulusCheck(
        passed=worst <= tol,
        worst_excess=worst,
        worst_pair=pair,
        worst_points=(float(nodes[pair[0]]), float(nodes[pair[1]])),
    )


def discrete_modulus(f: GridFunction) -> Modulus:
    """Smallest nondecreasing modulus of f on grid distances"""
    v = f.values
    half = f.grid.n_points // 2
    spacing = f.grid.spacing
    omega = np.array([np.abs(v - np.roll(v, k)).max() for k in range(half + 1)])
    omega = np.maximum.accumulate(omega)

    def gamma(distance: np.ndarray) -> np.ndarray:
        index = np.clip(np.rint(distance / spacing).astype(int), 0, half)
        return omega[index]

    return gamma


def _spatial_sup(values: np.ndarray, nodes: np.ndarray, delta: float) -> np.ndarray:
    out = np.empty_like(values)
    for start in range(0, nodes.size, ROW_CHUNK):
        rows = slice(start, min(nodes.size, start + ROW_CHUNK))
        penalty = _periodic_distance(nodes[rows], nodes) ** 2 / (2.0 * delta)
        out[..., rows] = (values[..., None, :] - penalty).max(axis=-1)
    return out


def sup_convolution(
    f: Union[GridFunction, np.ndarray],
    delta: float,
    times: Optional[Sequence[float]] = None,
    nodes: Optional[np.ndarray] = None,
) -> Union[GridFunction, np.ndarray]:
    """f^delta(x) = max_y f(y) - d(x, y)^2 / (2 delta).

    A GridFunction gives the spatial convolution. A (times x nodes) array
    with `times` and `nodes` gives the space-time one, penalizing
    (d(x, y)^2 + (t - s)^2) / (2 delta); the penalty separates, so the
    spatial pass is followed by a scan over times.
    """
    if not delta > 0.0:
        raise InvalidInputError("delta must be positive", delta=delta)
    if isinstance(f, GridFunction):
        return f.with_values(_spatial_sup(f.values, f.grid.nodes, delta))

    values = np.asarray(f, dtype=float)
    if values.ndim != 2 or times is None or nodes is None:
        raise InvalidInputError(
            "space-time convolution needs a 2-D array with times and nodes",
            shape=values.shape,
        )
    times = np.asarray(times, dtype=float)
    if times.shape != (values.shape[0],) or nodes.shape != (values.shape[1],):
        raise InvalidInputError(
            "times/nodes do not match the array", shape=values.shape
        )
    spatial = _spatial_sup(values, nodes, delta)
    time_penalty = np.subtract.outer(times, times) ** 2 / (2.0 * delta)
    return (spatial[None, :, :] - time_penalty[:, :, None]).max(axis=1)


def inf_convolution(
    g: Union[GridFunction, np.ndarray],
    delta: float,
    times: Optional[Sequence[float]] = None,
    nodes: Optional[np.ndarray] = None,
) -> Union[GridFunction, np.ndarray]:
    """g_delta = -(-g)^delta"""
    return -sup_convolution(-g, delta, times, nodes)


def _check_matched(traj1: Trajectory, traj2: Trajectory) -> None:
    problems = {}
    if traj1.grid != traj2.grid:
        problems["n_points"] = (traj1.grid.n_points, traj2.grid.n_points)
    if traj1.config.kappa != traj2.config.kappa:
        problems["kappa"] = (traj1.config.kappa, traj2.config.kappa)
    if traj1.config.epsilon != traj2.config.epsilon:
        problems["epsilon"] = (traj1.config.epsilon, traj2.config.epsilon)
    if traj1.dt != traj2.dt:
        problems["dt"] = (traj1.dt, traj2.dt)
    if len(traj1.times) != len(traj2.times) or not np.allclose(
        traj1.times, traj2.times, rtol=0.0, atol=1e-12
    ):
        problems["times"] = (len(traj1.times), len(traj2.times))
    if problems:
        raise InvalidInputError("trajectories are not matched", **problems)


def comparison_report(
    traj1: Trajectory, traj2: Trajectory, tol: Optional[float] = None
) -> ComparisonReport:
    """Ordering and max-norm contraction between two matched trajectories.

    Orientation comes from the initial data. Ordering defects are signed:
    positive when traj1 starts below traj2, so swapping negates them.
    """
    _check_matched(traj1, traj2)
    tol = invariant_tolerance(traj1.grid.spacing) if tol is None else tol
    differences = traj2.as_array() - traj1.as_array()

    if differences[0].min() >= -tol:
        orientation = 1.0
    elif differences[0].max() <= tol:
        orientation = -1.0
    else:
        orientation = 0.0
    oriented = orientation * differences
    ordering = orientation * np.maximum(0.0, -oriented.min(axis=1))

    gaps = np.abs(differences).max(axis=1)
    contraction = np.maximum(0.0, gaps - gaps[0])
    monotone = float(np.maximum(0.0, np.diff(gaps)).max()) if gaps.size > 1 else 0.0

    return ComparisonReport(
        times=np.asarray(traj1.times),
        differences=differences,
        ordered=orientation != 0.0,
        ordering_defects=ordering,
        contraction_defects=contraction,
        contraction_monotone_defect=monotone,
        tol=tol,
    )


def _worst_increase(series: np.ndarray) -> float:
    if series.size < 2:
        return 0.0
    running_min = np.minimum.accumulate(series)
    return float(np.max(series[1:] - running_min[:-1]))


def trajectory_report(traj: Trajectory, tol: Optional[float] = None) -> TrajectoryReport:
    """Maximum principles, DN positivity and modulus preservation along traj"""
    tol = invariant_tolerance(traj.grid.spacing) if tol is None else tol
    records = traj.records
    sup = np.array([r.sup_norm for r in records])
    lip = np.array([r.lip_seminorm for r in records])
    l2 = np.array([r.l2_norm for r in records])
    ratios = [
        r.dn_pairing / r.l2_norm**2 if r.l2_norm > 0.0 else 0.0 for r in records
    ]

    modulus_preserved = True
    if traj.snapshots:
        gamma = discrete_modulus(traj.snapshot(0))
        for index in range(1, len(traj.snapshots)):
            check = modulus_check(traj.snapshot(index), gamma, tol)
            if not check.passed:
                logger.warning(
                    "modulus of continuity lost at t=%.4g (excess %.3e)",
                    traj.times[index],
                    check.worst_excess,
                )
                modulus_preserved = False
                break

    return TrajectoryReport(
        tol=tol,
        sup_increase=_worst_increase(sup),
        lip_increase=_worst_increase(lip),
        l2_increase=_worst_increase(l2),
        worst_pairing_ratio=min(ratios) if ratios else 0.0,
        modulus_preserved=modulus_preserved,
        failed_run=traj.failed,
    )


def mode_amplitudes(traj: Trajectory, modes: Sequence[int]) -> np.ndarray:
    """2|c_k|/N per snapshot (rows) and mode (columns)"""
    if not traj.snapshots:
        return np.empty((0, len(modes)))
    coeffs = np.fft.rfft(traj.as_array(), axis=1)
    n = traj.grid.n_points
    return 2.0 * np.abs(coeffs[:, list(modes)]) / n


def fit_decay_rates(traj: Trajectory, modes: Sequence[int]) -> List[RateFit]:
    """Least-squares exponential rate per mode; predicted kappa k + epsilon k^2"""
    amplitudes = mode_amplitudes(traj, modes)
    times = np.asarray(traj.times)
    kappa, epsilon = traj.config.kappa, traj.config.epsilon
    fits = []
    for column, k in enumerate(modes):
        series = amplitudes[:, column]
        fitted = None
        if times.size >= 2 and (series > 1e-300).all():
            slope = np.polyfit(times, np.log(series), 1)[0]
            fitted = float(-slope)
        fits.append(
            RateFit(mode=int(k), fitted_rate=fitted, predicted_rate=kappa * k + epsilon * k**2)
        )
    return fits
