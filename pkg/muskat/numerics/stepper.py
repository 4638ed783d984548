"""Time integration of df/dt = -kappa G(f)f + epsilon d^2f/dx^2.

The diffusion is integrated exactly by the Fourier factor E = exp(-epsilon dt k^2);
the nonlocal term is explicit. Euler: f+ = E(f + dt N(f)). Heun, the two-stage
integrating-factor scheme: f1 = E(f + dt N(f)), f+ = E(f + dt/2 N(f)) + dt/2 N(f1).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from muskat.config import settings
from muskat.core.errors import ConfigError, InvalidInputError, NumericalError
from muskat.models.grid import GridFunction, PeriodicGrid
from muskat.models.operator import DnoResult
from muskat.models.state import InterfaceState, Trajectory
from muskat.numerics import bie, diagnostics, dno, profiles, spectral
from muskat.schemas.diagnostics import CauchyReport, CauchyRow
from muskat.schemas.simulation import SimConfig, TimeScheme

logger = logging.getLogger(__name__)


def nonlinear_term(
    f: GridFunction, kappa: float, current: Optional[DnoResult] = None
) -> Tuple[np.ndarray, Optional[DnoResult]]:
    """-kappa G(f)f as an array, with the DnoResult it came from"""
    if kappa == 0.0:
        return np.zeros(f.grid.n_points), None
    result = current if current is not None else dno.apply_dno(f, f)
    return -kappa * result.gf.values, result


def _checked(values: np.ndarray, state: InterfaceState) -> np.ndarray:
    if not np.isfinite(values).all():
        raise NumericalError("non-finite update", stage="step", last_state=state)
    return values


def step(
    state: InterfaceState,
    dt: float,
    scheme: TimeScheme = TimeScheme.EULER,
    dealias: bool = False,
    current: Optional[DnoResult] = None,
) -> InterfaceState:
    """Advance one step; `current` reuses G(f)f already computed for state.f"""
    if not dt > 0.0:
        raise NumericalError("time step must be positive", stage="step", dt=dt)
    f = state.f
    grid = f.grid
    nu = state.epsilon * dt
    rate, _ = nonlinear_term(f, state.kappa, current)

    predictor = f.with_values(_checked(f.values + dt * rate, state))
    if scheme == TimeScheme.EULER:
        new = spectral.heat_factor(predictor, nu)
    else:
        stage = spectral.heat_factor(predictor, nu)
        stage_rate, _ = nonlinear_term(stage, state.kappa)
        half = spectral.heat_factor(
            f.with_values(f.values + 0.5 * dt * rate), nu
        )
        new = GridFunction(grid, _checked(half.values + 0.5 * dt * stage_rate, state))
    if dealias:
        new = spectral.dealias(new)
    return InterfaceState(
        f=new, time=state.time + dt, kappa=state.kappa, epsilon=state.epsilon
    )


def _sigma_due(config: SimConfig, grid: PeriodicGrid, index: int) -> bool:
    return (
        config.sigma_every is not None
        and index % config.sigma_every == 0
        and grid.n_points <= settings.SIGMA_MIN_MAX_N
    )


def run(
    config: SimConfig,
    seed: Optional[int] = None,
    width: Optional[float] = None,
    initial: Optional[GridFunction] = None,
) -> Trajectory:
    """Integrate from the mollified initial data to t_final.

    `initial` replaces the configured profile; it is used as given.

    A failing step ends the run; the partial trajectory is returned with
    `failed` set and the error text in `failure`.
    """
    grid = PeriodicGrid(config.n_points)
    width = profiles.mollifier_width(config) if width is None else width
    n_steps = config.step_count()
    dt = config.effective_dt()
    trajectory = Trajectory(config=config, grid=grid, dt=dt, mollifier_width=width)

    if initial is not None:
        if initial.grid != grid:
            raise InvalidInputError(
                "initial interface does not match n_points",
                expected=grid.n_points,
                got=initial.grid.n_points,
            )
        f0 = initial
    else:
        f0 = profiles.initial_profile(config, grid, width=width, seed=seed)
    state = InterfaceState(f=f0, time=0.0, kappa=config.kappa, epsilon=config.epsilon)
    logger.info(
        "run: N=%d kappa=%g epsilon=%g dt=%.4g steps=%d scheme=%s",
        grid.n_points,
        config.kappa,
        config.epsilon,
        dt,
        n_steps,
        config.scheme.value,
    )

    for index in range(n_steps + 1):
        try:
            current = dno.apply_dno(state.f, state.f)
            if index % config.output_every == 0 or index == n_steps:
                sigma = None
                if _sigma_due(config, grid, index):
                    sigma = bie.sigma_min_monitor(state.f)
                record = diagnostics.record(state, current, sigma_min=sigma)
                trajectory.append(state, record)
            if index == n_steps:
                break
            state = step(state, dt, config.scheme, config.dealias, current=current)
            # time from the step count, so the last output lands on t_final
            state = InterfaceState(
                f=state.f,
                time=(index + 1) * dt,
                kappa=state.kappa,
                epsilon=state.epsilon,
            )
        except NumericalError as exc:
            trajectory.failed = True
            trajectory.failure = str(exc)
            logger.warning("run failed at t=%.6g: %s", state.time, exc)
            break
    return trajectory


def _check_eps_list(eps_list: Sequence[float]) -> List[float]:
    eps = [float(e) for e in eps_list]
    problems = []
    if not eps:
        problems.append("eps list is empty")
    if any(not e > 0.0 for e in eps):
        problems.append("every epsilon must be positive")
    if any(a <= b for a, b in zip(eps, eps[1:])):
        problems.append("eps list must be strictly decreasing")
    if problems:
        raise ConfigError("invalid viscosity sequence", errors=problems, eps=eps)
    return eps


def _sup_distance(coarse: Trajectory, fine: Trajectory) -> float:
    count = min(len(coarse.snapshots), len(fine.snapshots))
    if count == 0:
        return math.nan
    a = np.asarray(coarse.snapshots[:count])
    b = np.asarray(fine.snapshots[:count])
    return float(np.abs(a - b).max())


def vanishing_viscosity(
    config: SimConfig,
    eps_list: Sequence[float],
    seed: Optional[int] = None,
    threads: int = 1,
) -> Tuple[List[Trajectory], CauchyReport]:
    """Run one trajectory per epsilon on a shared grid, step and cadence.

    d_j is the largest max-norm distance between f^{eps_j} and f^{eps_{j+1}}
    over the common output times.
    """
    eps = _check_eps_list(eps_list)
    dt = config.effective_dt()
    configs = [
        config.model_copy(update={"epsilon": e, "dt": dt}) for e in eps
    ]
    widths = [profiles.mollifier_width(c) for c in configs]

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        trajectories = list(
            pool.map(
                lambda pair: run(pair[0], seed=seed, width=pair[1]),
                zip(configs, widths),
            )
        )

    rows = [
        CauchyRow(
            index=j,
            eps_coarse=eps[j],
            eps_fine=eps[j + 1],
            distance=_sup_distance(trajectories[j], trajectories[j + 1]),
        )
        for j in range(len(eps) - 1)
    ]
    complete = not any(t.failed for t in trajectories)
    if not complete:
        logger.warning("vanishing-viscosity sweep incomplete: a run failed")
    report = CauchyReport(
        eps_list=eps, rows=rows, complete=complete, mollifier_widths=widths
    )
    return trajectories, report
