"""Tests for initial profiles, time stepping and the vanishing-viscosity sweep"""
import math

import numpy as np
import pytest

from muskat.core.errors import ConfigError, InvalidInputError, NumericalError
from muskat.models.grid import GridFunction, PeriodicGrid
from muskat.models.state import InterfaceState
from muskat.numerics import diagnostics, dno, profiles, spectral, stepper
from muskat.schemas.simulation import SimConfig, TimeScheme


def _state(f: GridFunction, kappa: float = 1.0, epsilon: float = 0.0) -> InterfaceState:
    return InterfaceState(f=f, time=0.0, kappa=kappa, epsilon=epsilon)


class TestProfiles:
    def test_cosine(self, grid64):
        """Unmollified cosine profile with offset"""
        config = SimConfig(t_final=1.0, n_points=64, amplitude=0.2, mode=3, offset=1.0)
        f = profiles.initial_profile(config, grid64)
        assert np.abs(f.values - (0.2 * np.cos(3 * grid64.nodes) + 1.0)).max() <= 1e-15

    def test_mollifier_width_follows_viscosity(self):
        """The default width is sqrt(epsilon); an explicit width wins"""
        assert profiles.mollifier_width(SimConfig(t_final=1.0, epsilon=0.04)) == pytest.approx(0.2)
        config = SimConfig(t_final=1.0, epsilon=0.04, mollifier_width=0.05)
        assert profiles.mollifier_width(config) == 0.05

    def test_mollified_kink_is_rounded(self, grid64):
        """Mollifying a kink lowers its peak"""
        config = SimConfig(t_final=1.0, n_points=64, profile="kink", amplitude=0.3, epsilon=0.01)
        f = profiles.initial_profile(config, grid64)
        assert f.values.max() < 0.3 * 0.5 * math.pi - 0.01

    def test_sawtooth_peak(self, grid64):
        """The sawtooth peaks at `peak` with height amplitude / 2"""
        config = SimConfig(
            t_final=1.0, n_points=64, profile="sawtooth", amplitude=2.0, peak=0.0
        )
        f = profiles.initial_profile(config, grid64)
        assert f.values.max() == pytest.approx(1.0)
        assert f.values[grid64.node_index(0.0)] == pytest.approx(1.0)

    def test_random_is_seeded(self, grid64):
        """The random profile depends only on the seed"""
        config = SimConfig(t_final=1.0, n_points=64, profile="random", amplitude=0.4)
        first = profiles.initial_profile(config, grid64, seed=11)
        second = profiles.initial_profile(config, grid64, seed=11)
        other = profiles.initial_profile(config, grid64, seed=12)
        assert np.array_equal(first.values, second.values)
        assert not np.array_equal(first.values, other.values)
        assert first.max_abs() == pytest.approx(0.4)

    def test_samples_file(self, grid64, tmp_path):
        """Samples are read from a text file"""
        path = tmp_path / "f.txt"
        np.savetxt(path, np.sin(grid64.nodes))
        config = SimConfig(t_final=1.0, n_points=64, profile="samples", samples_path=path)
        f = profiles.initial_profile(config, grid64)
        assert np.abs(f.values - np.sin(grid64.nodes)).max() <= 1e-15

    def test_samples_length_mismatch(self, grid64, tmp_path):
        """A samples file of the wrong length is rejected"""
        path = tmp_path / "f.txt"
        np.savetxt(path, np.zeros(10))
        config = SimConfig(t_final=1.0, n_points=64, profile="samples", samples_path=path)
        with pytest.raises(InvalidInputError):
            profiles.initial_profile(config, grid64)


class TestStep:
    def test_constant_is_stationary(self):
        """Constants do not move"""
        grid = PeriodicGrid(32)
        state = _state(GridFunction.constant(grid, 0.7), epsilon=0.1)
        for _ in range(5):
            state = stepper.step(state, 0.01)
        assert np.abs(state.f.values - 0.7).max() <= 1e-12
        assert state.time == pytest.approx(0.05)

    @pytest.mark.parametrize("scheme", [TimeScheme.EULER, TimeScheme.HEUN])
    def test_pure_heat_is_exact(self, grid64, scheme):
        """With kappa = 0 a step is the exact heat propagator"""
        f = GridFunction.from_function(grid64, lambda x: 0.3 * np.cos(2 * x))
        new = stepper.step(_state(f, kappa=0.0, epsilon=0.1), 0.01, scheme)
        expected = 0.3 * math.exp(-0.1 * 0.01 * 4) * np.cos(2 * grid64.nodes)
        assert np.abs(new.f.values - expected).max() <= 1e-14

    def test_reuses_current_result(self, grid64, cosine):
        """Passing the precomputed G(f)f gives the same step"""
        state = _state(cosine(grid64, 0.4), epsilon=0.01)
        current = dno.apply_dno(state.f, state.f)
        with_current = stepper.step(state, 0.005, current=current)
        without = stepper.step(state, 0.005)
        assert np.array_equal(with_current.f.values, without.f.values)

    def test_dealias(self, grid64, cosine):
        """Dealiased steps carry no modes above N/3"""
        new = stepper.step(_state(cosine(grid64, 0.4)), 0.005, dealias=True)
        coeffs = np.fft.rfft(new.f.values)
        assert np.abs(coeffs[22:]).max() <= 1e-12

    def test_non_positive_dt(self, grid64, cosine):
        """dt must be positive"""
        with pytest.raises(NumericalError):
            stepper.step(_state(cosine(grid64, 0.4)), 0.0)

    def test_linearized_decay(self, grid64):
        """A small cosine decays at rate kappa k"""
        f = GridFunction.from_function(grid64, lambda x: 1e-3 * np.cos(2 * x))
        state = _state(f)
        for _ in range(100):
            state = stepper.step(state, 1e-3)
        amplitude = 2 * abs(np.fft.rfft(state.f.values)[2]) / 64
        assert amplitude == pytest.approx(1e-3 * math.exp(-0.2), rel=1e-3)


class TestRun:
    def test_records_and_times(self):
        """Snapshots land on the cadence and the last one on t_final"""
        config = SimConfig(
            n_points=32, epsilon=0.01, dt=0.01, t_final=0.1, amplitude=0.3, output_every=3
        )
        traj = stepper.run(config)
        assert traj.times == pytest.approx([0.0, 0.03, 0.06, 0.09, 0.1])
        assert len(traj.records) == len(traj.snapshots) == 5
        assert not traj.failed

    def test_configured_dt_used(self):
        """The run steps with the configured dt, not a rescaled one"""
        config = SimConfig(n_points=32, dt=0.25, t_final=1.0, amplitude=0.1)
        traj = stepper.run(config)
        assert traj.dt == pytest.approx(0.25, rel=1e-12)
        assert traj.times == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])

    def test_zero_data(self):
        """Zero initial data stays zero"""
        config = SimConfig(n_points=32, epsilon=0.05, dt=0.01, t_final=0.1, amplitude=0.0)
        assert stepper.run(config).final.max_abs() == 0.0

    def test_deterministic(self):
        """Two runs with the same seed are identical"""
        config = SimConfig(
            n_points=32, epsilon=0.01, dt=0.01, t_final=0.05, profile="random", amplitude=0.3
        )
        first, second = stepper.run(config, seed=5), stepper.run(config, seed=5)
        assert np.array_equal(first.as_array(), second.as_array())

    def test_explicit_initial_data(self, cosine):
        """`initial` replaces the configured profile"""
        grid = PeriodicGrid(32)
        config = SimConfig(n_points=32, epsilon=0.01, dt=0.01, t_final=0.02)
        initial = cosine(grid, 0.1, mode=2)
        traj = stepper.run(config, initial=initial)
        assert np.array_equal(traj.snapshots[0], initial.values)

    def test_initial_on_wrong_grid(self, cosine):
        """Initial data must live on the configured grid"""
        config = SimConfig(n_points=32, dt=0.01, t_final=0.02)
        with pytest.raises(InvalidInputError):
            stepper.run(config, initial=cosine(PeriodicGrid(64), 0.1))

    def test_failure_keeps_partial_trajectory(self, monkeypatch):
        """A numerical failure ends the run with the snapshots taken so far"""
        original = dno.apply_dno
        calls = {"count": 0}

        def failing(f, g, tol=None):
            calls["count"] += 1
            if calls["count"] > 3:
                raise NumericalError("forced failure", stage="solve")
            return original(f, g, tol)

        monkeypatch.setattr(dno, "apply_dno", failing)
        config = SimConfig(n_points=32, epsilon=0.01, dt=0.01, t_final=0.1)
        traj = stepper.run(config)
        assert traj.failed
        assert "forced failure" in traj.failure
        assert len(traj.snapshots) == 3

    def test_sigma_monitor(self):
        """sigma_min is recorded on its own cadence"""
        config = SimConfig(
            n_points=32, epsilon=0.01, dt=0.01, t_final=0.04, amplitude=0.5, sigma_every=2
        )
        traj = stepper.run(config)
        sigmas = [record.sigma_min for record in traj.records]
        assert sigmas[0] is not None and sigmas[1] is None and sigmas[2] is not None

    def test_maximum_principle(self):
        """sup |f| does not increase along a smooth run"""
        config = SimConfig(n_points=64, epsilon=0.01, t_final=0.5, amplitude=0.5, output_every=4)
        report = diagnostics.trajectory_report(stepper.run(config))
        assert report.passed

    @pytest.mark.parametrize("scheme,order", [(TimeScheme.EULER, 0.8), (TimeScheme.HEUN, 1.6)])
    def test_temporal_order(self, scheme, order):
        """Halving dt reduces the error at the scheme's order"""
        finals = []
        for dt in (0.02, 0.01, 0.005):
            config = SimConfig(
                n_points=32, epsilon=0.01, dt=dt, t_final=0.2, amplitude=0.5,
                scheme=scheme, mollifier_width=0.0,
            )
            finals.append(stepper.run(config).final.values)
        first = np.abs(finals[0] - finals[1]).max()
        second = np.abs(finals[1] - finals[2]).max()
        assert math.log2(first / second) >= order


class TestVanishingViscosity:
    def test_single_epsilon(self):
        """One viscosity gives a report without rows"""
        config = SimConfig(n_points=32, dt=0.01, t_final=0.05)
        trajectories, report = stepper.vanishing_viscosity(config, [0.1])
        assert len(trajectories) == 1
        assert report.rows == []
        assert report.complete

    @pytest.mark.parametrize("eps", [[0.1, 0.2], [0.1, 0.1], [0.1, -0.05], []])
    def test_invalid_sequences(self, eps):
        """Viscosities must be positive and strictly decreasing"""
        config = SimConfig(n_points=32, dt=0.01, t_final=0.05)
        with pytest.raises(ConfigError):
            stepper.vanishing_viscosity(config, eps)

    def test_shared_step_and_widths(self):
        """Every run shares dt; mollifier widths follow each epsilon"""
        config = SimConfig(n_points=32, t_final=0.05, amplitude=0.3)
        trajectories, report = stepper.vanishing_viscosity(config, [0.04, 0.01], threads=2)
        assert trajectories[0].dt == trajectories[1].dt
        assert report.mollifier_widths == pytest.approx([0.2, 0.1])
        assert [t.config.epsilon for t in trajectories] == [0.04, 0.01]

    def test_cauchy_distances_shrink(self):
        """Successive solutions get closer as epsilon decreases"""
        config = SimConfig(n_points=64, dt=0.01, t_final=0.3, amplitude=0.5)
        _, report = stepper.vanishing_viscosity(config, [0.1, 0.05, 0.025])
        first, second = report.distances
        assert second < first

    def test_threads_do_not_change_results(self):
        """Thread count does not change the sweep"""
        config = SimConfig(n_points=32, dt=0.01, t_final=0.05, profile="kink", amplitude=0.3)
        one, _ = stepper.vanishing_viscosity(config, [0.05, 0.02], threads=1)
        two, _ = stepper.vanishing_viscosity(config, [0.05, 0.02], threads=2)
        for a, b in zip(one, two):
            assert np.allclose(a.as_array(), b.as_array(), rtol=0.0, atol=1e-12)
