"""Field and density-mode evolution tests."""

import warnings

import numpy as np
import pytest

from rqbm.errors import InputError, NumericalFailureError, UnsupportedError
from rqbm.evolve import (
    DensityModeState,
    EvolutionConfig,
    FieldState,
    branch_amplitudes,
    conservative_mode_frequencies,
    evolve_density,
    evolve_field,
    fit_mode_frequency,
    gaussian_packet,
    particle_branch_project,
    plane_wave,
)
from rqbm.grid import ComplexField, Grid1D
from rqbm.units import (
    collisional,
    conservative,
    dalembert_diffusion,
    phase_diffusion,
    radiative,
)

from _oracles import rk4_density_mode


class TestModeFrequencies:
    def test_reference_value_at_k1(self):
        wp, wm = conservative_mode_frequencies(1.0)
        assert wp == pytest.approx(np.sqrt(2.0) - 1.0, rel=1e-15)
        assert wm == pytest.approx(-np.sqrt(2.0) - 1.0, rel=1e-15)

    def test_small_k_form_avoids_cancellation(self):
        # naive sqrt(1+k^2)-1 loses every significant digit at k=1e-8;
        # the rational form keeps full precision
        wp, _ = conservative_mode_frequencies(1e-8)
        assert wp == pytest.approx(0.5e-16, rel=1e-10)

    def test_branch_sum_is_minus_two(self):
        k = np.linspace(0.0, 10.0, 101)
        wp, wm = conservative_mode_frequencies(k)
        np.testing.assert_allclose(wp + wm, -2.0, rtol=0, atol=1e-15)

    def test_array_shape_and_scalar_type(self):
        wp, wm = conservative_mode_frequencies(np.ones((3,)))
        assert wp.shape == (3,) and wm.shape == (3,)
        wps, wms = conservative_mode_frequencies(2.0)
        assert isinstance(wps, float) and isinstance(wms, float)

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            conservative_mode_frequencies(np.inf)
        with pytest.raises(InputError):
            conservative_mode_frequencies([0.0, np.nan])


class TestStatesAndConfig:
    def test_field_state_requires_matching_grids(self):
        g1 = Grid1D(16, 10.0)
        g2 = Grid1D(32, 10.0)
        a = ComplexField(g1, np.ones(16, dtype=complex))
        b = ComplexField(g2, np.ones(32, dtype=complex))
        with pytest.raises(InputError):
            FieldState(a, b, 0.0)
        st = FieldState(a, ComplexField(g1, np.zeros(16, dtype=complex)), 1.5)
        assert st.grid is g1 and st.t == 1.5

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(dt=0.0, steps=10),
            dict(dt=-0.1, steps=10),
            dict(dt=np.inf, steps=10),
            dict(dt=0.1, steps=0),
            dict(dt=0.1, steps=2.5),
            dict(dt=0.1, steps=10, method="rk4"),
            dict(dt=0.1, steps=10, snapshot_stride=0),
            dict(dt=0.1, steps=10, snapshot_stride=3),
        ],
    )
    def test_config_rejects_bad_values(self, kwargs):
        with pytest.raises(InputError):
            EvolutionConfig(**kwargs)

    def test_config_accepts_numpy_ints(self):
        cfg = EvolutionConfig(dt=0.1, steps=np.int64(10), snapshot_stride=np.int64(5))
        assert cfg.steps == 10


class TestInitialConditions:
    def test_gaussian_packet_unit_norm(self):
        g = Grid1D(256, 200.0)
        psi = gaussian_packet(g, sigma=5.0, kbar=0.3)
        assert g.integrate(np.abs(psi.values) ** 2) == pytest.approx(1.0, rel=1e-12)

    def test_gaussian_packet_warns_when_box_too_small(self):
        g = Grid1D(64, 10.0)
        with pytest.warns(RuntimeWarning, match="clearance"):
            gaussian_packet(g, sigma=1.0, kbar=0.0)

    def test_gaussian_packet_rejects_bad_params(self):
        g = Grid1D(64, 100.0)
        with pytest.raises(InputError):
            gaussian_packet(g, sigma=-1.0, kbar=0.0)
        with pytest.raises(InputError):
            gaussian_packet(g, sigma=1.0, kbar=np.nan)

    def test_plane_wave_requires_grid_mode(self):
        g = Grid1D(64, 2.0 * np.pi)
        psi = plane_wave(g, 3.0, amplitude=2.0j)
        np.testing.assert_allclose(psi.values, 2.0j * np.exp(3j * g.x), atol=1e-14)
        with pytest.raises(InputError):
            plane_wave(g, 3.01)

    def test_plane_wave_rejects_out_of_band_mode(self):
        g = Grid1D(16, 2.0 * np.pi)
        with pytest.raises(InputError):
            plane_wave(g, 8.0)  # index n//2 is the ambiguous Nyquist mode
        plane_wave(g, 7.0)  # highest clean mode is fine

    def test_particle_branch_projection_is_pure(self):
        g = Grid1D(128, 100.0)
        psi = gaussian_packet(g, sigma=4.0, kbar=0.5)
        state = particle_branch_project(psi)
        a_plus, a_minus = branch_amplitudes(state)
        assert np.max(np.abs(a_minus)) < 1e-14 * np.max(np.abs(a_plus))

    def test_branch_amplitudes_identify_antiparticle_branch(self):
        g = Grid1D(64, 8.0 * np.pi)
        psi = plane_wave(g, 1.0)
        _, wm = conservative_mode_frequencies(1.0)
        state = FieldState(psi, ComplexField(g, -1j * wm * psi.values), 0.0)
        a_plus, a_minus = branch_amplitudes(state)
        assert np.max(np.abs(a_plus)) < 1e-13 * np.max(np.abs(a_minus))


class TestExactModeEvolution:
    def test_plane_wave_matches_analytic_phase(self):
        g = Grid1D(64, 8.0 * np.pi)
        k = 1.0
        state = particle_branch_project(plane_wave(g, k))
        cfg = EvolutionConfig(dt=0.25, steps=40, snapshot_stride=10)
        snaps = evolve_field(state, cfg)
        wp, _ = conservative_mode_frequencies(k)
        assert len(snaps) == 5
        for s in snaps:
            expect = np.exp(1j * (k * g.x - wp * s.t))
            np.testing.assert_allclose(s.psi.values, expect, atol=1e-12)
            np.testing.assert_allclose(s.dpsi_dt.values, -1j * wp * expect, atol=1e-12)

    def test_snapshot_times_and_count(self):
        g = Grid1D(32, 10.0)
        state = particle_branch_project(gaussian_packet(g, sigma=0.8, kbar=0.0))
        snaps = evolve_field(state, EvolutionConfig(dt=0.5, steps=6, snapshot_stride=2))
        assert [s.t for s in snaps] == [0.0, 1.0, 2.0, 3.0]

    def test_return_triples_bracket_each_snapshot(self):
        g = Grid1D(64, 8.0 * np.pi)
        k = 1.0
        state = particle_branch_project(plane_wave(g, k))
        cfg = EvolutionConfig(dt=0.2, steps=10, snapshot_stride=5)
        snaps, trips = evolve_field(state, cfg, return_triples=True)
        wp, _ = conservative_mode_frequencies(k)
        assert len(trips) == len(snaps)
        for s, (before, after) in zip(snaps, trips):
            np.testing.assert_allclose(
                before, np.exp(1j * (k * g.x - wp * (s.t - cfg.dt))), atol=1e-12
            )
            np.testing.assert_allclose(
                after, np.exp(1j * (k * g.x - wp * (s.t + cfg.dt))), atol=1e-12
            )

    def test_rejects_nonzero_potential(self):
        g = Grid1D(32, 10.0)
        state = particle_branch_project(gaussian_packet(g, sigma=0.8, kbar=0.0))
        cfg = EvolutionConfig(dt=0.1, steps=2)
        with pytest.raises(UnsupportedError):
            evolve_field(state, cfg, potential=np.ones(g.n))
        # an identically zero potential is the free problem
        snaps = evolve_field(state, cfg, potential=np.zeros(g.n))
        assert len(snaps) == 3

    def test_potential_validation(self):
        g = Grid1D(32, 10.0)
        state = particle_branch_project(gaussian_packet(g, sigma=0.8, kbar=0.0))
        cfg = EvolutionConfig(dt=0.1, steps=2)
        with pytest.raises(InputError):
            evolve_field(state, cfg, potential=np.ones(g.n + 1))
        with pytest.raises(InputError):
            evolve_field(state, cfg, potential=np.full(g.n, np.nan))


class TestStepperEvolution:
    def test_light_cone_limit_enforced(self):
        g = Grid1D(64, 8.0 * np.pi)  # dx ~ 0.39
        state = particle_branch_project(plane_wave(g, 1.0))
        with pytest.raises(InputError, match="light-cone"):
            evolve_field(state, EvolutionConfig(dt=0.3, steps=2, method="stepper"))

    def test_oscillation_limit_enforced(self):
        g = Grid1D(16, 32.0)  # dx = 2, so 0.1 <= dt < 1 trips only the second check
        state = particle_branch_project(plane_wave(g, 2.0 * np.pi / 32.0))
        with pytest.raises(InputError, match="oscillation"):
            evolve_field(state, EvolutionConfig(dt=0.15, steps=2, method="stepper"))

    def test_stepper_tracks_exact_solution(self):
        g = Grid1D(64, 8.0 * np.pi)
        k = 1.0
        state = particle_branch_project(plane_wave(g, k))
        cfg = EvolutionConfig(dt=0.01, steps=200, method="stepper", snapshot_stride=200)
        final = evolve_field(state, cfg)[-1]
        wp, _ = conservative_mode_frequencies(k)
        expect = np.exp(1j * (k * g.x - wp * final.t))
        assert np.max(np.abs(final.psi.values - expect)) < 1e-4

    def test_stepper_triples_are_consistent_three_level_stencils(self):
        g = Grid1D(64, 8.0 * np.pi)
        state = particle_branch_project(gaussian_packet(g, sigma=2.0, kbar=0.4))
        cfg = EvolutionConfig(dt=0.02, steps=20, method="stepper", snapshot_stride=10)
        snaps, trips = evolve_field(state, cfg, return_triples=True)
        for s, (before, after) in zip(snaps, trips):
            np.testing.assert_allclose(
                s.dpsi_dt.values, (after - before) / (2.0 * cfg.dt), atol=1e-13
            )

    def test_potential_shifts_phase(self):
        # constant U adds exp(-i U t) on the slow branch to leading order;
        # just check the run differs from the free one and stays bounded
        g = Grid1D(64, 8.0 * np.pi)
        state = particle_branch_project(plane_wave(g, 1.0))
        cfg = EvolutionConfig(dt=0.02, steps=100, method="stepper", snapshot_stride=100)
        free = evolve_field(state, cfg)[-1]
        held = evolve_field(state, cfg, potential=np.full(g.n, 0.05))[-1]
        diff = np.max(np.abs(free.psi.values - held.psi.values))
        assert 1e-3 < diff < 1.0
        assert np.max(np.abs(held.psi.values)) < 2.0


class TestDensityModeState:
    def test_scalar_inputs_are_promoted(self):
        st = DensityModeState(k=0.5, derivs=np.array([1.0, 0.0, 0.0, 0.0]))
        assert st.k.shape == (1,) and st.derivs.shape == (1, 4)
        assert st.rho[0] == 1.0

    @pytest.mark.parametrize(
        "k,derivs",
        [
            (0.5, np.ones(3)),
            (0.5, np.ones((2, 4))),
            (-0.5, np.ones(4)),
            (np.nan, np.ones(4)),
            (0.5, np.array([1.0, np.inf, 0.0, 0.0])),
        ],
    )
    def test_rejects_malformed_input(self, k, derivs):
        with pytest.raises(InputError):
            DensityModeState(k=k, derivs=derivs)


class TestDensityEvolution:
    def test_conservative_model_is_rejected(self):
        st = DensityModeState(k=1.0, derivs=np.array([1.0, 0.0, 0.0, 0.0]))
        with pytest.raises(InputError):
            evolve_density(conservative(), st, 1.0)
        with pytest.raises(InputError):
            evolve_density(collisional(1.0), st, np.inf)

    def test_matches_rk4_oracle(self):
        params = collisional(1.0)
        y0 = np.array([1.0, 0.2 - 0.1j, -0.3, 0.05j])
        st = DensityModeState(k=0.7, derivs=y0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            out = evolve_density(params, st, 2.0)
        ref = rk4_density_mode(params, 0.7, y0, 2.0, dt=0.0005)
        np.testing.assert_allclose(out.derivs[0], ref, rtol=1e-9, atol=1e-12)

    @pytest.mark.parametrize(
        "params",
        [
            radiative(1.0),
            phase_diffusion(1.0),
            dalembert_diffusion(0.3),
        ],
    )
    def test_matches_rk4_oracle_all_models(self, params):
        y0 = np.array([1.0, 0.0, -0.5, 0.1])
        st = DensityModeState(k=0.4, derivs=y0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            out = evolve_density(params, st, 1.5)
        ref = rk4_density_mode(params, 0.4, y0, 1.5, dt=0.0005)
        np.testing.assert_allclose(out.derivs[0], ref, rtol=1e-8, atol=1e-12)

    def test_semigroup_property(self):
        params = phase_diffusion(0.8)
        st = DensityModeState(
            k=np.array([0.3, 1.2]),
            derivs=np.array([[1.0, 0.1, 0.0, 0.0], [0.5j, 0.0, 0.2, 0.0]]),
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            once = evolve_density(params, st, 5.0)
            twice = evolve_density(params, evolve_density(params, st, 2.0), 3.0)
        np.testing.assert_allclose(twice.derivs, once.derivs, rtol=1e-10, atol=1e-12)
        assert twice.t == pytest.approx(once.t)

    def test_growing_modes_warn(self):
        st = DensityModeState(k=0.0, derivs=np.array([1.0, 0.0, 0.0, 0.0]))
        with pytest.warns(RuntimeWarning, match="growing"):
            evolve_density(radiative(1.0), st, 0.1)

    def test_fully_damped_model_does_not_warn(self):
        st = DensityModeState(k=0.5, derivs=np.array([1.0, 0.0, 0.0, 0.0]))
        with warnings.catch_warnings():
            warnings.simplefilter("error", RuntimeWarning)
            out = evolve_density(dalembert_diffusion(1.0), st, 3.0)
        assert abs(out.rho[0]) < 1.0

    def test_overflow_raises_numerical_failure(self):
        st = DensityModeState(k=0.0, derivs=np.array([1.0, 0.0, 0.0, 0.0]))
        with pytest.warns(RuntimeWarning, match="growing"):
            with pytest.raises(NumericalFailureError):
                with np.errstate(over="ignore", invalid="ignore"):
                    evolve_density(radiative(100.0), st, 10.0)


class TestFrequencyFit:
    def test_recovers_complex_frequency(self):
        omega = 0.37 - 0.021j
        t = np.linspace(0.0, 40.0, 81)
        v = (1.3 - 0.4j) * np.exp(-1j * omega * t)
        fit = fit_mode_frequency(t, v)
        assert fit.omega == pytest.approx(omega, abs=1e-12)
        assert fit.amplitude == pytest.approx(1.3 - 0.4j, rel=1e-12)
        assert fit.residual < 1e-12
        assert not fit.poor_fit

    def test_flags_two_mode_mixture(self):
        t = np.linspace(0.0, 40.0, 81)
        v = np.exp(-0.4j * t) + 0.3 * np.exp(1.1j * t)
        fit = fit_mode_frequency(t, v)
        assert fit.poor_fit

    @pytest.mark.parametrize(
        "t,v",
        [
            ([0.0, 1.0, 2.0], [1.0, 1.0, 1.0]),
            ([0.0, 1.0, 2.0, 3.5], [1.0, 1.0, 1.0, 1.0]),
            ([0.0, 1.0, 2.0, 1.5], [1.0, 1.0, 1.0, 1.0]),
            ([0.0, 1.0, 2.0, 3.0], [1.0, 0.0, 1.0, 1.0]),
        ],
    )
    def test_rejects_bad_series(self, t, v):
        with pytest.raises(InputError):
            fit_mode_frequency(t, v)
