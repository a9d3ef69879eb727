"""Eigenvalue solvers and the relativistic energy map."""

import numpy as np
import pytest

from rqbm.errors import DomainError, InputError, UnsupportedError
from rqbm.grid import Grid1D
from rqbm.spectrum import (
    Box,
    Free,
    Harmonic,
    Tabulated,
    box_levels,
    harmonic_levels,
    nonrel_eigen,
    nonrel_eigen_richardson,
    relativistic_map,
)


class TestAnalyticLevels:
    def test_harmonic_ladder(self):
        np.testing.assert_allclose(
            harmonic_levels(0.4, 4), [0.2, 0.6, 1.0, 1.4], rtol=1e-15
        )

    def test_box_ladder(self):
        w = 3.0
        expect = np.pi**2 * np.array([1, 4, 9]) / (2.0 * w * w)
        np.testing.assert_allclose(box_levels(w, 3), expect, rtol=1e-15)


class TestPotentialSpecs:
    def test_parameter_validation(self):
        with pytest.raises(InputError):
            Harmonic(0.0)
        with pytest.raises(InputError):
            Harmonic(np.inf)
        with pytest.raises(InputError):
            Box(-1.0)
        with pytest.raises(InputError):
            Tabulated(np.ones((2, 2)))
        with pytest.raises(InputError):
            Tabulated(np.array([1.0, np.nan]))


class TestNonrelEigen:
    def test_free_spectrum_is_exact_plane_waves(self):
        g = Grid1D(64, 10.0)
        eps = nonrel_eigen(Free(), g, 5)
        k1 = 2.0 * np.pi / g.length
        np.testing.assert_allclose(
            eps, [0.0, k1**2 / 2, k1**2 / 2, 2 * k1**2, 2 * k1**2], atol=1e-15
        )

    def test_harmonic_matches_analytic_ladder(self):
        g = Grid1D(512, 40.0)
        omega0 = 0.5
        eps = nonrel_eigen(Harmonic(omega0), g, 6)
        np.testing.assert_allclose(eps, harmonic_levels(omega0, 6), rtol=2e-3)

    def test_richardson_beats_plain_grid(self):
        g = Grid1D(256, 40.0)
        omega0 = 0.5
        exact = harmonic_levels(omega0, 4)
        plain = np.abs(nonrel_eigen(Harmonic(omega0), g, 4) - exact)
        refined = np.abs(nonrel_eigen_richardson(Harmonic(omega0), g, 4) - exact)
        assert np.all(refined < 1e-2 * plain)

    def test_box_uses_its_own_mesh(self):
        w = 2.0
        eps_a = nonrel_eigen(Box(w), Grid1D(400, 10.0), 3)
        eps_b = nonrel_eigen(Box(w), Grid1D(400, 999.0), 3)
        np.testing.assert_allclose(eps_a, eps_b, rtol=1e-15)
        np.testing.assert_allclose(eps_a, box_levels(w, 3), rtol=1e-4)

    def test_tabulated_matches_harmonic(self):
        g = Grid1D(512, 40.0)
        omega0 = 0.5
        tab = Tabulated(0.5 * omega0**2 * g.x**2)
        np.testing.assert_allclose(
            nonrel_eigen(tab, g, 4), nonrel_eigen(Harmonic(omega0), g, 4), rtol=1e-13
        )

    def test_tabulated_length_checked(self):
        g = Grid1D(64, 10.0)
        with pytest.raises(InputError):
            nonrel_eigen(Tabulated(np.zeros(65)), g, 2)

    def test_tabulated_cannot_be_refined(self):
        g = Grid1D(64, 10.0)
        with pytest.raises(UnsupportedError):
            nonrel_eigen_richardson(Tabulated(np.zeros(64)), g, 2)

    def test_count_guards(self):
        g = Grid1D(64, 10.0)
        with pytest.raises(InputError):
            nonrel_eigen(Free(), g, 0)
        with pytest.raises(InputError):
            nonrel_eigen(Free(), g, 2.5)
        with pytest.raises(InputError):
            nonrel_eigen(Free(), g, 17)  # > n/4
        assert len(nonrel_eigen(Free(), g, 16)) == 16


class TestRelativisticMap:
    def test_values_and_series(self):
        res = relativistic_map([0.0, 0.04, 1.5])
        np.testing.assert_allclose(res.E, np.sqrt([1.0, 1.08, 4.0]), rtol=1e-15)
        np.testing.assert_allclose(
            res.E_series, [1.0, 1.0392, 1.375], rtol=1e-12
        )
        np.testing.assert_allclose(
            res.rel_gap, np.abs(res.E - res.E_series) / res.E, rtol=1e-13
        )

    def test_series_gap_shrinks_cubically(self):
        # E - E_series = eps^3/2 + O(eps^4)
        res = relativistic_map([1e-3])
        assert res.E[0] - res.E_series[0] == pytest.approx(0.5e-9, rel=1e-2)

    def test_scalar_input_promoted(self):
        res = relativistic_map(0.12)
        assert res.E.shape == (1,)

    def test_domain_error_names_offender(self):
        with pytest.raises(DomainError, match="index 2"):
            relativistic_map([0.0, 0.1, -0.6])
        with pytest.raises(DomainError):
            relativistic_map([-0.5])  # boundary itself is excluded

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            relativistic_map([0.1, np.nan])
