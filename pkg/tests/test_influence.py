"""Tests for influence coefficients, reorganization energies and the QUAPI
counter term.  The closed forms are pinned by a brute-force window-quadrature
oracle."""

import numpy as np
import pytest

import bathkit as bk


UNIT = bk.ExponentialSeries([1.0], [-1.0])


def alpha_of(series):
    return lambda x: complex(series(x)) if x >= 0 else np.conj(
        complex(series(-x)))


class TestEtaTrotter:
    def test_lag2_analytic(self):
        grid = bk.eta_trotter(UNIT, 1.0, 5)
        expected = 4.0 * np.sinh(0.5) ** 2 * np.exp(-2.0)
        assert grid.kernel(2) == pytest.approx(expected, abs=1e-12)
        assert grid.kernel(2) == pytest.approx(0.147003, abs=1e-5)

    def test_diagonal_analytic(self):
        grid = bk.eta_trotter(UNIT, 1.0, 3)
        assert grid.diag[0] == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_small_step_limits(self):
        series = bk.ExponentialSeries([0.8 - 0.1j, 0.2 + 0.1j],
                                      [-1.0 + 4j, -3.0])
        dt = 1e-3 / 5.0  # 1e-3 / max|omega|
        grid = bk.eta_trotter(series, dt, 3)
        alpha0 = complex(series(0.0))
        assert abs(grid.diag[0] / (alpha0 * dt**2 / 2.0) - 1.0) < 0.01
        for m in (1, 2, 3):
            alpha_m = complex(series(m * dt))
            assert abs(grid.kernel(m) / (alpha_m * dt**2) - 1.0) < 0.01

    def test_lag_property_and_value_accessor(self):
        grid = bk.eta_trotter(UNIT, 0.5, 6)
        assert grid.value(4, 1) == grid.value(5, 2)
        assert grid.value(3, 3) == grid.diag[3]

    def test_tiny_rate_stable(self):
        # |omega| dt ~ 1e-9 exercises the cancellation-safe branch
        series = bk.ExponentialSeries([1.0], [-1e-9])
        grid = bk.eta_trotter(series, 1.0, 2)
        assert grid.diag[0] == pytest.approx(0.5, rel=1e-6)
        assert grid.kernel(1) == pytest.approx(1.0, rel=1e-6)

    def test_rejects_growing_series(self):
        with pytest.raises(bk.InvalidInputError):
            bk.eta_trotter(bk.ExponentialSeries([1.0], [0.1]), 1.0, 2)

    def test_rejects_bad_grid(self):
        with pytest.raises(bk.InvalidInputError):
            bk.eta_trotter(UNIT, 0.0, 2)
        with pytest.raises(bk.InvalidInputError):
            bk.eta_trotter(UNIT, 1.0, 0)


class TestEtaStrang:
    def test_corner_analytic(self):
        grid = bk.eta_strang(UNIT, 1.0, 4)
        assert grid.diag[0] == pytest.approx(np.exp(-0.5) - 0.5, rel=1e-12)
        assert grid.diag[0] == pytest.approx(0.1065307, abs=1e-6)
        assert grid.diag[4] == grid.diag[0]

    def test_interior_matches_trotter(self):
        trotter = bk.eta_trotter(UNIT, 0.7, 5)
        strang = bk.eta_strang(UNIT, 0.7, 5)
        assert strang.value(3, 1) == trotter.value(3, 1)
        assert strang.diag[2] == trotter.diag[2]

    def test_boundary_window_oracles(self):
        dt, N = 1.0, 4
        grid = bk.eta_strang(UNIT, dt, N)
        fn = alpha_of(UNIT)
        k = 2
        k0 = bk.eta_oracle(fn, (k * dt - dt / 2, k * dt + dt / 2),
                           (0.0, dt / 2))
        assert grid.eta_k0[k - 1] == pytest.approx(k0, rel=1e-9)
        nk = bk.eta_oracle(fn, (N * dt - dt / 2, N * dt),
                           (k * dt - dt / 2, k * dt + dt / 2))
        assert grid.eta_Nk[k - 1] == pytest.approx(nk, rel=1e-9)
        n0 = bk.eta_oracle(fn, (N * dt - dt / 2, N * dt), (0.0, dt / 2))
        assert grid.eta_N0 == pytest.approx(n0, rel=1e-9)

    def test_small_step_boundary_ratios(self):
        # half and quarter window areas relative to the Trotter windows
        series = bk.ExponentialSeries([1.0], [-1.0])
        dt = 1e-4
        trotter = bk.eta_trotter(series, dt, 4)
        strang = bk.eta_strang(series, dt, 4)
        assert abs(strang.diag[0] / (trotter.diag[0] / 4.0) - 1.0) < 0.01
        assert abs(strang.eta_k0[1] / (trotter.kernel(2) / 2.0) - 1.0) < 0.01
        assert abs(strang.eta_N0 / (trotter.kernel(4) / 4.0) - 1.0) < 0.01

    def test_requires_two_steps(self):
        with pytest.raises(bk.InvalidInputError):
            bk.eta_strang(UNIT, 1.0, 1)


class TestEtaOracle:
    def test_rectangle_matches_trotter(self):
        grid = bk.eta_trotter(UNIT, 1.0, 3)
        val = bk.eta_oracle(alpha_of(UNIT), (2.0, 3.0), (0.0, 1.0))
        assert grid.kernel(2) == pytest.approx(val, rel=1e-10)

    def test_triangle_analytic(self):
        val = bk.eta_oracle(alpha_of(UNIT), (0.0, 1.0), None, triangular=True)
        assert val == pytest.approx(np.exp(-1.0), rel=1e-10)

    def test_zero_width(self):
        assert bk.eta_oracle(alpha_of(UNIT), (1.0, 1.0), (0.0, 1.0)) == 0.0


class TestReorganizationEnergy:
    def test_powerlaw_analytic(self):
        assert bk.reorganization_energy(
            bk.PowerLaw.create(1.0, 1.0, 2.0)) == pytest.approx(2.0,
                                                                rel=1e-14)

    def test_gldd_sum(self):
        J = bk.GLDD([bk.LorentzianTerm(0.3, 1.0),
                     bk.LorentzianTerm(0.7, 2.5, 1.0)])
        assert bk.reorganization_energy(J) == pytest.approx(1.0, rel=1e-14)

    def test_meier_tannor_vs_quadrature(self):
        import scipy.integrate as si
        J = bk.MeierTannor([bk.LorentzianTerm(1.0, 1.0, 1.0),
                            bk.LorentzianTerm(0.4, 2.0, 0.5)])
        analytic = bk.reorganization_energy(J)
        quad, _ = si.quad(
            lambda w: bk.eval_spectral_density(J, w) / w if w > 0 else
            np.pi / 2 * (1.0 / (1 + 1) ** 1 / (1 + 1) + 0.4 / 4.25**2),
            0.0, np.inf, limit=300)
        assert analytic == pytest.approx(quad, rel=1e-8)

    def test_tgldd_needs_context(self):
        J = bk.TGLDD([bk.LorentzianTerm(1.0, 1.0)])
        with pytest.raises(bk.InvalidInputError):
            bk.reorganization_energy(J)
        value = bk.reorganization_energy(J, bk.ThermalContext(beta=2.0))
        assert np.isfinite(value) and value > 0

    def test_tabulated(self):
        # triangle density: integral of J/w over [0, 2] with J = w on [0,1],
        # 2 - w on [1, 2] gives 1 + 2 ln 2 - 1 = 2 ln 2
        J = bk.Tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
        assert bk.reorganization_energy(J) == pytest.approx(
            2.0 * np.log(2.0), rel=1e-10)

    def test_divergent_cases(self):
        with pytest.raises(bk.DivergenceError):
            bk.reorganization_energy(bk.PowerLaw.create(1.0, 0.0, 1.0))
        with pytest.raises(bk.DivergenceError):
            bk.reorganization_energy(bk.Tabulated([0.0, 1.0], [1.0, 0.0]))


class TestQuapiCorrect:
    def test_shift_value(self):
        ctx = bk.ThermalContext(beta=1.0)
        grid = bk.eta_trotter(UNIT, 1.0, 4)
        shifted = bk.quapi_correct(grid, np.pi, ctx)
        assert np.all(shifted.diag - grid.diag == 1j)

    def test_off_diagonal_unchanged(self):
        ctx = bk.ThermalContext(beta=1.0, hbar=2.0)
        grid = bk.eta_strang(UNIT, 0.5, 4)
        shifted = bk.quapi_correct(grid, 1.3, ctx)
        assert np.array_equal(shifted.lag_kernel, grid.lag_kernel)
        assert np.array_equal(shifted.eta_k0, grid.eta_k0)
        assert np.array_equal(shifted.eta_Nk, grid.eta_Nk)
        assert shifted.eta_N0 == grid.eta_N0
        expected = 1j * 0.5 * 1.3 / (2.0 * np.pi)
        assert shifted.diag[0] - grid.diag[0] == expected

    def test_zero_lambda_identity(self):
        ctx = bk.ThermalContext(beta=1.0)
        grid = bk.eta_trotter(UNIT, 1.0, 3)
        assert np.array_equal(bk.quapi_correct(grid, 0.0, ctx).diag,
                              grid.diag)

    def test_inverse(self):
        ctx = bk.ThermalContext(beta=1.0)
        grid = bk.eta_trotter(UNIT, 1.0, 3)
        back = bk.quapi_correct(bk.quapi_correct(grid, 0.7, ctx), 0.0, ctx)
        twice = bk.quapi_correct(grid, 0.7, ctx)
        restored = twice.diag - 1j * twice.dt * 0.7 / (ctx.hbar * np.pi)
        assert np.array_equal(restored, grid.diag)
        assert np.array_equal(back.diag, twice.diag)

    def test_negative_lambda_rejected(self):
        ctx = bk.ThermalContext(beta=1.0)
        grid = bk.eta_trotter(UNIT, 1.0, 3)
        with pytest.raises(bk.InvalidInputError):
            bk.quapi_correct(grid, -1.0, ctx)
