"""Tests for the exponential-sum fitting layer."""

import numpy as np
import pytest

import bathkit as bk
from bathkit.fit import _pack, objective_jacobian, objective_residuals


def make_samples(series, t_end=10.0, n=201, weights=None):
    t = np.linspace(0.0, t_end, n)
    return bk.AlphaSamples(t, series(t), weights)


class TestObjective:
    def test_exact_model_gives_zero(self):
        series = bk.ExponentialSeries([1.0 + 0.5j, 0.3 - 0.5j],
                                      [-1.0 + 2j, -0.4])
        samples = make_samples(series)
        res = objective_residuals(_pack(series), samples)
        assert np.max(np.abs(res)) < 1e-13

    def test_zero_weights_give_zero(self):
        series = bk.ExponentialSeries([1.0], [-1.0])
        t = np.linspace(0.0, 5.0, 11)
        samples = bk.AlphaSamples(t, np.cos(t) + 0j, np.zeros_like(t))
        res = objective_residuals(_pack(series), samples)
        assert np.all(res == 0.0)

    def test_bad_parameter_vector(self):
        samples = make_samples(bk.ExponentialSeries([1.0], [-1.0]))
        with pytest.raises(bk.InvalidInputError):
            objective_residuals(np.zeros(6), samples)

    def test_jacobian_matches_finite_differences(self):
        rng = np.random.default_rng(8)
        samples = make_samples(
            bk.ExponentialSeries([0.7, 0.3], [-0.5 + 3j, -2.0 - 1j]),
            t_end=5.0, n=41)
        for _ in range(5):
            K = int(rng.integers(1, 4))
            x = np.empty(4 * K)
            x[0::4] = rng.standard_normal(K)
            x[1::4] = rng.standard_normal(K)
            x[2::4] = -rng.uniform(0.1, 3.0, K)
            x[3::4] = rng.standard_normal(K)
            jac = objective_jacobian(x, samples)
            step = 1e-6
            for i in range(x.size):
                xp, xm = x.copy(), x.copy()
                xp[i] += step
                xm[i] -= step
                fd = (objective_residuals(xp, samples)
                      - objective_residuals(xm, samples)) / (2 * step)
                assert np.max(np.abs(jac[:, i] - fd)) <= 1e-6


class TestStartingValuesPade:
    def test_term_count(self):
        ctx = bk.ThermalContext(beta=1.0)
        J = bk.GLDD([bk.LorentzianTerm(1.0, 1.0, 0.0)])
        start = bk.starting_values_pade(J, ctx, 3)
        assert start.count == 3  # 2 pole terms + 1 approximant term

    def test_k_too_small(self):
        ctx = bk.ThermalContext(beta=1.0)
        J = bk.GLDD([bk.LorentzianTerm(1.0, 1.0, 0.0),
                     bk.LorentzianTerm(0.5, 2.0, 1.0)])
        with pytest.raises(bk.InvalidInputError):
            bk.starting_values_pade(J, ctx, 3)

    def test_fit_preserves_series_quality(self):
        # fitting from the analytic start cannot make the residual worse
        ctx = bk.ThermalContext(beta=1.0)
        J = bk.GLDD([bk.LorentzianTerm(1.0, 1.0, 0.0)])
        start = bk.starting_values_pade(J, ctx, 6)
        t = np.linspace(0.0, 5.0, 101)[1:]
        t = np.concatenate([[0.0], t])
        alpha = np.array([complex(start(ti)) if ti == 0.0
                          else bk.alpha_quadrature(J, ctx, float(ti))
                          for ti in t])
        alpha[0] = alpha[0].real
        samples = bk.AlphaSamples(t, alpha)
        initial = objective_residuals(_pack(start), samples)
        initial_rms = np.sqrt(np.sum(initial**2) / t.size)
        result = bk.fit_exponentials(samples, start,
                                     bk.FitConfig(K=6))
        # rms_residual is on the scaled problem; compare in scaled units
        scale = np.max(np.abs(alpha))
        assert result.rms_residual <= initial_rms / scale + 1e-12

    def test_unsupported_family(self):
        ctx = bk.ThermalContext(beta=1.0)
        with pytest.raises(bk.InvalidInputError):
            bk.starting_values_pade(bk.PowerLaw.create(1, 1, 1), ctx, 2)


class TestStartingValuesHeuristic:
    def test_pure_decay(self):
        t = np.linspace(0.0, 10.0, 201)
        with pytest.warns(UserWarning, match="no usable minimum"):
            start = bk.starting_values_heuristic(
                bk.AlphaSamples(t, np.exp(-t) + 0j))
        assert start.p[0] == 1.0
        assert start.omega[0].imag == 0.0
        assert start.omega[0].real == pytest.approx(-1.0, rel=0.3)

    def test_oscillation_frequency(self):
        t = np.linspace(0.0, 10.0, 201)
        start = bk.starting_values_heuristic(
            bk.AlphaSamples(t, np.exp((-1.0 + 5.0j) * t)))
        assert start.omega[0].imag == pytest.approx(5.0, rel=0.2)
        assert start.omega[0].real < 0

    def test_zero_amplitude(self):
        t = np.linspace(0.0, 10.0, 51)
        with pytest.raises(bk.ZeroAmplitudeError):
            bk.starting_values_heuristic(bk.AlphaSamples(t, 0j * t))


class TestScalingTransform:
    def test_round_trip(self):
        transform = bk.ScalingTransform(t_scale=3.7, a_scale=0.021)
        series = bk.ExponentialSeries([1.3 - 0.2j], [-0.8 + 2.5j])
        back = transform.unscale_series(transform.scale_series(series))
        assert back.p[0] == pytest.approx(series.p[0], rel=1e-15)
        assert back.omega[0] == pytest.approx(series.omega[0], rel=1e-15)

    def test_objective_invariance(self):
        # the scaled-problem objective, rescaled, equals the direct one
        truth = bk.ExponentialSeries([0.02], [-0.3 + 1j])
        samples = make_samples(truth, t_end=20.0)
        transform = bk.ScalingTransform.for_samples(samples)
        scaled_samples = transform.scale_samples(samples)
        trial = bk.ExponentialSeries([0.015], [-0.4 + 0.9j])
        direct = objective_residuals(_pack(trial), samples)
        scaled = objective_residuals(
            _pack(transform.scale_series(trial)), scaled_samples)
        assert np.max(np.abs(scaled * transform.a_scale - direct)) \
            <= 1e-12 * np.max(np.abs(direct))


class TestFitExponentials:
    def test_single_term_round_trip(self):
        samples = make_samples(bk.ExponentialSeries([1.0], [-1.0]))
        start = bk.ExponentialSeries([0.9], [-1.2])
        result = bk.fit_exponentials(samples, start, bk.FitConfig(K=1))
        assert result.rms_residual <= 1e-8
        assert result.series.p[0] == pytest.approx(1.0, abs=1e-6)
        assert result.series.omega[0] == pytest.approx(-1.0, abs=1e-6)

    def test_two_term_round_trip(self):
        truth = bk.ExponentialSeries([0.7, 0.3], [-0.5 + 3j, -2.0 - 1j])
        samples = make_samples(truth)
        start = bk.ExponentialSeries([0.6 + 0.1j, 0.4],
                                     [-0.4 + 2.8j, -1.5 - 0.8j])
        result = bk.fit_exponentials(samples, start, bk.FitConfig(K=2))
        assert result.rms_residual <= 1e-6

    def test_infeasible_start_projected(self):
        samples = make_samples(bk.ExponentialSeries([1.0], [-1.0]))
        start = bk.ExponentialSeries([0.9], [0.5])  # growing: infeasible
        result = bk.fit_exponentials(samples, start, bk.FitConfig(K=1))
        assert result.rms_residual <= 1e-8
        assert result.series.omega[0].real < 0

    def test_constraint_respected(self):
        samples = make_samples(bk.ExponentialSeries([1.0], [-1.0]))
        config = bk.FitConfig(K=1)
        result = bk.fit_exponentials(samples,
                                     bk.ExponentialSeries([0.9], [-1.2]),
                                     config)
        eps_unscaled = config.epsilon / samples.t[-1]
        assert result.series.omega[0].real <= -eps_unscaled * (1 - 1e-12)

    def test_k_mismatch(self):
        samples = make_samples(bk.ExponentialSeries([1.0], [-1.0]))
        with pytest.raises(bk.InvalidInputError):
            bk.fit_exponentials(samples, bk.ExponentialSeries([1.0], [-1.0]),
                                bk.FitConfig(K=2))

    def test_iteration_cap_gives_nonconverged(self):
        truth = bk.ExponentialSeries([0.7, 0.3], [-0.5 + 3j, -2.0 - 1j])
        samples = make_samples(truth)
        start = bk.ExponentialSeries([0.1, 0.1], [-3.0, -0.1 + 1j])
        result = bk.fit_exponentials(samples, start,
                                     bk.FitConfig(K=2, max_iterations=2))
        assert not result.converged


class TestIncrementalFit:
    def test_ladder_monotone(self):
        truth = bk.ExponentialSeries([0.7, 0.3, 0.5],
                                     [-0.5 + 3j, -2.0 - 1j, -1.2 + 0.4j])
        samples = make_samples(truth)
        ladder = bk.incremental_fit(samples, 3, bk.FitConfig(rng_seed=1))
        rms = [r.rms_residual for r in ladder]
        assert all(b <= a + 1e-10 for a, b in zip(rms, rms[1:]))
        assert rms[-1] <= 1e-6

    def test_seed_determinism(self):
        truth = bk.ExponentialSeries([0.7, 0.3], [-0.5 + 3j, -2.0 - 1j])
        samples = make_samples(truth)
        a = bk.incremental_fit(samples, 2, bk.FitConfig(rng_seed=5))
        b = bk.incremental_fit(samples, 2, bk.FitConfig(rng_seed=5))
        for ra, rb in zip(a, b):
            assert np.array_equal(ra.series.p, rb.series.p)
            assert np.array_equal(ra.series.omega, rb.series.omega)
            assert ra.rms_residual == rb.rms_residual

    def test_kmax_one_equals_single_fit(self):
        samples = make_samples(bk.ExponentialSeries([1.0], [-1.0]))
        config = bk.FitConfig(rng_seed=2)
        with pytest.warns(UserWarning):
            ladder = bk.incremental_fit(samples, 1, config)
        with pytest.warns(UserWarning):
            start = bk.starting_values_heuristic(samples)
        single = bk.fit_exponentials(samples, start, config)
        assert len(ladder) == 1
        assert np.array_equal(ladder[0].series.p, single.series.p)
        assert np.array_equal(ladder[0].series.omega, single.series.omega)

    def test_invalid_kmax(self):
        samples = make_samples(bk.ExponentialSeries([1.0], [-1.0]))
        with pytest.raises(bk.InvalidInputError):
            bk.incremental_fit(samples, 0, bk.FitConfig())
