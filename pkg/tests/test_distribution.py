"""IBL density, validation and sampler."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from iblmm.distribution import IblParams, log_pdf, sample, validate

# term-by-term mpmath evaluation at alpha=[2,3], u=4, v=5, x=[0.3,0.7]
LOGPDF_D2 = -0.03595106428565878

pos = st.floats(0.5, 5.0)


def _density_on_unit_square(params):
    """exp(log_pdf) after x = t / (1 - t) in every coordinate."""
    def f(*t):
        t = np.array(t[::-1])
        x = t / (1 - t)
        jac = np.prod(1 / (1 - t) ** 2)
        return math.exp(log_pdf(x, params)) * jac
    return f


class TestValidate:
    def test_ok(self):
        validate(IblParams([1.0, 2.0], 3.0, 4.0))

    @pytest.mark.parametrize("params, msg", [
        (IblParams([1.0, -2.0], 3.0, 4.0), "alpha[1] <= 0"),
        (IblParams([1.0], 0.0, 4.0), "u <= 0"),
        (IblParams([1.0], 1.0, -4.0), "v <= 0"),
        (IblParams([np.nan], 1.0, 1.0), "alpha[0] is not finite"),
    ])
    def test_reports_first_violation(self, params, msg):
        with pytest.raises(ValueError, match=msg.replace("[", r"\[").replace("]", r"\]")):
            validate(params)

    def test_alpha_read_only(self):
        p = IblParams([1.0, 2.0], 1.0, 1.0)
        with pytest.raises(ValueError):
            p.alpha[0] = 5.0

    def test_dict_round_trip(self):
        p = IblParams([1.5, 2.0], 3.0, 4.25)
        assert IblParams.from_dict(p.to_dict()) == p


class TestLogPdf:
    def test_one_dim_reduces_to_beta_prime_uniform(self):
        assert log_pdf([1.0], IblParams([5.0], 1.0, 1.0)) == pytest.approx(math.log(0.25), abs=1e-12)

    def test_one_dim_beta_prime(self):
        expected = math.log(12 * 0.5 * 1.5 ** -5)
        assert log_pdf([0.5], IblParams([3.0], 2.0, 3.0)) == pytest.approx(expected, abs=1e-12)

    def test_two_dim_oracle(self):
        got = log_pdf([0.3, 0.7], IblParams([2.0, 3.0], 4.0, 5.0))
        assert got == pytest.approx(LOGPDF_D2, abs=1e-12)

    def test_matrix_rows(self):
        p = IblParams([2.0, 3.0], 4.0, 5.0)
        X = np.array([[0.3, 0.7], [1.0, 2.0]])
        np.testing.assert_allclose(log_pdf(X, p), [log_pdf(X[0], p), log_pdf(X[1], p)])

    @pytest.mark.parametrize("x", [[0.0, 1.0], [-1.0, 1.0], [np.inf, 1.0]])
    def test_rejects_non_positive(self, x):
        with pytest.raises(ValueError):
            log_pdf(x, IblParams([2.0, 3.0], 4.0, 5.0))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            log_pdf([1.0, 2.0, 3.0], IblParams([2.0, 3.0], 4.0, 5.0))

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            log_pdf([1.0], IblParams([2.0], -4.0, 5.0))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(pos, min_size=1, max_size=6), pos, pos, st.integers(0, 2**32 - 1))
    def test_finite(self, alpha, u, v, seed):
        x = np.random.default_rng(seed).lognormal(0, 3, size=len(alpha))
        assert np.isfinite(log_pdf(x, IblParams(alpha, u, v)))

    @pytest.mark.parametrize("seed", range(4))
    def test_normalizes_one_dim(self, seed):
        rng = np.random.default_rng(seed)
        p = IblParams(rng.uniform(0.5, 5, 1), *rng.uniform(0.5, 5, 2))
        total, _ = integrate.quad(_density_on_unit_square(p), 0, 1, limit=200)
        assert total == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    @pytest.mark.parametrize("seed", range(4))
    def test_normalizes_two_dim(self, seed):
        rng = np.random.default_rng(100 + seed)
        p = IblParams(rng.uniform(0.5, 5, 2), *rng.uniform(0.5, 5, 2))
        total, _ = integrate.dblquad(_density_on_unit_square(p), 0, 1, 0, 1,
                                     epsabs=1e-6, epsrel=1e-6)
        assert total == pytest.approx(1.0, abs=1e-3)


class TestSample:
    def test_shape_and_positivity(self):
        X = sample(IblParams([1.0, 2.0, 3.0], 2.0, 3.0), 50, seed=1)
        assert X.shape == (50, 3)
        assert np.all(X > 0)

    def test_deterministic(self):
        p = IblParams([12.0, 24.0], 8.5, 12.5)
        np.testing.assert_array_equal(sample(p, 100, seed=5), sample(p, 100, seed=5))

    def test_mean_of_sum(self):
        s = sample(IblParams([12.0, 24.0], 18.0, 5.0), 100_000, seed=2).sum(axis=1)
        se = s.std(ddof=1) / math.sqrt(s.size)
        assert abs(s.mean() - 18.0 / 4.0) < 3 * se

    def test_mean_of_proportions(self):
        X = sample(IblParams([12.0, 24.0], 18.0, 5.0), 100_000, seed=3)
        y = X / X.sum(axis=1, keepdims=True)
        se = y.std(axis=0, ddof=1) / math.sqrt(y.shape[0])
        np.testing.assert_array_less(np.abs(y.mean(axis=0) - [1 / 3, 2 / 3]), 3 * se)

    def test_marginals_ks(self):
        p = IblParams([2.5, 4.0], 3.0, 6.0)
        X = sample(p, 20_000, seed=4)
        s = X.sum(axis=1)
        assert stats.kstest(s, stats.betaprime(3.0, 6.0).cdf).pvalue > 1e-3
        assert stats.kstest(X[:, 0] / s, stats.beta(2.5, 4.0).cdf).pvalue > 1e-3

    def test_sum_and_proportion_independent(self):
        X = sample(IblParams([2.5, 4.0], 3.0, 6.0), 20_000, seed=6)
        s = X.sum(axis=1)
        rho = stats.spearmanr(s, X[:, 0] / s).statistic
        assert abs(rho) < 4 / math.sqrt(s.size)

    def test_chi_square_against_density(self):
        p = IblParams([2.0, 3.0], 4.0, 5.0)
        edges = np.array([0.0, 0.25, 0.5, 1.0, np.inf])
        f = lambda x2, x1: math.exp(log_pdf([x1, x2], p))
        probs = np.empty((4, 4))
        for i in range(4):
            for j in range(4):
                # finite cells integrate directly, open cells through t / (1 - t)
                a, b = edges[i], edges[i + 1]
                c, d = edges[j], edges[j + 1]
                ta, tb = a / (1 + a), (1.0 if np.isinf(b) else b / (1 + b))
                tc, td = c / (1 + c), (1.0 if np.isinf(d) else d / (1 + d))
                g = lambda t2, t1: (f(t2 / (1 - t2), t1 / (1 - t1))
                                    / ((1 - t1) ** 2 * (1 - t2) ** 2))
                probs[i, j] = integrate.dblquad(g, ta, tb, tc, td, epsabs=1e-9)[0]
        assert probs.sum() == pytest.approx(1.0, abs=1e-4)
        X = sample(p, 50_000, seed=7)
        obs, _, _ = np.histogram2d(X[:, 0], X[:, 1], bins=[edges, edges])
        exp = probs.ravel() * X.shape[0]
        chi2 = np.sum((obs.ravel() - exp) ** 2 / exp)
        assert stats.chi2(df=15).sf(chi2) > 1e-3

    def test_zero_draws(self):
        assert sample(IblParams([1.0], 1.0, 1.0), 0, seed=0).shape == (0, 1)
