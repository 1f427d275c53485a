"""Special functions against mpmath, finite differences and recurrences."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iblmm.special import digamma, ln_gamma, log_sum_exp

mpmath.mp.dps = 30

# frozen from a Richardson-extrapolated central difference of math.lgamma
DIGAMMA_FD = {1.0: -0.5772156649042071, 0.5: -1.9635100260761982}


def _fd_digamma(a, h=1e-5):
    d = lambda s: (math.lgamma(a + s) - math.lgamma(a - s)) / (2 * s)
    return (4 * d(h / 2) - d(h)) / 3


class TestLnGamma:
    @pytest.mark.parametrize("a, expected", [
        (1.0, 0.0),
        (0.5, 0.5 * math.log(math.pi)),
        (10.0, math.log(362880.0)),
    ])
    def test_closed_forms(self, a, expected):
        assert ln_gamma(a) == pytest.approx(expected, abs=1e-12)

    def test_against_mpmath(self):
        a = np.geomspace(1e-3, 1e6, 400)
        ref = np.array([float(mpmath.loggamma(mpmath.mpf(x))) for x in a])
        err = np.abs(ln_gamma(a) - ref)
        # 1e-12 absolute until |ln Gamma| grows past ~1e4, then relative
        np.testing.assert_array_less(err, 1e-12 * np.maximum(1.0, np.abs(ref)))

    @pytest.mark.parametrize("bad", [0.0, -1.0, np.inf, np.nan])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            ln_gamma(bad)

    def test_array_with_bad_entry(self):
        with pytest.raises(ValueError):
            ln_gamma(np.array([1.0, -2.0]))

    def test_returns_float_for_scalar(self):
        assert isinstance(ln_gamma(3.0), float)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.5, 1e4))
    def test_recurrence(self, a):
        assert ln_gamma(a + 1) == pytest.approx(ln_gamma(a) + math.log(a),
                                                rel=1e-10, abs=1e-12)


class TestDigamma:
    def test_fd_oracle_values(self):
        for a, val in DIGAMMA_FD.items():
            assert digamma(a) == pytest.approx(val, abs=1e-8)
        assert digamma(2.0) == pytest.approx(1 + DIGAMMA_FD[1.0], abs=1e-8)

    def test_against_mpmath(self):
        a = np.geomspace(1e-3, 1e6, 400)
        ref = np.array([float(mpmath.digamma(mpmath.mpf(x))) for x in a])
        np.testing.assert_allclose(digamma(a), ref, rtol=0, atol=1e-10)

    def test_matches_finite_difference(self):
        rng = np.random.default_rng(20)
        a = rng.uniform(0.01, 100, size=200)
        # the stdlib difference is independent of the scipy routines under test
        fd = np.array([_fd_digamma(x, h=min(1e-5, x / 10)) for x in a])
        np.testing.assert_allclose(digamma(a), fd, rtol=0, atol=1e-6)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.5, 1e4))
    def test_recurrence(self, a):
        assert digamma(a + 1) == pytest.approx(digamma(a) + 1 / a, rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("bad", [0.0, -0.5, np.inf, -np.inf, np.nan])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            digamma(bad)


class TestLogSumExp:
    def test_examples(self):
        assert log_sum_exp([0.0, 0.0]) == pytest.approx(math.log(2), abs=1e-12)
        assert log_sum_exp([-1000.0, -1000.0]) == pytest.approx(-1000 + math.log(2), abs=1e-12)
        assert log_sum_exp([3.0]) == 3.0

    def test_no_overflow(self):
        assert log_sum_exp([1000.0, 1000.0]) == pytest.approx(1000 + math.log(2))

    def test_minus_inf_entries_ignored(self):
        assert log_sum_exp([-np.inf, 1.5]) == pytest.approx(1.5, abs=1e-15)

    @pytest.mark.parametrize("bad", [[], [-np.inf, -np.inf], [np.nan, 1.0], [np.inf]])
    def test_errors(self, bad):
        with pytest.raises(ValueError):
            log_sum_exp(bad)

    def test_axis(self):
        v = np.array([[0.0, 0.0], [1.0, -np.inf]])
        np.testing.assert_allclose(log_sum_exp(v, axis=1), [math.log(2), 1.0])
        assert log_sum_exp(v, axis=1, keepdims=True).shape == (2, 1)

    def test_all_minus_inf_row_raises(self):
        with pytest.raises(ValueError):
            log_sum_exp(np.array([[0.0, 1.0], [-np.inf, -np.inf]]), axis=1)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-700, 700), min_size=1, max_size=20), st.floats(-1e3, 1e3))
    def test_shift_equivariance(self, v, c):
        v = np.array(v)
        lhs = log_sum_exp(v + c)
        rhs = log_sum_exp(v) + c
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12 * max(1.0, abs(c)))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-30, 30), min_size=1, max_size=20))
    def test_matches_naive(self, v):
        assert log_sum_exp(v) == pytest.approx(math.log(sum(math.exp(x) for x in v)),
                                               rel=1e-12, abs=1e-12)
