import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ppassoc.glrt import DegenerateDataWarning, GlrOutcome, log_ell, maximize, run_test
from ppassoc.measure import ObservationWindow, TransformedSample, build_intensity, transform, uniform_intensity

from oracles import brute_force_likelihood

UNIT = ObservationWindow(0.0, 1.0)


def sample_of(u, u_max=None):
    u = np.asarray(u, dtype=float)
    return TransformedSample(
        u=u, response=u.copy(), index=np.arange(u.size), mode="triggering", u_max=u_max, tau_max=None, degenerate=False
    )


def random_case(rng, n_max=8, m_max=5):
    m = int(rng.integers(1, m_max + 1))
    A = np.concatenate([[0.0], np.sort(rng.random(m - 1))])
    n = int(rng.integers(1, n_max + 1))
    B = np.sort(rng.random(n))
    return A, B


class TestLogEll:
    def test_single(self):
        assert log_ell(1, 1, 0.2) == pytest.approx(math.log(5.0), abs=1e-15)

    def test_identity_point(self):
        assert log_ell(3, 7, 3 / 7) == pytest.approx(0.0, abs=1e-15)

    def test_two_term(self):
        expected = 0.5 * math.log(0.5 / 0.1) + 0.5 * math.log(0.5 / 0.9)
        assert log_ell(1, 2, 0.1) == pytest.approx(expected, abs=1e-15)
        assert log_ell(1, 2, 0.1) == pytest.approx(0.5108, abs=1e-4)

    def test_zero_u(self):
        assert log_ell(2, 4, 0.0) == math.inf

    @given(st.integers(1, 50), st.data())
    def test_nonnegative(self, n, data):
        k = data.draw(st.integers(1, n))
        u = data.draw(st.floats(0.0, 0.999999))
        assert log_ell(k, n, u) >= -1e-15


class TestMaximize:
    def test_single(self):
        best = maximize(sample_of([0.2]))
        assert best.k_hat == 1
        assert math.exp(best.log_T) == pytest.approx(5.0)
        assert best.lambda1_hat == pytest.approx(5.0)
        assert best.lambda2_hat == 0.0

    def test_infeasible_first_rank(self):
        best = maximize(sample_of([0.8, 0.9]))
        assert best.k_hat == 2
        assert best.log_T == pytest.approx(-math.log(0.9), abs=1e-15)

    def test_empty_time_limited(self):
        best = maximize(sample_of([0.2], u_max=0.1))
        assert best.k_hat is None and best.log_T == 0.0

    def test_ties_to_smallest_rank(self):
        # u on the diagonal: every rank scores exactly 0
        assert maximize(sample_of([0.25, 0.5, 0.75, 1.0 - 1e-300])).k_hat == 1

    def test_requires_events(self):
        with pytest.raises(ValueError):
            maximize(sample_of([]))

    @given(st.integers(0, 2**32 - 1), st.integers(1, 40))
    def test_rate_ordering(self, seed, n):
        u = np.sort(np.random.default_rng(seed).random(n))
        best = maximize(sample_of(u))
        assert best.log_T >= 0.0
        assert best.lambda1_hat >= best.lambda2_hat >= 0.0


class TestRunTest:
    def test_empty_b(self):
        out = run_test([0.0], [], uniform_intensity(UNIT))
        assert out.p_value == 1.0 and out.n == 0 and out.k_hat is None

    def test_single_event(self):
        out = run_test([0.0], [0.2], uniform_intensity(UNIT))
        assert out.T == pytest.approx(5.0)
        assert out.p_value == pytest.approx(0.2, abs=1e-12)
        assert out.tau_hat == pytest.approx(0.2)

    def test_degenerate(self):
        with pytest.warns(DegenerateDataWarning):
            out = run_test([0.0, 0.5], [0.5, 0.7], uniform_intensity(UNIT))
        assert out.p_value == 0.0
        assert out.degenerate
        assert out.lambda1_hat == math.inf

    def test_tau_hat_maps_back_to_response(self):
        out = run_test([0.0, 0.5], [0.52, 0.53, 0.9], uniform_intensity(UNIT))
        assert out.k_hat == 2
        assert out.tau_hat == pytest.approx(0.03)

    def test_time_limited_empty(self):
        out = run_test([0.0], [0.8], uniform_intensity(UNIT), tau_max=0.1)
        assert out.log_T == 0.0 and out.T == 1.0 and out.p_value == 1.0

    def test_dict_round_trip(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateDataWarning)
            out = run_test([0.0, 0.5], [0.5, 0.7], uniform_intensity(UNIT))
        assert GlrOutcome.from_dict(out.to_dict()) == out

    @given(st.integers(0, 2**32 - 1), st.integers(-3, 6))
    def test_scale_invariance_power_of_two(self, seed, exponent):
        rng = np.random.default_rng(seed)
        A, B = random_case(rng, n_max=30)
        r = build_intensity([0, 0.25, 0.6, 1.0], rng.uniform(0.2, 2.0, 3))
        s = 2.0**exponent
        base = run_test(A, B, r, tau_max=0.2)
        moved = run_test(s * A, s * B, r.scaled(s, 0.0), tau_max=0.2 * s)
        assert (moved.k_hat, moved.log_T, moved.p_value) == (base.k_hat, base.log_T, base.p_value)

    @given(st.integers(0, 2**32 - 1), st.floats(1e-4, 1.0))
    def test_limited_never_exceeds_unrestricted(self, seed, tau_max):
        rng = np.random.default_rng(seed)
        A, B = random_case(rng, n_max=40)
        r = uniform_intensity(UNIT)
        assert run_test(A, B, r, tau_max=tau_max).log_T <= run_test(A, B, r).log_T


class TestBruteForceOracle:
    def test_same_rank_and_likelihood(self):
        rng = np.random.default_rng(2024)
        statistic, brute = [], []
        for _ in range(40):
            A, B = random_case(rng)
            out = run_test(A, B, uniform_intensity(UNIT))
            lr, k = brute_force_likelihood(A, B)
            assert k == out.k_hat
            statistic.append(out.n * out.log_T)
            brute.append(lr)
        np.testing.assert_allclose(brute, statistic, atol=1e-3)

    def test_u_values_match_direct_scan(self):
        A = np.array([0.0, 0.3, 0.35])
        B = np.array([0.1, 0.32, 0.5])
        s = transform(A, B, uniform_intensity(UNIT))
        np.testing.assert_allclose(np.sort(s.response), [0.02, 0.1, 0.15])
