"""End-to-end acceptance checks, one test per criterion.

Each test appends a PASS/FAIL line that the terminal summary prints.
"""

import time

import numpy as np
import pytest

from ppassoc.exactp import ordered_uniform_survival
from ppassoc.glrt import run_test
from ppassoc.measure import ObservationWindow, build_intensity, transform, uniform_intensity
from ppassoc.multiplicity import bh_reject
from ppassoc.simulate import (
    AlternativeSpec,
    CalibrationConfig,
    calibration_experiment,
    consistency_experiment,
    figure1_experiment,
    replicate_rng,
    sample_alternative,
)

from conftest import ACCEPTANCE_LINES
from oracles import brute_force_likelihood, monte_carlo_survival, two_point_survival

UNIT = ObservationWindow(0.0, 1.0)


def record(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
    assert ok, detail


def test_1_null_calibration():
    t0 = time.perf_counter()
    s = calibration_experiment(CalibrationConfig(replicates=2000, m=20, mean_n=50.0, workers=1), seed=1)
    elapsed = time.perf_counter() - t0
    ok = s.ks_statistic < s.ks_critical_1pct and 0.037 <= s.reject_rate_05 <= 0.063 and elapsed < 120
    record(
        1,
        "null calibration",
        ok,
        f"KS {s.ks_statistic:.4f} < {s.ks_critical_1pct:.4f}, 5% rate {s.reject_rate_05:.4f}, {elapsed:.1f}s",
    )


def test_2_single_event_closed_form():
    rng = replicate_rng(2)
    u = np.concatenate([rng.random(300), [1e-12, 1e-6, 0.5, 1 - 1e-9]])
    err = max(abs(run_test([0.0], [x], uniform_intensity(UNIT)).p_value - x) for x in u)
    record(2, "n = 1 closed form", err <= 1e-9, f"max |p - u1| = {err:.2e}")


def test_3_survival_oracles():
    rng = replicate_rng(3)
    worst = 0.0
    for _ in range(100):
        o = np.sort(rng.random(2))
        worst = max(worst, abs(ordered_uniform_survival(o) - two_point_survival(*o)))
    z = []
    for n in (3, 5, 10):
        o = np.maximum.accumulate(np.sort(rng.random(n)) * np.linspace(0.3, 1.0, n))
        est, se = monte_carlo_survival(o, 10**6, rng)
        z.append(abs(ordered_uniform_survival(o) - est) / se)
    ok = worst <= 1e-12 and max(z) <= 3
    record(3, "survival recursion oracles", ok, f"n=2 max err {worst:.1e}; MC |z| = {', '.join(f'{v:.2f}' for v in z)}")


def test_4_brute_force_equivalence():
    rng = replicate_rng(4)
    rows = []
    for _ in range(200):
        m = int(rng.integers(1, 6))
        A = np.concatenate([[0.0], np.sort(rng.random(m - 1))])
        B = np.sort(rng.random(int(rng.integers(1, 9))))
        out = run_test(A, B, uniform_intensity(UNIT))
        lr, k = brute_force_likelihood(A, B)
        rows.append((out.n, out.k_hat, out.log_T, k, lr))
    same_k = sum(r[1] == r[3] for r in rows)
    # log T is a monotone transform of the maximised likelihood for fixed n
    rank_ok = True
    for n in {r[0] for r in rows}:
        group = [r for r in rows if r[0] == n]
        by_t = np.argsort([r[2] for r in group], kind="stable")
        by_lr = np.argsort([r[4] for r in group], kind="stable")
        rank_ok &= bool(np.array_equal(by_t, by_lr))
    gap = max(abs(r[4] - r[0] * r[2]) for r in rows)
    ok = same_k == len(rows) and rank_ok
    record(4, "brute-force oracle equivalence", ok, f"same k_hat {same_k}/200, rankings match {rank_ok}, max |LR - n log T| {gap:.1e}")


@pytest.mark.slow
def test_5_weighted_ks_agreement():
    t0 = time.perf_counter()
    n = 1000
    ref = figure1_experiment(n, 0.01, 0.99, 1000, seed=0)
    wide = figure1_experiment(n, 1 / (n + 1), n / (n + 1), 1000, seed=0)
    elapsed = time.perf_counter() - t0
    ok = ref.sup_distance <= 0.06 and wide.sup_distance > ref.sup_distance and elapsed < 600
    record(
        5,
        "weighted K-S vs restricted statistic",
        ok,
        f"sup-distance {ref.sup_distance:.3f} at (.01, .99), {wide.sup_distance:.3f} at full range, {elapsed:.1f}s",
    )


@pytest.mark.slow
def test_6_tau_consistency():
    rows = consistency_experiment(3.0, 0.1, [0.0, 0.25, 0.5, 0.75], uniform_intensity(UNIT), [10, 100, 1000], 200, seed=6)
    err = [r.median_abs_error for r in rows]
    power = [r.power_05 for r in rows]
    ok = all(b <= a for a, b in zip(err, err[1:])) and err[-1] < 0.01 and power[-1] >= 0.99
    record(
        6,
        "tau_hat consistency",
        ok,
        f"median errors {', '.join(f'{e:.4f}' for e in err)}; power {', '.join(f'{p:.2f}' for p in power)}",
    )


def test_7_two_level_u_density():
    r = build_intensity([0, 0.3, 0.7, 1.0], [2.0, 0.5, 1.2])
    A = np.array([0.0, 0.2, 0.45, 0.6, 0.85])
    lam1, lam2 = 4.0, 1.0
    u = []
    for i in range(10):
        spec = AlternativeSpec(A, r, 0.04, lam1, lam2, fixed_n=1000)
        u.append(transform(A, sample_alternative(spec, replicate_rng(7, i)), r).u)
    u = np.concatenate(u)
    w = spec.weight
    target = lam1 * w / (lam1 * w + lam2 * (1 - w))
    frac = float(np.mean(u <= w))
    se = np.sqrt(target * (1 - target) / u.size)
    record(7, "two-level u-value density", abs(frac - target) <= 3 * se, f"below-w {frac:.4f} vs {target:.4f} (3 SE = {3 * se:.4f}, n = {u.size})")


def test_8_time_limited():
    empty = run_test([0.0], [0.8], uniform_intensity(UNIT), tau_max=0.1)
    rng = replicate_rng(8)
    violations = 0
    for _ in range(1000):
        m = int(rng.integers(1, 8))
        A = np.concatenate([[0.0], np.sort(rng.random(m - 1))])
        B = np.sort(rng.random(int(rng.integers(1, 40))))
        tau_max = float(rng.uniform(1e-3, 0.5))
        r = uniform_intensity(UNIT)
        violations += run_test(A, B, r, tau_max=tau_max).log_T > run_test(A, B, r).log_T
    ok = empty.T == 1.0 and empty.p_value == 1.0 and violations == 0
    record(8, "time-limited variant", ok, f"empty set T={empty.T}, p={empty.p_value}; {violations}/1000 bound violations")


@pytest.mark.slow
def test_9_bh_screening(grid_screens):
    hand = bh_reject([0.01, 0.02, 0.04, 0.5], 0.1) == [0, 1, 2]
    hits = float(np.mean([len(rej & g.effects) for g, _, rej in grid_screens]))
    record(9, "BH screening", hand and hits >= 10, f"hand example {'exact' if hand else 'wrong'}; mean diagonal recovery {hits:.2f}/12 over 20 seeds")
