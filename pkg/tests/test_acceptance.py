"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete.  Quantitative thresholds come from the spec where stated and from
carabal.config (one-time calibration, see carabal.calibration) elsewhere.
"""

import math
import time
import zlib

import numpy as np

import carabal.config as config
from carabal.balancing import brute_force_min_discrepancy, full_coloring
from carabal.caratheodory import (approx_caratheodory, brute_force_ac,
                                  maurey_sample)
from carabal.cli import fit_slope
from carabal.instances import (lower_bound_instance, random_ball_combination,
                               random_ball_instance, simplex_instance,
                               spencer_instance)
from carabal.linalg import PNorm, lp_norm, lp_norm_cols
from carabal.walk import (WalkConfig, initial_state, min_delta,
                          sample_partial_coloring, walk_step)

INF = math.inf


def _rng(*entropy):
    words = [zlib.crc32(e.encode()) if isinstance(e, str) else int(e)
             for e in entropy]
    return np.random.default_rng(np.random.SeedSequence(words))


def _report(num, ok, detail):
    print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {num}: {detail}"


def _walk_families():
    return [
        ("spencer-64", spencer_instance(64, 64, 0.5, _rng(11, 0))),
        ("ball-64", random_ball_instance(64, 64, PNorm(2), _rng(11, 1))),
        ("hard-96x12", lower_bound_instance(96, 12, PNorm(2), _rng(11, 2))),
    ]


def test_criterion_01_walk_contract():
    # Thm contract: >= n/2 colored, deviations capped, mean equals the start
    t0 = time.perf_counter()
    draws = 1000
    tol_mean = 8.0 / math.sqrt(draws)
    details = []
    ok = True
    for name, A in _walk_families():
        n = A.n
        delta = min_delta(A)
        cfg = WalkConfig(delta_cap=delta)
        rng = _rng(12, name)
        total = np.zeros(n)
        worst_dev = 0.0
        min_colored = n
        for _ in range(draws):
            s = sample_partial_coloring(A, np.zeros(n), cfg, rng)
            total += s.x
            worst_dev = max(worst_dev, float(s.row_deviations.max() - delta))
            min_colored = min(min_colored, s.colored_count)
        mean_gap = float(np.max(np.abs(total / draws)))
        ok = ok and min_colored >= math.ceil(n / 2)
        ok = ok and worst_dev <= 1e-9 and mean_gap <= tol_mean
        details.append(f"{name}: colored>={min_colored}, devgap={worst_dev:.2e}, "
                       f"meangap={mean_gap:.3f}")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed <= 300.0
    _report(1, ok, "; ".join(details) + f" ({elapsed:.1f}s)")


def test_criterion_02_walk_geometry():
    # norm recursion ||x+||^2 - ||x||^2 = delta^2 and monotone tight sets
    t0 = time.perf_counter()
    A = spencer_instance(64, 64, 0.5, _rng(21))
    delta = min_delta(A)
    cfg = WalkConfig(delta_cap=delta)
    rng = _rng(22)
    worst = 0.0
    traces = 0
    while traces < 100:
        state = initial_state(A, np.zeros(64), cfg)
        okrun = True
        while True:
            prev = state
            state, status = walk_step(state, A, cfg, rng)
            if status == "fail":
                okrun = False
                break
            if state is not prev:
                gain = float(np.dot(state.x, state.x) - np.dot(prev.x, prev.x))
                worst = max(worst, abs(gain - state.delta_last ** 2))
                assert np.all(state.coord_tight >= prev.coord_tight)
                assert np.all(state.row_tight >= prev.row_tight)
            if status == "success":
                break
        if okrun:
            traces += 1
    elapsed = time.perf_counter() - t0
    _report(2, worst <= 1e-6,
            f"100 traces, worst norm-recursion gap {worst:.2e} ({elapsed:.1f}s)")


def test_criterion_03_oracle_sandwich_balancing():
    t0 = time.perf_counter()
    ok = True
    details = []
    for pv in (2.0, INF):
        p = PNorm(pv)
        for n in (8, 12, 16):
            good = 0
            for seed in range(50):
                rng = _rng(31, int(pv if math.isfinite(pv) else 0), n, seed)
                A = random_ball_instance(n, n, p, rng)
                res = full_coloring(A, p, p, rng)
                _, opt = brute_force_min_discrepancy(A, p)
                ok = ok and res.value >= opt - 1e-12
                if res.value <= 6.0 * max(opt, 1e-300):
                    good += 1
            ok = ok and good >= 45
            details.append(f"p={p} n={n}: {good}/50<=6x")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed <= 180.0
    _report(3, ok, "; ".join(details) + f" ({elapsed:.1f}s)")


def test_criterion_04_spencer_desk_scale():
    t0 = time.perf_counter()
    m = n = 256
    comparator = math.sqrt(n * math.log(2.0 * m / n))
    ceiling = math.sqrt(n) * math.sqrt(math.log(2.0)) * 12.0
    values = []
    for seed in range(20):
        rng = _rng(41, seed)
        A = spencer_instance(m, n, 0.5, rng)
        res = full_coloring(A, INF, INF, rng)
        values.append(res.value)
    worst = max(values)
    elapsed = time.perf_counter() - t0
    ok = (worst <= config.K_SPENCER * comparator and worst <= ceiling
          and elapsed <= 120.0)
    _report(4, ok, f"max discrepancy {worst:.1f} <= "
            f"{config.K_SPENCER * comparator:.1f} (cal) and {ceiling:.1f} "
            f"(ceiling) ({elapsed:.1f}s)")


def test_criterion_05_scaling_exponent():
    # slope of log(median error) vs log k; theory -1/2 at p = q = 2.  The
    # hull is oversampled (n = 2m) so the level supports stay below the
    # saturation point across the whole k range
    t0 = time.perf_counter()
    m, trials = 512, 10
    ks = (8, 16, 32, 64, 128, 256)
    medians = []
    for k in ks:
        errs = []
        for trial in range(trials):
            comb = random_ball_combination(m, 2 * m, PNorm(2), _rng(51, k, trial))
            sol = approx_caratheodory(comb, k, 2, 2, _rng(52, k, trial))
            errs.append(sol.error_q)
        medians.append(float(np.median(errs)))
    slope = fit_slope(list(ks), medians)
    elapsed = time.perf_counter() - t0
    ok = slope is not None and -0.65 <= slope <= -0.35 and elapsed <= 600.0
    _report(5, ok, f"slope {slope:.3f} in [-0.65, -0.35], medians "
            + ",".join(f"{v:.3f}" for v in medians) + f" ({elapsed:.1f}s)")


def test_criterion_06_exactly_k_and_ledger():
    t0 = time.perf_counter()
    rng_outer = _rng(61)
    ok = True
    for case in range(200):
        m = int(rng_outer.integers(3, 9))
        n = int(rng_outer.integers(2, 11))
        k = int(rng_outer.integers(1, 7))
        comb = random_ball_combination(m, n, PNorm(2), _rng(62, case))
        sol = approx_caratheodory(comb, k, 2, 2, _rng(63, case))
        ok = ok and sol.indices.size == k
        ok = ok and sol.error_q <= sol.grid_error + sum(sol.per_level_errors) + 1e-9
        for rec in sol.levels:
            ok = ok and rec.mass_after <= rec.mass_before + 1e-12
            ok = ok and rec.color_sum <= 0
        if not ok:
            break
    elapsed = time.perf_counter() - t0
    _report(6, ok, f"200 instances: exactly-k, error ledger, mass decrease, "
            f"sign-flip rule ({elapsed:.1f}s)")


def test_criterion_07_oracle_sandwich_caratheodory():
    t0 = time.perf_counter()
    ok = True
    for qv in (1.0, 2.0, INF):
        q = PNorm(qv)
        for seed in range(100):
            for tag, comb, k in (
                ("simplex", simplex_instance(5), 3),
                ("random", random_ball_combination(
                    4, 6, PNorm(2), _rng(71, int(qv if math.isfinite(qv) else 0), seed)), 4),
            ):
                oracle = brute_force_ac(comb, k, q)
                walk = approx_caratheodory(comb, k, 2, q, _rng(72, tag, seed))
                maurey = maurey_sample(comb, k, q, _rng(73, tag, seed))
                ok = ok and oracle.error_q <= walk.error_q + 1e-12
                ok = ok and oracle.error_q <= maurey.error_q + 1e-12
        if not ok:
            break
    elapsed = time.perf_counter() - t0
    _report(7, ok, f"oracle <= walk and <= maurey, q in {{1,2,inf}}, "
            f"100 seeds each ({elapsed:.1f}s)")


def test_criterion_08_norm_lemmas_bulk():
    t0 = time.perf_counter()
    rng = _rng(81)
    ok = True
    for _ in range(100_000):
        m = int(rng.integers(1, 65))
        z = rng.standard_normal(m) * 10.0 ** rng.integers(-3, 4)
        pv = 1.0 + rng.random() * 30.0 if rng.random() > 0.2 else INF
        qv = pv + rng.random() * 20.0 if math.isfinite(pv) else INF
        if rng.random() < 0.15:
            qv = INF
        p, q = PNorm(pv), PNorm(min(qv, INF))
        np_, nq = lp_norm(z, p), lp_norm(z, q)
        ok = ok and nq <= np_ * (1 + 1e-9)
        ok = ok and np_ <= m ** (p.inv - q.inv) * nq * (1 + 1e-9)
        if 2.0 <= p.value and not q.is_inf:
            w = z / max(float(np.max(np.abs(z))), 1e-300)
            lhs = lp_norm(w, q) ** q.value
            rhs = (lp_norm(w, p) ** p.value
                   * lp_norm(w, INF) ** (q.value - p.value))
            ok = ok and lhs <= rhs * (1 + 1e-9)
        if not ok:
            break
    elapsed = time.perf_counter() - t0
    _report(8, ok, f"1e5 random vectors, both norm inequalities at rel 1e-9 "
            f"({elapsed:.1f}s)")


def test_criterion_09_lower_bound_strength():
    t0 = time.perf_counter()
    ok = True
    values = []
    for seed in range(20):
        rng = _rng(7003, seed)  # disjoint from the calibration range 1000+
        A = lower_bound_instance(96, 12, PNorm(2), rng)
        norms = lp_norm_cols(A.entries, 2)
        ok = ok and bool(np.all(norms[norms > 0] == 1.0))
        _, value = brute_force_min_discrepancy(A, 2)
        values.append(value)
    ok = ok and min(values) >= config.LOWER_BOUND_FLOOR
    elapsed = time.perf_counter() - t0
    _report(9, ok, f"20 seeds: min brute discrepancy {min(values):.3f} >= "
            f"{config.LOWER_BOUND_FLOOR} floor; unit columns exact "
            f"({elapsed:.1f}s)")


def test_criterion_10_log_regime_improvement():
    # p = q = inf: the theory evaluates the sup norm via q' = log2(m)
    # (||x||_inf <= ||x||_log2 m <= 2 ||x||_inf); the solver caps the sup
    # norm directly and must beat independent sampling
    t0 = time.perf_counter()
    m, n, k, trials = 1024, 160, 64, 50
    walk_errs, maurey_errs = [], []
    for trial in range(trials):
        comb = random_ball_combination(m, n, PNorm(INF), _rng(101, trial))
        walk_errs.append(
            approx_caratheodory(comb, k, INF, INF, _rng(102, trial)).error_q)
        maurey_errs.append(maurey_sample(comb, k, INF, _rng(103, trial)).error_q)
    walk_med = float(np.median(walk_errs))
    maurey_med = float(np.median(maurey_errs))
    bound = config.K_LOG * math.sqrt(math.log(2.0 * m / k) / k)
    elapsed = time.perf_counter() - t0
    ok = walk_med <= 1.5 * maurey_med and walk_med <= bound
    _report(10, ok, f"walk median {walk_med:.4f} <= 1.5x maurey "
            f"{maurey_med:.4f} and <= {bound:.4f} ({elapsed:.1f}s)")
