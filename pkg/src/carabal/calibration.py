"""One-time calibration protocols behind the constants in carabal.config.

The bounds proved for the solver are asymptotic with unstated universal
constants.  Each protocol below measures the relevant ratio on seeded
instances and reports a constant rounded UP to one significant digit; the
results are frozen in config.py and used by the acceptance suite and the
per-round acceptance gate.  Run ``python -m carabal.calibration`` to
regenerate (several minutes).
"""

import math

import numpy as np

from .balancing import (brute_force_min_discrepancy, full_coloring,
                        round_shape, vb_bound)
from .caratheodory import approx_caratheodory, maurey_sample
from .instances import (lower_bound_instance, random_ball_combination,
                        random_ball_instance, spencer_instance)
from .linalg import PNorm


def round_up_1sig(x):
    """Round a positive float up to one significant digit."""
    if x <= 0.0:
        return 0.0
    exp = math.floor(math.log10(x))
    mant = x / 10 ** exp
    return round(math.ceil(mant - 1e-12) * 10 ** exp, max(0, -exp))


def _rng(*entropy):
    return np.random.default_rng(np.random.SeedSequence(list(entropy)))


def calibrate_round_and_full(seeds=50, sizes=(8, 12, 16), exponents=(2.0, math.inf)):
    """Ungated runs on random ball-column instances.

    Returns (k_round, k_full): 99th percentiles of the per-round ratio
    value / (s_p * shape) and of the full value / vb_bound, both rounded up
    to one significant digit.
    """
    round_ratios = []
    full_ratios = []
    for pv in exponents:
        p = PNorm(pv)
        for n in sizes:
            for seed in range(seeds):
                rng = _rng(7001, int(pv if math.isfinite(pv) else 0), n, seed)
                A = random_ball_instance(n, n, p, rng)
                res = full_coloring(A, p, p, rng, k_round=math.inf)
                full_ratios.append(res.value / vb_bound(p, p, n, n))
                # reconstruct per-round ratios from the recorded free counts
                for value, n_free in zip(res.per_round_values, res.per_round_free):
                    if n_free <= 1:
                        continue
                    shape = round_shape(p, p, n, n_free)
                    scale = 1.0  # columns are inside the unit ball
                    round_ratios.append(value / (scale * shape))
    k_round = round_up_1sig(float(np.percentile(round_ratios, 99)))
    k_full = round_up_1sig(float(np.percentile(full_ratios, 99)))
    return k_round, k_full, round_ratios, full_ratios


def calibrate_spencer(seeds=10, m=256, n=256, density=0.5):
    """Set-system runs: 99th percentile of value / sqrt(n ln(2m/n))."""
    ratios = []
    comparator = math.sqrt(n * math.log(2.0 * m / n))
    for seed in range(seeds):
        rng = _rng(7002, seed)
        A = spencer_instance(m, n, density, rng)
        res = full_coloring(A, math.inf, math.inf, rng)
        ratios.append(res.value / comparator)
    return round_up_1sig(float(np.percentile(ratios, 99))), ratios


def calibrate_lower_bound_floor(seeds=40, m=96, n=12, p=2.0):
    """0.8 x the smallest brute-force minimum over a disjoint seed range."""
    values = []
    for seed in range(1000, 1000 + seeds):
        rng = _rng(7003, seed)
        A = lower_bound_instance(m, n, PNorm(p), rng)
        _, value = brute_force_min_discrepancy(A, PNorm(p))
        values.append(value)
    return 0.8 * min(values), values


def calibrate_log_regime(trials=20, m=1024, n=160, k=64):
    """Median sup-norm walk error / sqrt(ln(2m/k)/k), with a 1.5x margin."""
    shape = math.sqrt(math.log(2.0 * m / k) / k)
    ratios = []
    p = PNorm(math.inf)
    for trial in range(trials):
        rng = _rng(7004, trial)
        comb = random_ball_combination(m, n, p, rng)
        sol = approx_caratheodory(comb, k, p, p, rng)
        ratios.append(sol.error_q / shape)
    return round_up_1sig(1.5 * float(np.median(ratios))), ratios


def calibrate_maurey(runs=100, m=256, n=257, k=64):
    """Median l2 maurey error / sqrt(2/k), with a 1.5x margin."""
    shape = math.sqrt(2.0 / k)
    ratios = []
    p = PNorm(2.0)
    for run in range(runs):
        rng = _rng(7005, run)
        comb = random_ball_combination(m, n, p, rng)
        sol = maurey_sample(comb, k, p, rng)
        ratios.append(sol.error_q / shape)
    return round_up_1sig(1.5 * float(np.median(ratios))), ratios


def main():
    print("calibrating per-round and full-coloring constants ...")
    k_round, k_full, rr, fr = calibrate_round_and_full()
    print(f"  per-round ratio: p50={np.percentile(rr, 50):.3f} "
          f"p99={np.percentile(rr, 99):.3f} max={max(rr):.3f} -> K_ROUND={k_round}")
    print(f"  full ratio:      p50={np.percentile(fr, 50):.3f} "
          f"p99={np.percentile(fr, 99):.3f} max={max(fr):.3f} -> K_FULL={k_full}")

    print("calibrating set-system ceiling ...")
    k_spencer, sr = calibrate_spencer()
    print(f"  spencer ratio:   p50={np.percentile(sr, 50):.3f} "
          f"max={max(sr):.3f} -> K_SPENCER={k_spencer}")

    print("calibrating hard-instance floor ...")
    floor, lv = calibrate_lower_bound_floor()
    print(f"  brute minima:    min={min(lv):.4f} max={max(lv):.4f} "
          f"-> LOWER_BOUND_FLOOR={floor:.4f}")

    print("calibrating log-regime constant ...")
    k_log, lr = calibrate_log_regime()
    print(f"  log-regime ratio: p50={np.median(lr):.3f} max={max(lr):.3f} "
          f"-> K_LOG={k_log}")

    print("calibrating maurey constant ...")
    k_maurey, mr = calibrate_maurey()
    print(f"  maurey ratio:    p50={np.median(mr):.3f} max={max(mr):.3f} "
          f"-> K_MAUREY={k_maurey}")

    print("\nfreeze into carabal/config.py:")
    print(f"K_ROUND = {k_round}")
    print(f"K_FULL = {k_full}")
    print(f"K_SPENCER = {k_spencer}")
    print(f"K_LOG = {k_log}")
    print(f"K_MAUREY = {k_maurey}")
    print(f"LOWER_BOUND_FLOOR = {floor:.4f}")


if __name__ == "__main__":
    main()
