import itertools
import math

import numpy as np
import pytest

from carabal.balancing import (brute_force_min_discrepancy,
                               delta_for_lp_columns, full_coloring,
                               partial_color_pq, round_shape, vb_bound)
from carabal.instances import random_ball_instance
from carabal.linalg import DenseMatrix, PNorm, lp_norm, lp_norm_cols
from carabal.walk import min_delta


def test_vb_bound_values():
    # p=q=2, m=n: regime floor 2, so sqrt(2) * sqrt(n) / (1/2)
    assert vb_bound(2, 2, 16, 16) == pytest.approx(2 * math.sqrt(2) * 4, rel=1e-12)
    # p=q=inf, n=4, m=64: sqrt(ln 32) * 2 / (1/2)
    assert vb_bound(math.inf, math.inf, 64, 4) == pytest.approx(
        math.sqrt(math.log(32.0)) * 2.0 / 0.5, rel=1e-12)
    # p=2, q=inf: the n-exponent cancels and the prefactor diverges
    assert vb_bound(2, math.inf, 16, 8) == math.inf


def test_vb_bound_range_errors():
    with pytest.raises(ValueError, match="parameter range"):
        vb_bound(1.5, 2, 8, 4)
    with pytest.raises(ValueError, match="parameter range"):
        vb_bound(3, 2, 8, 4)
    with pytest.raises(ValueError, match="parameter range"):
        vb_bound(2, 2, 4, 8)


def test_vb_bound_monotone_in_n():
    vals = [vb_bound(3, 4, 64, n) for n in range(1, 65)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_delta_for_lp_columns_closed_form():
    # p=2, c1=c2=1/16: sqrt(2) / (sqrt(1/16) * (1/16)^(1/2)) = 16 sqrt(2)
    expected = 16.0 * math.sqrt(2.0)
    for n in (1, 10, 100):
        assert delta_for_lp_columns(2, n) == pytest.approx(expected, rel=1e-12)


def test_delta_for_lp_columns_scaling_law():
    for p in (2.0, 3.0, 8.0):
        ratio = delta_for_lp_columns(p, 400) / delta_for_lp_columns(p, 100)
        assert ratio == pytest.approx(4.0 ** (0.5 - 1.0 / p), rel=1e-12)


def test_delta_for_lp_columns_rejects_bad_p():
    with pytest.raises(ValueError):
        delta_for_lp_columns(math.inf, 10)
    with pytest.raises(ValueError):
        delta_for_lp_columns(1.5, 10)


def _unit_p_columns(m, n, p, rng):
    A = rng.standard_normal((m, n))
    return A / lp_norm_cols(A, p)


def test_delta_formula_dominates_min_delta():
    # the closed form must be feasible for every unit-column matrix,
    # including the concentrated equal-row worst case m ~ 16 n / e
    rng = np.random.default_rng(0)
    for p in (2.0, 3.0, 6.0):
        formula = delta_for_lp_columns(p, 100)
        for m in (40, 100, 300, 589, 800, 1600):
            A = DenseMatrix(_unit_p_columns(m, 100, p, rng))
            assert min_delta(A) <= formula * (1 + 1e-3)
    # exact worst case for p = 2: all rows of equal norm
    n = 100
    for m in (300, 589, 800):
        A = DenseMatrix(np.ones((m, n)) / math.sqrt(m))
        assert min_delta(A) <= delta_for_lp_columns(2, n) * (1 + 1e-3)


def test_partial_color_single_free_coordinate():
    A = DenseMatrix(np.eye(4) * 0.5)
    x0 = np.array([1.0, -1.0, 1.0, 0.25])
    rng = np.random.default_rng(1)
    flips = []
    for _ in range(2000):
        sample = partial_color_pq(A, x0, 2, 2, rng)
        assert abs(sample.x[3]) == 1.0
        assert np.array_equal(sample.x[:3], x0[:3])
        flips.append(sample.x[3])
    # mean-preserving coin: E[x_3] = 0.25
    assert np.mean(flips) == pytest.approx(0.25, abs=0.1)


def test_partial_color_identity_meets_bound():
    n = 16
    A = DenseMatrix(np.eye(n))
    rng = np.random.default_rng(2)
    from carabal import config
    threshold = 2.0 * config.K_ROUND * round_shape(2, 2, n, n)
    for _ in range(20):
        sample = partial_color_pq(A, np.zeros(n), 2, 2, rng)
        assert sample.colored_count >= n // 2
        assert lp_norm(sample.x, 2) <= threshold + 1e-9


def test_partial_color_markov_draw_budget():
    A = random_ball_instance(16, 16, PNorm(2), np.random.default_rng(3))
    rng = np.random.default_rng(4)
    draws = [partial_color_pq(A, np.zeros(16), 2, 2, rng).draws_used
             for _ in range(200)]
    assert np.mean(draws) <= 3.0


def test_full_coloring_single_column():
    v = np.array([0.3, -0.4])
    res = full_coloring(DenseMatrix(v[:, None]), 2, 2, np.random.default_rng(5))
    assert res.x[0] in (-1.0, 1.0)
    assert res.value == pytest.approx(0.5)


def test_full_coloring_identity_value():
    # every coloring of I_16 has l2 value exactly 4
    res = full_coloring(DenseMatrix(np.eye(16)), 2, 2, np.random.default_rng(6))
    assert np.all(np.abs(res.x) == 1.0)
    assert res.value == pytest.approx(4.0, rel=1e-12)


def test_full_coloring_zero_columns_and_bookkeeping():
    rng = np.random.default_rng(7)
    A = random_ball_instance(12, 10, PNorm(2), rng).entries
    A[:, 3] = 0.0
    res = full_coloring(DenseMatrix(A), 2, 2, rng)
    assert res.x[3] == 1.0
    assert np.all(np.abs(res.x) == 1.0)
    # triangle inequality ledger and independent value recomputation
    assert res.value <= sum(res.per_round_values) + 1e-9
    assert res.value == pytest.approx(lp_norm(A @ res.x, 2), rel=1e-9)
    # geometric decay of the free-coordinate counts
    for a, b in zip(res.per_round_free, res.per_round_free[1:]):
        assert b <= a // 2


def test_brute_force_duplicate_columns_cancel():
    v = np.array([0.7, -0.2, 0.1])
    _, value = brute_force_min_discrepancy(DenseMatrix(np.column_stack([v, v])), 2)
    assert value == 0.0


def test_brute_force_identity_two():
    x, value = brute_force_min_discrepancy(DenseMatrix(np.eye(2)), 2)
    assert value == pytest.approx(math.sqrt(2.0), rel=1e-12)


def test_brute_force_three_columns_sup_norm():
    A = DenseMatrix(np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]))
    x, value = brute_force_min_discrepancy(A, math.inf)
    assert value == 0.0  # (+1, +1, -1) cancels exactly
    assert np.max(np.abs(A.entries @ x)) == 0.0


def test_brute_force_matches_itertools_enumeration():
    rng = np.random.default_rng(8)
    A = rng.standard_normal((5, 7))
    for q in (1, 2, math.inf):
        _, fast = brute_force_min_discrepancy(DenseMatrix(A), q)
        slow = min(lp_norm(A @ np.array(signs), q)
                   for signs in itertools.product((-1.0, 1.0), repeat=7))
        assert fast == pytest.approx(slow, rel=1e-12)


def test_brute_force_size_guard():
    with pytest.raises(ValueError, match="too large"):
        brute_force_min_discrepancy(DenseMatrix(np.zeros((2, 25))), 2)


def test_full_coloring_sandwich_oracle_and_calibrated_bound():
    # oracle <= walk value <= K_FULL * the summed bound shape
    from carabal import config
    for seed in range(50):
        rng = np.random.default_rng(np.random.SeedSequence([9, seed]))
        A = random_ball_instance(12, 12, PNorm(2), rng)
        res = full_coloring(A, 2, 2, rng)
        _, opt = brute_force_min_discrepancy(A, 2)
        assert res.value >= opt - 1e-12
        assert res.value <= config.K_FULL * vb_bound(2, 2, 12, 12)
