"""lp -> lq vector balancing built on the capped walk.

Columns of A live in the lp unit ball; the goal is a full +-1 coloring x
with small ||Ax||_q.  Partial colorings are drawn from the walk with an
instance-adaptive cap, accepted once they meet the expectation bound for the
current free-coordinate count, and iterated until every coordinate is
colored.  A brute-force enumeration oracle serves as the ground truth at
small sizes.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import config
from .linalg import PNorm, as_matrix, lp_norm, lp_norm_cols
from .walk import (PartialColoringSample, WalkConfig, min_delta,
                   sample_partial_coloring)

MAX_ACCEPT_DRAWS = 64
ORACLE_MAX_N = 24


@dataclass
class BalanceResult:
    """Full coloring with its value and per-round diagnostics."""

    x: np.ndarray
    value: float
    rounds: int
    per_round_values: list = field(default_factory=list)
    per_round_free: list = field(default_factory=list)
    restarts: int = 0


def _check_pq(p, q):
    p, q = PNorm.parse(p), PNorm.parse(q)
    if p.value < 2.0 or p.value > q.value:
        raise ValueError("parameter range: need 2 <= p <= q <= inf")
    return p, q


def balance_exponent(p, q):
    """The n-power exponent 1/2 - 1/p + 1/q of the balancing bound."""
    p, q = _check_pq(p, q)
    return 0.5 - p.inv + q.inv


def effective_exponent(p, m, n_free):
    """min{p, ln(e^2 m / n)} clamped to >= 2: the exponent the cap is tuned for.

    Beyond p ~ ln(e^2 m/n) the column norms, not the exponent, limit the
    walk, so the log regime takes over.
    """
    p = PNorm.parse(p)
    if n_free < 1:
        raise ValueError("need n_free >= 1")
    log_regime = math.log(math.e ** 2 * m / n_free) if m > 0 else math.inf
    return max(2.0, min(p.value, log_regime))


def vb_bound(p, q, m, n):
    """Constant-free shape of the full-coloring bound.

    sqrt(min{p, max(2, ln(2m/n))}) * n^(1/2-1/p+1/q) / (1/2-1/p+1/q); the
    regime term is floored at 2 because the effective exponent never drops
    below 2.  Returns inf when the exponent cancels (p=2, q=inf).
    """
    p, q = _check_pq(p, q)
    if not (1 <= n <= m):
        raise ValueError("parameter range: need 1 <= n <= m")
    regime = min(p.value, max(2.0, math.log(2.0 * m / n)))
    alpha = 0.5 - p.inv + q.inv
    if alpha <= 0.0:
        return math.inf
    return math.sqrt(regime) * n ** alpha / alpha


def round_shape(p, q, m, n_free):
    """Per-round expectation shape sqrt(p0) * n_free^(1/2-1/p+1/q)."""
    p, q = _check_pq(p, q)
    p0 = effective_exponent(p, m, n_free)
    alpha = 0.5 - p.inv + q.inv
    return math.sqrt(p0) * n_free ** alpha


def delta_for_lp_columns(p, n, c1=1.0 / 16.0, c2=1.0 / 16.0):
    """Cap guaranteed feasible for any matrix with lp-unit columns.

    sqrt(p) * n^(1/2-1/p) / (sqrt(c1) * c2^(1/p)); follows from bounding each
    exponential by p^(p/2) y^(p/2) and the row/column norm exchange.
    """
    p = PNorm.parse(p)
    if p.is_inf or p.value < 2.0:
        raise ValueError("need finite p >= 2 (substitute the effective exponent for inf)")
    pv = p.value
    return math.sqrt(pv) * n ** (0.5 - 1.0 / pv) / (math.sqrt(c1) * c2 ** (1.0 / pv))


def partial_color_pq(A, x0, p, q, rng, k_round=None, accept_factor=2.0,
                     c1=1.0 / 16.0, c2=1.0 / 16.0):
    """One accepted partial coloring of the free coordinates of x0.

    The cap is the smallest feasible one for the free-column submatrix and
    the success target freezes at least half of the free coordinates.  Draws
    are repeated until ||A(x-x0)||_q meets accept_factor * k_round * shape
    (sup norm: the cap already bounds it, the first draw is accepted).
    """
    p, q = _check_pq(p, q)
    A = as_matrix(A)
    mat = A.entries
    m, n = A.m, A.n
    x0 = np.asarray(x0, dtype=float)
    if k_round is None:
        k_round = config.K_ROUND

    tight_tol = 1e-9
    free = np.abs(x0) < 1.0 - tight_tol
    n_free = int(free.sum())
    if n_free == 0:
        x = np.sign(x0) * 1.0
        return PartialColoringSample(x, n, np.abs(mat @ (x - x0)), 0, 0, 1)
    if n_free == 1:
        # the walk cannot move a lone free coordinate orthogonally to itself;
        # flip it with the mean-preserving coin
        j = int(np.flatnonzero(free)[0])
        x = x0.copy()
        x[~free] = np.sign(x0[~free])
        x[j] = 1.0 if rng.random() < (1.0 + x0[j]) / 2.0 else -1.0
        return PartialColoringSample(x, n, np.abs(mat @ (x - x0)), 0, 0, 1)

    sub = mat[:, free]
    delta = min_delta(sub, c1, c2)
    tight0 = n - n_free
    cfg = WalkConfig(delta_cap=delta, c1=c1, c2=c2,
                     max_steps=8 * n_free,
                     dim_floor=n_free // 8,
                     success_count=tight0 + math.ceil(n_free / 2),
                     tight_tol=tight_tol)

    if q.is_inf:
        sample = sample_partial_coloring(A, x0, cfg, rng)
        sample.draws_used = 1
        return sample

    scale = max(float(np.max([lp_norm(sub[:, j], p) for j in range(n_free)])), 1e-300)
    threshold = accept_factor * k_round * scale * round_shape(p, q, m, n_free)
    steps = restarts = 0
    for draw in range(1, MAX_ACCEPT_DRAWS + 1):
        sample = sample_partial_coloring(A, x0, cfg, rng)
        steps += sample.steps_used
        restarts += sample.restarts_used
        value = lp_norm(mat @ (sample.x - x0), q)
        if value <= threshold:
            sample.steps_used = steps
            sample.restarts_used = restarts
            sample.draws_used = draw
            return sample
    raise RuntimeError(
        f"expectation bound violated: no draw within {threshold:.6g} "
        f"after {MAX_ACCEPT_DRAWS} attempts (miscalibrated constant?)")


def full_coloring(A, p, q, rng, k_round=None):
    """Iterate partial colorings until every coordinate is at +-1."""
    p, q = _check_pq(p, q)
    A = as_matrix(A)
    mat = A.entries
    n = A.n
    x = np.zeros(n)
    # zero columns contribute nothing; color them up front
    if n:
        zero_cols = ~np.any(mat != 0.0, axis=0) if A.m else np.ones(n, dtype=bool)
        x[zero_cols] = 1.0

    per_round = []
    free_counts = []
    rounds = 0
    restarts = 0
    while True:
        free = np.abs(x) < 1.0
        n_free = int(free.sum())
        if n_free == 0:
            break
        free_counts.append(n_free)
        sample = partial_color_pq(A, x, p, q, rng, k_round=k_round)
        per_round.append(lp_norm(mat @ (sample.x - x), q))
        restarts += sample.restarts_used
        x = sample.x
        rounds += 1
        if rounds > 4 * max(1, math.ceil(math.log2(n + 1)) + 4):
            raise RuntimeError("full coloring failed to converge")
    value = lp_norm(mat @ x, q)
    return BalanceResult(x=x, value=value, rounds=rounds,
                         per_round_values=per_round, per_round_free=free_counts,
                         restarts=restarts)


def brute_force_min_discrepancy(A, q, block_bits=14):
    """Exact minimum of ||Ax||_q over all +-1 colorings (n <= 24).

    The x <-> -x symmetry halves the enumeration: the last coordinate is
    pinned to +1.
    """
    q = PNorm.parse(q)
    A = as_matrix(A)
    mat = A.entries
    m, n = A.m, A.n
    if n > ORACLE_MAX_N:
        raise ValueError(f"instance too large for oracle (n={n} > {ORACLE_MAX_N})")
    if n == 0:
        return np.zeros(0), 0.0
    if m == 0:
        return np.ones(n), 0.0

    total = 1 << (n - 1)
    block = 1 << min(block_bits, n - 1) if n > 1 else 1
    best_val = math.inf
    best_idx = 0
    shifts = np.arange(n - 1, dtype=np.uint64)
    for start in range(0, max(total, 1), max(block, 1)):
        stop = min(start + block, total)
        codes = np.arange(start, stop, dtype=np.uint64)
        X = np.ones((stop - start, n))
        if n > 1:
            bits = (codes[:, None] >> shifts[None, :]) & 1
            X[:, : n - 1] = 2.0 * bits - 1.0
        vals = lp_norm_cols(mat @ X.T, q)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_idx = start + i

    x = np.ones(n)
    if n > 1:
        bits = (np.uint64(best_idx) >> shifts) & np.uint64(1)
        x[: n - 1] = 2.0 * bits.astype(float) - 1.0
    return x, best_val
