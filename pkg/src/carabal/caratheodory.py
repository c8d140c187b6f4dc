"""Sparse unweighted averages of convex combinations.

A point z = sum lambda_i v_i with points in the lp unit ball is rewritten as
the average of exactly k points (repetition allowed) with small lq error.
The weights are put on a dyadic grid, the grid fractionality is halved one
bit at a time by coloring the odd-bit support, and the translation trick
(subtracting a hull point so the zero vector is available for padding)
yields exactly k indices.  Independent-sampling and brute-force enumeration
baselines are included.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .balancing import full_coloring
from .linalg import PNorm, lp_norm, lp_norm_cols

BALL_TOL = 1e-9
GRID_TOL = 1e-9
ORACLE_BUDGET = 2_000_000


class ConvexCombination:
    """Points as columns of an m x n matrix with nonnegative weights.

    The weight sum may be below 1 (the rounding stages produce subconvex
    iterates); entry points that require a true convex combination call
    :meth:`require_convex`.  ``target`` caches points @ weights.
    """

    def __init__(self, points, weights):
        P = np.ascontiguousarray(points, dtype=float)
        w = np.ascontiguousarray(weights, dtype=float)
        if P.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got shape {P.shape}")
        if w.shape != (P.shape[1],):
            raise ValueError(f"{P.shape[1]} points but {w.shape} weights")
        if P.size and not np.all(np.isfinite(P)):
            raise ValueError("points must be finite")
        if w.size and not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if w.size and float(w.min()) < 0.0:
            raise ValueError("weights must be nonnegative")
        if float(w.sum()) > 1.0 + 1e-12:
            raise ValueError("weights must sum to at most 1")
        self.points = P
        self.weights = w
        self.target = P @ w

    @property
    def m(self):
        return self.points.shape[0]

    @property
    def n(self):
        return self.points.shape[1]

    @property
    def total_weight(self):
        return float(self.weights.sum())

    def require_convex(self):
        if abs(self.total_weight - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        return self

    def __repr__(self):
        return f"ConvexCombination(m={self.m}, n={self.n}, mass={self.total_weight:.6g})"


@dataclass
class LevelRecord:
    """Diagnostics of one fractionality-halving step."""

    delta: float
    support: int
    realized_error: float
    color_sum: int
    mass_before: float = 0.0
    mass_after: float = 0.0


@dataclass
class CaraSolution:
    """Multiset of exactly k column indices and the achieved lq error."""

    indices: np.ndarray
    error_q: float
    method: str
    per_level_errors: list = field(default_factory=list)
    grid_error: float = 0.0
    levels: list = field(default_factory=list)

    @property
    def k(self):
        return int(self.indices.size)


def grid_unit(k, L):
    """The grid spacing 2^-L / k."""
    return 2.0 ** (-L) / k


def round_weights_to_grid(weights, k, L):
    """Largest-remainder rounding of weights onto the grid 2^-L / k.

    Returns integer grid-unit counts summing to exactly k * 2^L (so the
    rounded weights sum to exactly 1 in grid units); each weight moves by
    less than one grid unit.  Ties go to the lower index.
    """
    w = np.asarray(weights, dtype=float)
    if k < 1 or L < 1:
        raise ValueError("need k >= 1 and L >= 1")
    total_units = k * (1 << L)
    scaled = w * total_units
    floors = np.floor(scaled).astype(np.int64)
    residual = total_units - int(floors.sum())
    if residual < 0 or residual > w.size:
        raise ValueError("weights do not sum to 1")
    if residual:
        remainders = scaled - floors
        order = np.argsort(-remainders, kind="stable")
        floors[order[:residual]] += 1
    return floors


def _to_units(weights, delta):
    units = np.rint(np.asarray(weights, dtype=float) / delta).astype(np.int64)
    if np.max(np.abs(units * delta - weights), initial=0.0) > GRID_TOL:
        raise ValueError("grid violation: weights are not multiples of delta")
    if units.size and int(units.min()) < 0:
        raise ValueError("grid violation: negative weight")
    return units


def halve_fractionality(comb, delta, p, q, rng, colorer=None):
    """Rewrite weights on the delta grid as weights on the 2*delta grid.

    The odd-bit support is colored (default: the full-coloring solver on
    those columns); the coloring is flipped if its sum is positive, so total
    mass never grows.  Returns (new_combination, realized_error, record)
    where realized_error = delta * ||sum_{i in I} x_i v_i||_q.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    p, q = PNorm.parse(p), PNorm.parse(q)
    units = _to_units(comb.weights, delta)
    odd = (units % 2) == 1
    support = np.flatnonzero(odd)
    mass = float(units.sum()) * delta
    if support.size == 0:
        rec = LevelRecord(delta=delta, support=0, realized_error=0.0,
                          color_sum=0, mass_before=mass, mass_after=mass)
        return ConvexCombination(comb.points, comb.weights.copy()), 0.0, rec

    sub = comb.points[:, support]
    if colorer is None:
        # the balancing gate needs a norm at least as coarse as p; the
        # realized error below is still measured in the requested q
        gate = q if q.value >= p.value else p
        x = full_coloring(sub, p, gate, rng).x
    else:
        x = np.asarray(colorer(sub, rng), dtype=float)
    if x.shape != (support.size,) or not np.all(np.abs(x) == 1.0):
        raise ValueError("colorer must return a +-1 vector over the support")
    if float(x.sum()) > 0.0:
        x = -x

    new_units = units // 2
    new_units[support] += (x > 0.0).astype(np.int64)
    realized = delta * lp_norm(sub @ x, q)
    new_weights = new_units.astype(float) * (2.0 * delta)
    rec = LevelRecord(delta=delta, support=int(support.size),
                      realized_error=float(realized), color_sum=int(x.sum()),
                      mass_before=mass,
                      mass_after=float(new_units.sum()) * 2.0 * delta)
    return ConvexCombination(comb.points, new_weights), float(realized), rec


def reduce_to_multiples(comb, k, L, p, q, rng, colorer=None):
    """Halve the grid L times until every weight is a multiple of 1/k.

    Returns (multiplicities, records): integer counts c with sum(c) <= k,
    and the per-level diagnostics.  The total error is at most the sum of
    realized per-level errors by the triangle inequality.
    """
    current = comb
    records = []
    for level in range(L, 0, -1):
        delta = grid_unit(k, level)
        current, _, rec = halve_fractionality(current, delta, p, q, rng, colorer)
        records.append(rec)
    counts = _to_units(current.weights, 1.0 / k)
    if int(counts.sum()) > k:
        raise AssertionError("mass conservation violated")
    return counts, records


def default_levels(m):
    """Default number of grid bits: ceil(log2(m+1)) + 3."""
    return math.ceil(math.log2(m + 1)) + 3


def approx_caratheodory(comb, k, p, q, rng, L=None):
    """Pick exactly k points of X (with repetition) averaging close to z.

    Requires every point in the lp unit ball (tolerance 1e-9; offending
    inputs are rejected, never rescaled).  The instance is translated by the
    heaviest point so the zero vector is available, reduced level by level,
    padded back to exactly k, and mapped to indices into the original X.
    """
    p, q = PNorm.parse(p), PNorm.parse(q)
    if p.value < 2.0:
        raise ValueError("parameter range: need p >= 2 (no bound is known below)")
    if k < 1:
        raise ValueError("need k >= 1")
    comb.require_convex()
    norms = lp_norm_cols(comb.points, p)
    if norms.size and float(norms.max()) > 1.0 + BALL_TOL:
        raise ValueError(
            f"point outside unit ball: max lp norm {float(norms.max()):.12g}")

    m, n = comb.m, comb.n
    pivot = int(np.argmax(comb.weights))
    u0 = comb.points[:, pivot].copy()
    translated = comb.points - u0[:, None]  # column `pivot` becomes zero

    if L is None:
        L = default_levels(m)
    units = round_weights_to_grid(comb.weights, k, L)
    grid_weights = units.astype(float) * grid_unit(k, L)
    grid_error = lp_norm(translated @ (grid_weights - comb.weights), q)

    gate = q if q.value >= p.value else p

    def colorer(sub, rng_):
        # translated points live in 2 * B_p; halve them to meet the solver's
        # ball precondition (the realized error is measured on `sub` itself,
        # so the factor 2 lands in the ledger automatically)
        return full_coloring(sub * 0.5, p, gate, rng_).x

    start = ConvexCombination(translated, grid_weights)
    counts, records = reduce_to_multiples(start, k, L, p, q, rng, colorer=colorer)
    counts[pivot] += k - int(counts.sum())  # pad with the zero point == u0

    indices = np.repeat(np.arange(n), counts)
    average = comb.points[:, indices].sum(axis=1) / k
    error = lp_norm(comb.target - average, q)
    return CaraSolution(indices=indices, error_q=float(error), method="walk",
                        per_level_errors=[r.realized_error for r in records],
                        grid_error=float(grid_error), levels=records)


def maurey_sample(comb, k, q, rng):
    """k i.i.d. index draws according to the weights (the classical baseline)."""
    if k < 1:
        raise ValueError("need k >= 1")
    comb.require_convex()
    q = PNorm.parse(q)
    indices = np.sort(rng.choice(comb.n, size=k, replace=True, p=comb.weights))
    average = comb.points[:, indices].sum(axis=1) / k
    error = lp_norm(comb.target - average, q)
    return CaraSolution(indices=indices, error_q=float(error), method="maurey")


def brute_force_ac(comb, k, q):
    """Exact optimum over all size-k multisets of the points.

    Budget-limited: C(n+k-1, k) must not exceed 2e6 combinations.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    q = PNorm.parse(q)
    n = comb.n
    if math.comb(n + k - 1, k) > ORACLE_BUDGET:
        raise ValueError("instance too large for oracle")

    P = comb.points
    z = comb.target
    best = [math.inf, None]

    def descend(start, chosen, acc):
        if len(chosen) == k - 1:
            cols = P[:, start:]
            errs = lp_norm_cols(z[:, None] - (acc[:, None] + cols) / k, q)
            j = int(np.argmin(errs))
            if errs[j] < best[0]:
                best[0] = float(errs[j])
                best[1] = chosen + [start + j]
            return
        for j in range(start, n):
            descend(j, chosen + [j], acc + P[:, j])

    descend(0, [], np.zeros(comb.m))
    indices = np.array(best[1], dtype=np.int64)
    return CaraSolution(indices=indices, error_q=best[0], method="oracle")


def ac_bound(p, q, m, k):
    """Constant-free shape of the sparse-averaging bound.

    sqrt(min{p, max(2, ln(2m/k))}) / (k^(1/2+1/p-1/q) * (1/2-1/p+1/q));
    inf when the prefactor's denominator cancels (p=2, q=inf).  For q < p
    the lp shape is converted with ||z||_q <= m^(1/q-1/p) ||z||_p.
    """
    p, q = PNorm.parse(p), PNorm.parse(q)
    if p.value < 2.0:
        raise ValueError("parameter range: need p >= 2")
    if q.value < p.value:
        return m ** (q.inv - p.inv) * ac_bound(p, p, m, k)
    regime = min(p.value, max(2.0, math.log(2.0 * m / k))) if m >= 1 else p.value
    alpha = 0.5 - p.inv + q.inv
    power = 0.5 + p.inv - q.inv
    if alpha <= 0.0:
        return math.inf
    return math.sqrt(regime) / (k ** power * alpha)
