"""Capped partial-coloring random walk.

From a start point in [-1,1]^n the walk moves orthogonally to the current
point, to frozen coordinates, and to constraint rows whose deviation has
reached its cap, with the step length capped so the point never leaves the
feasible region.  A successful run ends with at least half the coordinates
frozen at exactly +-1 and every row deviation at most the cap.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .linalg import as_matrix

C1_DEFAULT = 1.0 / 16.0
C2_DEFAULT = 1.0 / 16.0

CHUNK = 64


@dataclass
class WalkConfig:
    """Parameters of one walk run.

    ``delta_cap`` is the absolute per-row deviation budget.  Fields left at
    None default at run time to the classical choices: 8n steps, dimension
    floor n // 8, success at ceil(n/2) frozen coordinates.
    """

    delta_cap: float
    c1: float = C1_DEFAULT
    c2: float = C2_DEFAULT
    max_steps: int | None = None
    dim_floor: int | None = None
    tight_tol: float = 1e-9
    max_restarts: int = 200
    success_count: int | None = None

    def __post_init__(self):
        if not (self.delta_cap >= 0.0):
            raise ValueError("delta_cap must be >= 0")
        if self.c1 <= 0.0 or self.c2 <= 0.0:
            raise ValueError("c1 and c2 must be positive")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")

    def resolved(self, n):
        """(max_steps, dim_floor, success_count) with defaults filled for size n."""
        max_steps = self.max_steps if self.max_steps is not None else 8 * n
        dim_floor = self.dim_floor if self.dim_floor is not None else n // 8
        success = self.success_count if self.success_count is not None else math.ceil(n / 2)
        return max_steps, dim_floor, success


@dataclass
class WalkState:
    """Mutable state of one run: current point, tight sets, deviations."""

    x: np.ndarray
    x0: np.ndarray
    caps: np.ndarray
    coord_tight: np.ndarray  # bool (n,)
    row_tight: np.ndarray    # bool (m,)
    dev: np.ndarray          # <A_i, x - x0> per row
    step_count: int = 0
    delta_last: float = 0.0

    @property
    def colored_count(self):
        return int(self.coord_tight.sum())

    @property
    def tight_coords(self):
        return np.flatnonzero(self.coord_tight)

    @property
    def tight_rows(self):
        return np.flatnonzero(self.row_tight)

    def copy(self):
        return WalkState(self.x.copy(), self.x0, self.caps,
                         self.coord_tight.copy(), self.row_tight.copy(),
                         self.dev.copy(), self.step_count, self.delta_last)


@dataclass
class PartialColoringSample:
    """Accepted output of the walk plus run diagnostics."""

    x: np.ndarray
    colored_count: int
    row_deviations: np.ndarray
    steps_used: int
    restarts_used: int
    draws_used: int = 1


def min_delta(A, c1=C1_DEFAULT, c2=C2_DEFAULT):
    """Smallest cap (to relative 1e-6) satisfying the feasibility condition.

    The condition is sum_i exp(-c1 * delta^2 / ||A_i||_2^2) <= c2 * n over
    rows with nonzero norm; it is monotone in delta, so bisection applies.
    Zero-row matrices (empty sum) give 0.
    """
    A = as_matrix(A)
    if A.m == 0:
        return 0.0
    if A.n < 1:
        raise ValueError("need at least one column")
    norms = A.row_norms()
    nz = norms[norms > 0.0]
    target = c2 * A.n
    if nz.size == 0 or nz.size <= target:
        return 0.0

    def lhs(d):
        return float(np.sum(np.exp(-c1 * (d / nz) ** 2)))

    hi = float(nz.max())
    while lhs(hi) > target:
        hi *= 2.0
    lo = 0.0
    while hi - lo > 1e-6 * hi:
        mid = 0.5 * (lo + hi)
        if lhs(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def delta_condition_holds(A, delta, c1=C1_DEFAULT, c2=C2_DEFAULT, slack=1e-6,
                          free=None):
    """True when delta satisfies the feasibility condition (with relative slack).

    With `free` (boolean column mask) the condition is evaluated for the
    restricted instance the walk actually moves in: restricted row norms and
    the free-column count.
    """
    A = as_matrix(A)
    entries = A.entries if free is None else A.entries[:, free]
    n = entries.shape[1]
    if n == 0:
        return True
    norms = np.linalg.norm(entries, axis=1)
    nz = norms[norms > 0.0]
    if nz.size == 0:
        return True
    lhs = float(np.sum(np.exp(-c1 * (delta / nz) ** 2)))
    return lhs <= c2 * n * (1.0 + slack)


def build_caps(A, delta):
    """Absolute per-row deviation budgets: delta, and +inf for zero rows."""
    if delta < 0.0:
        raise ValueError("delta must be >= 0")
    A = as_matrix(A)
    norms = A.row_norms()
    return np.where(norms > 0.0, float(delta), np.inf)


def initial_state(A, x0, cfg):
    """Fresh WalkState at x0; coordinates already within tight_tol of +-1 get snapped."""
    A = as_matrix(A)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (A.n,):
        raise ValueError(f"x0 must have shape ({A.n},), got {x0.shape}")
    if np.max(np.abs(x0), initial=0.0) > 1.0 + cfg.tight_tol:
        raise ValueError("x0 must lie in [-1, 1]^n")
    caps = build_caps(A, cfg.delta_cap)
    x = x0.copy()
    tight = np.abs(x) >= 1.0 - cfg.tight_tol
    x[tight] = np.sign(x[tight])
    row_tight = caps <= cfg.tight_tol
    return WalkState(x=x, x0=x0, caps=caps, coord_tight=tight,
                     row_tight=row_tight, dev=np.zeros(A.m))


def walk_step(state, A, cfg, rng):
    """One step of the walk.

    Returns (state, status) with status in {"running", "success", "fail"}.
    Success is checked before stepping (a start point with enough frozen
    coordinates is already terminal) and after; a dimension-floor hit or an
    exhausted step budget fails the run.
    """
    A = as_matrix(A)
    m, n = A.m, A.n
    max_steps, dim_floor, success = cfg.resolved(n)
    if state.colored_count >= success:
        return state, "success"
    if state.step_count >= max_steps:
        return state, "fail"
    new = state.copy()
    gauss = rng.standard_normal((1, n))
    signs = np.where(rng.random(1) < 0.5, -1.0, 1.0)
    deltas = np.zeros(1)
    status, done = _kernels.advance_chunk(
        new.x, new.dev, new.coord_tight, new.row_tight, A.entries, new.caps,
        gauss, signs, cfg.tight_tol, dim_floor, success, deltas,
        np.empty((m + 1, n)), np.empty(n), np.empty(m))
    if status == _kernels.DIM_FAIL:
        return state, "fail"
    new.step_count += done
    new.delta_last = float(deltas[0])
    if status == _kernels.SUCCESS:
        return new, "success"
    if new.step_count >= max_steps:
        return new, "fail"
    return new, "running"


def sample_partial_coloring(A, x0, cfg, rng):
    """Run the walk (restarting on failure) until a successful sample.

    The output deterministically has >= the configured number of coordinates
    at exactly +-1 and every row deviation within its cap.  An infeasible
    delta_cap is warned about, not rejected; if every restart fails a
    RuntimeError is raised (the cap is far below the feasible threshold).
    """
    A = as_matrix(A)
    mat = A.entries
    m, n = A.m, A.n
    max_steps, dim_floor, success = cfg.resolved(n)
    x0 = np.asarray(x0, dtype=float)
    free = np.abs(x0) < 1.0 - cfg.tight_tol
    if not delta_condition_holds(A, cfg.delta_cap, cfg.c1, cfg.c2, free=free):
        warnings.warn("delta_cap does not satisfy the feasibility condition; "
                      "the walk may fail to converge", stacklevel=2)

    ws_q = np.empty((m + 1, n))
    ws_w = np.empty(n)
    ws_rate = np.empty(m)
    deltas = np.empty(CHUNK)

    for restart in range(cfg.max_restarts):
        state = initial_state(A, x0, cfg)
        x, dev = state.x, state.dev
        coord_tight, row_tight = state.coord_tight, state.row_tight
        if int(coord_tight.sum()) >= success:
            return _finish(A, x, x0, 0, restart)
        steps_used = 0
        while steps_used < max_steps:
            chunk = min(CHUNK, max_steps - steps_used)
            gauss = rng.standard_normal((chunk, n))
            signs = np.where(rng.random(chunk) < 0.5, -1.0, 1.0)
            status, done = _kernels.advance_chunk(
                x, dev, coord_tight, row_tight, mat, state.caps, gauss, signs,
                cfg.tight_tol, dim_floor, success, deltas[:chunk],
                ws_q, ws_w, ws_rate)
            steps_used += done
            if status == _kernels.SUCCESS:
                return _finish(A, x, x0, steps_used, restart)
            if status == _kernels.DIM_FAIL:
                break
        # dimension floor hit or step budget exhausted: restart
    raise RuntimeError(
        f"walk failed to converge after {cfg.max_restarts} restarts "
        f"(delta_cap={cfg.delta_cap:.6g} is likely below the feasible threshold)")


def _finish(A, x, x0, steps_used, restarts_used):
    dev = np.abs(A.entries @ (x - x0))
    return PartialColoringSample(
        x=x.copy(),
        colored_count=int(np.sum(np.abs(x) == 1.0)),
        row_deviations=dev,
        steps_used=steps_used,
        restarts_used=restarts_used,
    )
