"""Inner loop of the capped partial-coloring walk.

Two interchangeable implementations of the per-step work (rebuild the frozen
subspace, project the random direction, cap the step, update tight sets):

* ``_chunk_loops``   scalar loops, compiled with numba @njit when available
* ``_chunk_numpy``   vectorized pure-numpy fallback

The fallback is selected by setting ``CARABAL_PURE_NUMPY=1`` in the
environment (or via :func:`set_backend`); it is also used automatically when
numba cannot be imported.  ``benchmarks/bench_walk.py`` compares the two.
"""

import math
import os

import numpy as np

_FORCE_NUMPY = os.environ.get("CARABAL_PURE_NUMPY", "").strip().lower() not in (
    "", "0", "false", "no",
)

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

_backend = "numba" if (_HAVE_NUMBA and not _FORCE_NUMPY) else "numpy"


def current_backend():
    return _backend


def set_backend(name):
    """Switch between 'numba' and 'numpy' at runtime (used by tests/benchmarks)."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    _backend = name


# Chunk status codes shared by both implementations.
RUNNING = 0
SUCCESS = 1
DIM_FAIL = 2


def _append_row(rows, count, w, orig_norm):
    # CGS2: project w against rows[:count] twice, keep the remainder if its
    # norm survives the relative rank threshold.  Near-zero inputs (e.g. the
    # current point at the origin) span nothing and are skipped.
    n = w.shape[0]
    if orig_norm < 1e-12:
        return count
    for _ in range(2):
        for i in range(count):
            dot = 0.0
            for j in range(n):
                dot += w[j] * rows[i, j]
            for j in range(n):
                w[j] -= dot * rows[i, j]
    nrm2 = 0.0
    for j in range(n):
        nrm2 += w[j] * w[j]
    nrm = math.sqrt(nrm2)
    if nrm <= 1e-10 * orig_norm:
        return count
    inv = 1.0 / nrm
    for j in range(n):
        rows[count, j] = w[j] * inv
    return count + 1


def _chunk_loops(x, dev, coord_tight, row_tight, A, caps, gauss, signs,
                 tight_tol, dim_floor, success_count, deltas, ws_q, ws_w, ws_rate):
    m, n = A.shape
    steps = gauss.shape[0]
    for s in range(steps):
        # subspace of still-walkable directions: orthogonal to the current
        # point and to every tight constraint row, zero on tight coordinates
        n_tight = 0
        for j in range(n):
            if coord_tight[j]:
                n_tight += 1
        r = 0
        nrm2 = 0.0
        for j in range(n):
            if coord_tight[j]:
                ws_w[j] = 0.0
            else:
                ws_w[j] = x[j]
                nrm2 += x[j] * x[j]
        r = _append_row(ws_q, r, ws_w, math.sqrt(nrm2))
        for i in range(m):
            if row_tight[i]:
                nrm2 = 0.0
                for j in range(n):
                    if coord_tight[j]:
                        ws_w[j] = 0.0
                    else:
                        v = A[i, j]
                        ws_w[j] = v
                        nrm2 += v * v
                r = _append_row(ws_q, r, ws_w, math.sqrt(nrm2))
        dim = (n - n_tight) - r
        if dim <= dim_floor:
            return DIM_FAIL, s

        # uniform direction on the unit sphere of that subspace
        for j in range(n):
            ws_w[j] = 0.0 if coord_tight[j] else gauss[s, j]
        for _ in range(2):
            for i in range(r):
                dot = 0.0
                for j in range(n):
                    dot += ws_w[j] * ws_q[i, j]
                for j in range(n):
                    ws_w[j] -= dot * ws_q[i, j]
        nrm2 = 0.0
        for j in range(n):
            nrm2 += ws_w[j] * ws_w[j]
        nrm = math.sqrt(nrm2)
        if nrm < 1e-12:
            deltas[s] = 0.0
            continue
        inv = 1.0 / nrm
        for j in range(n):
            ws_w[j] *= inv

        # largest two-sided step keeping x inside the box and inside the caps
        rmax = np.inf
        for j in range(n):
            if not coord_tight[j]:
                au = abs(ws_w[j])
                if au > 1e-14:
                    t = (1.0 - abs(x[j])) / au
                    if t < rmax:
                        rmax = t
        for i in range(m):
            if not row_tight[i]:
                rate = 0.0
                for j in range(n):
                    rate += A[i, j] * ws_w[j]
                ws_rate[i] = rate
                ar = abs(rate)
                if ar > 1e-14:
                    t = (caps[i] - abs(dev[i])) / ar
                    if t < rmax:
                        rmax = t
        if rmax < 0.0:
            rmax = 0.0
        delta = 1.0 if rmax > 1.0 else rmax
        deltas[s] = delta
        step = signs[s] * delta

        for j in range(n):
            if not coord_tight[j]:
                xj = x[j] + step * ws_w[j]
                if xj >= 1.0 - tight_tol:
                    x[j] = 1.0
                    coord_tight[j] = True
                elif xj <= -1.0 + tight_tol:
                    x[j] = -1.0
                    coord_tight[j] = True
                else:
                    x[j] = xj
        for i in range(m):
            if not row_tight[i]:
                d = dev[i] + step * ws_rate[i]
                dev[i] = d
                if abs(d) >= caps[i] - tight_tol:
                    row_tight[i] = True
        cnt = 0
        for j in range(n):
            if coord_tight[j]:
                cnt += 1
        if cnt >= success_count:
            return SUCCESS, s + 1
    return RUNNING, steps


if _HAVE_NUMBA:
    _append_row = njit(cache=True)(_append_row)
    _chunk_loops = njit(cache=True)(_chunk_loops)


def _project_off(ws_q, r, w):
    for _ in range(2):
        if r:
            w -= ws_q[:r].T @ (ws_q[:r] @ w)
    return w


def _chunk_numpy(x, dev, coord_tight, row_tight, A, caps, gauss, signs,
                 tight_tol, dim_floor, success_count, deltas, ws_q, ws_w, ws_rate):
    m, n = A.shape
    steps = gauss.shape[0]
    for s in range(steps):
        free = ~coord_tight
        cands = [np.where(free, x, 0.0)]
        tight_idx = np.flatnonzero(row_tight)
        if tight_idx.size:
            cands.extend(A[tight_idx] * free)
        r = 0
        for v in cands:
            nrm0 = float(np.linalg.norm(v))
            if nrm0 < 1e-12:
                continue
            w = _project_off(ws_q, r, v.astype(float).copy())
            nrm = float(np.linalg.norm(w))
            if nrm > 1e-10 * nrm0:
                ws_q[r] = w / nrm
                r += 1
        dim = int(free.sum()) - r
        if dim <= dim_floor:
            return DIM_FAIL, s

        w = _project_off(ws_q, r, np.where(free, gauss[s], 0.0))
        nrm = float(np.linalg.norm(w))
        if nrm < 1e-12:
            deltas[s] = 0.0
            continue
        u = w / nrm

        rmax = np.inf
        au = np.abs(u[free])
        mask = au > 1e-14
        if mask.any():
            rmax = float(np.min((1.0 - np.abs(x[free][mask])) / au[mask]))
        rate = A @ u
        free_rows = ~row_tight
        ar = np.abs(rate[free_rows])
        mask = ar > 1e-14
        if mask.any():
            slack = (caps[free_rows] - np.abs(dev[free_rows]))[mask]
            rmax = min(rmax, float(np.min(slack / ar[mask])))
        rmax = max(rmax, 0.0)
        delta = min(1.0, rmax)
        deltas[s] = delta
        step = signs[s] * delta

        x[free] += step * u[free]
        hit_hi = free & (x >= 1.0 - tight_tol)
        hit_lo = free & (x <= -1.0 + tight_tol)
        x[hit_hi] = 1.0
        x[hit_lo] = -1.0
        coord_tight |= hit_hi | hit_lo
        dev[free_rows] += step * rate[free_rows]
        row_tight |= np.abs(dev) >= caps - tight_tol
        if int(coord_tight.sum()) >= success_count:
            return SUCCESS, s + 1
    return RUNNING, steps


def advance_chunk(x, dev, coord_tight, row_tight, A, caps, gauss, signs,
                  tight_tol, dim_floor, success_count, deltas, ws_q, ws_w, ws_rate):
    """Advance the walk by up to gauss.shape[0] steps; state arrays are mutated.

    Returns (status, steps_done) with status one of RUNNING/SUCCESS/DIM_FAIL.
    """
    args = (x, dev, coord_tight, row_tight, A, caps, gauss, signs,
            float(tight_tol), int(dim_floor), int(success_count),
            deltas, ws_q, ws_w, ws_rate)
    if _backend == "numba":
        return _chunk_loops(*args)
    return _chunk_numpy(*args)
