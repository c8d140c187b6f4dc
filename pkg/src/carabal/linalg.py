"""lp norms, dense matrices, and the subspace machinery used by the random walk."""

import math
from dataclasses import dataclass

import numpy as np

# Rank decisions use this relative threshold against the largest spanner norm.
RANK_RTOL = 1e-10
ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class PNorm:
    """Exponent of an lp norm.

    `value` is a float >= 1; math.inf is the sup norm and is kept exact
    (1/inf == 0, comparisons against finite exponents behave as expected).
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v < 1.0:
            raise ValueError(f"norm exponent must be >= 1 or inf, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, spec):
        """Accept a PNorm, a number, or a string like '2', '2.5', 'inf'."""
        if isinstance(spec, PNorm):
            return spec
        if isinstance(spec, str):
            s = spec.strip().lower()
            if s in ("inf", "infty", "infinity", "oo"):
                return cls(math.inf)
            return cls(float(s))
        return cls(float(spec))

    @property
    def is_inf(self):
        return math.isinf(self.value)

    @property
    def inv(self):
        """1/p, exactly 0.0 for p = inf."""
        return 0.0 if self.is_inf else 1.0 / self.value

    def __str__(self):
        if self.is_inf:
            return "inf"
        if self.value == int(self.value):
            return str(int(self.value))
        return repr(self.value)


INF = PNorm(math.inf)


def lp_norm(z, p):
    """(sum |z_i|^p)^(1/p) for finite p, max |z_i| for p = inf.

    Computed with max-factoring (all ratios <= 1) so large exponents cannot
    overflow.  Empty vectors have norm 0.
    """
    z = np.asarray(z, dtype=float)
    if z.size == 0:
        return 0.0
    a = np.abs(z)
    top = float(a.max())
    if top == 0.0:
        return 0.0
    p = PNorm.parse(p)
    if p.is_inf:
        return top
    ratios = a / top
    total = float(np.sum(ratios ** p.value))
    return top * total ** (1.0 / p.value)


def lp_norm_cols(V, p):
    """lp norm of every column of a 2-d array (max-factored, overflow safe)."""
    V = np.asarray(V, dtype=float)
    if V.shape[1] == 0:
        return np.zeros(0)
    if V.shape[0] == 0:
        return np.zeros(V.shape[1])
    a = np.abs(V)
    p = PNorm.parse(p)
    if p.is_inf:
        return a.max(axis=0)
    tops = a.max(axis=0)
    safe = np.where(tops > 0.0, tops, 1.0)
    vals = safe * np.sum((a / safe) ** p.value, axis=0) ** (1.0 / p.value)
    return np.where(tops > 0.0, vals, 0.0)


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal vectors (rows of `vectors`) spanning a subspace of R^n."""

    n: int
    vectors: np.ndarray  # (dim, n), orthonormal rows

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float).reshape(-1, self.n)
        object.__setattr__(self, "vectors", v)
        if v.shape[0] > 0:
            gram = v @ v.T
            if np.max(np.abs(gram - np.eye(v.shape[0]))) > ORTHO_TOL:
                raise ValueError("basis vectors are not orthonormal")

    @property
    def dim(self):
        return self.vectors.shape[0]

    def project(self, x):
        """Orthogonal projection of x onto the subspace."""
        x = np.asarray(x, dtype=float)
        if self.dim == 0:
            return np.zeros(self.n)
        return self.vectors.T @ (self.vectors @ x)


def _append_orthonormal(rows, count, v, tol):
    """CGS2 step: project v against rows[:count] twice, keep it if it survives.

    Returns the new row count.  `rows` is mutated in place.
    """
    w = np.array(v, dtype=float, copy=True)
    for _ in range(2):
        if count:
            w -= rows[:count].T @ (rows[:count] @ w)
    nrm = float(np.linalg.norm(w))
    if nrm <= tol:
        return count
    rows[count] = w / nrm
    return count + 1


def orthonormal_complement_basis(spanners, n=None):
    """Orthonormal basis of the orthogonal complement of span(spanners).

    Rank is decided by repeated Gram-Schmidt with a residual threshold of
    RANK_RTOL times the largest spanner norm.  An empty spanner set yields
    the standard basis of R^n (n must then be passed explicitly).
    """
    vecs = [np.asarray(s, dtype=float).reshape(-1) for s in spanners]
    if n is None:
        if not vecs:
            raise ValueError("need explicit n for an empty spanner set")
        n = vecs[0].size
    for v in vecs:
        if v.size != n:
            raise ValueError(f"spanner of dimension {v.size}, expected {n}")

    rows = np.zeros((n, n))
    count = 0
    if vecs:
        span_tol = RANK_RTOL * max(float(np.linalg.norm(v)) for v in vecs)
        for v in vecs:
            count = _append_orthonormal(rows, count, v, max(span_tol, 1e-300))
    rank = count
    for j in range(n):
        if count == n:
            break
        e = np.zeros(n)
        e[j] = 1.0
        count = _append_orthonormal(rows, count, e, RANK_RTOL)
    return SubspaceBasis(n=n, vectors=rows[rank:count].copy())


def sample_unit_in_subspace(basis, rng):
    """Uniform random unit vector of span(basis): normal coefficients, normalized."""
    if basis.dim == 0:
        raise ValueError("empty subspace")
    while True:
        coeff = rng.standard_normal(basis.dim)
        v = coeff @ basis.vectors
        nrm = float(np.linalg.norm(v))
        if nrm > 1e-12:
            return v / nrm


class DenseMatrix:
    """Dense real m x n matrix; rows are constraints, columns the balanced vectors.

    Row l2 norms are cached on first use, column lp norms per exponent.
    """

    def __init__(self, entries):
        a = np.ascontiguousarray(entries, dtype=float)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {a.shape}")
        if a.size and not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        self.entries = a
        self._row_norms = None
        self._col_norms = {}

    @property
    def m(self):
        return self.entries.shape[0]

    @property
    def n(self):
        return self.entries.shape[1]

    def row_norms(self):
        """Per-row l2 norms."""
        if self._row_norms is None:
            self._row_norms = np.linalg.norm(self.entries, axis=1) if self.n else np.zeros(self.m)
        return self._row_norms

    def col_norms(self, p):
        """Per-column lp norms."""
        p = PNorm.parse(p)
        key = p.value
        if key not in self._col_norms:
            self._col_norms[key] = np.array(
                [lp_norm(self.entries[:, j], p) for j in range(self.n)]
            )
        return self._col_norms[key]

    def __repr__(self):
        return f"DenseMatrix(m={self.m}, n={self.n})"


def as_matrix(a):
    """Coerce an ndarray or DenseMatrix to DenseMatrix."""
    return a if isinstance(a, DenseMatrix) else DenseMatrix(a)
