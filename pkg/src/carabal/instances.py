"""Instance generators and the plain-text matrix / combination formats.

Matrix format: first line ``m n``, then m lines of n reals separated by
single spaces (17 significant digits, so round-trips are bit exact).
Combination format: first line ``m n k``, second line the n weights, then
the m x n point matrix in the matrix format (including its own header).
"""

import math
from dataclasses import dataclass

import numpy as np

from .caratheodory import ConvexCombination
from .linalg import DenseMatrix, PNorm, as_matrix


def _unit_scale(count, p):
    """Scale s such that lp_norm of (s, ..., s) (count entries) is exactly 1.0.

    Mirrors lp_norm's max-factored evaluation; the last bit of s is adjusted
    so s * count**(1/p) rounds to exactly 1.0.  For rare (count, p) pairs the
    product grid steps over the value 1.0 entirely; the closest scale is then
    returned and the norm is off by one ulp.
    """
    p = PNorm.parse(p)
    if p.is_inf or count <= 1:
        return 1.0
    b = float(count) ** (1.0 / p.value)
    best = s = 1.0 / b
    best_gap = abs(best * b - 1.0)
    for _ in range(64):
        prod = s * b
        if prod == 1.0:
            return s
        if abs(prod - 1.0) < best_gap:
            best, best_gap = s, abs(prod - 1.0)
        s = float(np.nextafter(s, math.inf if prod < 1.0 else -math.inf))
    return best


def lower_bound_instance(m, n, p, rng):
    """Hard balancing instance: scaled random sign block, padded with zeros.

    The core block is m' x n' with i.i.d. +-1 entries scaled so every core
    column sits exactly on the lp unit sphere, where m' caps the row count
    at floor(2^p n') and n' = max(1, floor(n/8)) when there are too few rows
    for the tail bound (no column shrink when the row cap already applies).
    """
    p = PNorm.parse(p)
    if not (1 <= n <= m):
        raise ValueError("need 1 <= n <= m")
    cap = math.inf if p.is_inf else 2.0 ** p.value
    n_eff = n if m >= min(8.0, cap) * n else max(1, n // 8)
    if math.isfinite(cap) and cap * n_eff < m:
        m_eff = int(cap * n_eff)
    else:
        m_eff = m
    core = rng.integers(0, 2, size=(m_eff, n_eff)) * 2.0 - 1.0
    scale = _unit_scale(m_eff, p)
    A = np.zeros((m, n))
    A[:m_eff, :n_eff] = core * scale
    return DenseMatrix(A)


def spencer_instance(m, n, density, rng):
    """Random set system: i.i.d. Bernoulli(density) 0/1 incidence matrix."""
    if not (0.0 <= density <= 1.0):
        raise ValueError("density must be in [0, 1]")
    return DenseMatrix((rng.random((m, n)) < density).astype(float))


def simplex_instance(m):
    """Standard basis points with the uniform target (1/m, ..., 1/m)."""
    if m < 1:
        raise ValueError("need m >= 1")
    return ConvexCombination(np.eye(m), np.full(m, 1.0 / m))


def random_ball_instance(m, n, p, rng):
    """n columns drawn uniformly from the lp unit ball of R^m."""
    p = PNorm.parse(p)
    if p.is_inf:
        return DenseMatrix(rng.uniform(-1.0, 1.0, size=(m, n)))
    pv = p.value
    # Barthe-Guedon-Mendelson-Naor: g with density ~ exp(-|t|^p), W ~ Exp(1),
    # then g / (||g||_p^p + W)^(1/p) is uniform in the ball.
    mags = rng.standard_gamma(1.0 / pv, size=(m, n)) ** (1.0 / pv)
    signs = rng.integers(0, 2, size=(m, n)) * 2.0 - 1.0
    g = mags * signs
    w = rng.standard_exponential(n)
    denom = (np.sum(mags ** pv, axis=0) + w) ** (1.0 / pv)
    return DenseMatrix(g / denom)


def random_ball_combination(m, n, p, rng):
    """Uniform-in-ball points with uniform-simplex (Dirichlet) weights."""
    points = random_ball_instance(m, n, p, rng)
    weights = rng.dirichlet(np.ones(n))
    return ConvexCombination(points.entries, weights)


INSTANCE_KINDS = ("lower_bound", "spencer", "random_ball", "simplex")


@dataclass(frozen=True)
class InstanceSpec:
    """Validated description of a generated instance."""

    kind: str
    m: int
    n: int = 0
    k: int = 0
    p: PNorm = PNorm(2.0)
    q: PNorm = PNorm(2.0)
    density: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in INSTANCE_KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if self.m < 1:
            raise ValueError("need m >= 1")
        if self.kind != "simplex" and self.n < 1:
            raise ValueError("need n >= 1")
        if self.kind == "lower_bound" and self.n > self.m:
            raise ValueError("lower_bound needs n <= m")
        if self.kind == "spencer" and not (0.0 <= self.density <= 1.0):
            raise ValueError("density must be in [0, 1]")

    def build(self, rng=None):
        """Matrix (balancing kinds) or combination (hull kinds) for this spec."""
        if rng is None:
            rng = np.random.default_rng(np.random.SeedSequence(self.seed))
        if self.kind == "lower_bound":
            return lower_bound_instance(self.m, self.n, self.p, rng)
        if self.kind == "spencer":
            return spencer_instance(self.m, self.n, self.density, rng)
        if self.kind == "random_ball":
            return random_ball_instance(self.m, self.n, self.p, rng)
        return simplex_instance(self.m)

    def build_combination(self, rng=None):
        """Combination view: simplex directly, random_ball with Dirichlet weights."""
        if rng is None:
            rng = np.random.default_rng(np.random.SeedSequence(self.seed))
        if self.kind == "simplex":
            return simplex_instance(self.m)
        if self.kind == "random_ball":
            return random_ball_combination(self.m, self.n, self.p, rng)
        raise ValueError(f"kind {self.kind!r} has no combination form")


class ParseError(ValueError):
    """Malformed instance file; the message names the offending line."""


def _fmt(v):
    return format(float(v), ".17g")


def write_matrix(A, path):
    A = as_matrix(A)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{A.m} {A.n}\n")
        for row in A.entries:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def _parse_floats(parts, want, lineno, what):
    if len(parts) != want:
        raise ParseError(f"line {lineno}: expected {want} {what}, got {len(parts)}")
    try:
        vals = [float(t) for t in parts]
    except ValueError as exc:
        raise ParseError(f"line {lineno}: {exc}") from None
    for v in vals:
        if not math.isfinite(v):
            raise ParseError(f"line {lineno}: non-finite value")
    return vals


def _read_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read().splitlines()


def _parse_matrix_lines(lines, start):
    """Parse one matrix block beginning at lines[start]; returns (matrix, next_line)."""
    if start >= len(lines) or not lines[start].strip():
        raise ParseError("missing header")
    header = lines[start].split()
    if len(header) != 2:
        raise ParseError(f"line {start + 1}: expected header 'm n'")
    try:
        m, n = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(f"line {start + 1}: expected integer header 'm n'") from None
    if m < 0 or n < 0:
        raise ParseError(f"line {start + 1}: negative dimensions")
    rows = np.zeros((m, n))
    for i in range(m):
        lineno = start + 2 + i
        if start + 1 + i >= len(lines):
            raise ParseError(f"line {lineno}: unexpected end of file")
        rows[i] = _parse_floats(lines[start + 1 + i].split(), n, lineno, "values")
    return DenseMatrix(rows), start + 1 + m


def read_matrix(path):
    lines = _read_lines(path)
    matrix, _ = _parse_matrix_lines(lines, 0)
    return matrix


def write_combination(comb, k, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{comb.m} {comb.n} {int(k)}\n")
        fh.write(" ".join(_fmt(v) for v in comb.weights) + "\n")
        fh.write(f"{comb.m} {comb.n}\n")
        for row in comb.points:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def read_combination(path):
    """Returns (combination, k)."""
    lines = _read_lines(path)
    if not lines or not lines[0].strip():
        raise ParseError("missing header")
    header = lines[0].split()
    if len(header) != 3:
        raise ParseError("line 1: expected header 'm n k'")
    try:
        m, n, k = (int(t) for t in header)
    except ValueError:
        raise ParseError("line 1: expected integer header 'm n k'") from None
    if len(lines) < 2:
        raise ParseError("line 2: missing weights")
    weights = _parse_floats(lines[1].split(), n, 2, "weights")
    matrix, _ = _parse_matrix_lines(lines, 2)
    if matrix.m != m or matrix.n != n:
        raise ParseError("line 3: matrix header disagrees with combination header")
    return ConvexCombination(matrix.entries, weights), k
