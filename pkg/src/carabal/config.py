"""Calibrated constants used by acceptance thresholds and solver gates.

The asymptotic bounds hide universal constants; these were measured once by
the protocols in carabal.calibration (run `python -m carabal.calibration` to
regenerate) and rounded up to one significant digit.
"""

# Per-round gate: a partial coloring is accepted when ||A(x - x0)||_q is at
# most ACCEPT_FACTOR * K_ROUND * s_p * sqrt(p0) * n_free^(1/2 - 1/p + 1/q),
# where s_p is the largest free-column p-norm.  99th percentile of the
# ungated ratio over the calibration runs (p50 0.42, p99 0.82, max 1.05).
K_ROUND = 0.9

# Full-coloring value vs the summed bound shape (p50 0.34, p99 0.61).
K_FULL = 0.7

# Set-system ceiling: full-coloring sup-norm discrepancy of a 0/1 system is
# at most K_SPENCER * sqrt(n * ln(2m/n)) at desk scale (p50 2.06, max 3.23
# over the 256x256 calibration runs).
K_SPENCER = 4.0

# Log-regime sparse-averaging constant: median walk error at p = q = inf is
# at most K_LOG * sqrt(ln(2m/k) / k) (median ratio 0.90, max 1.34).
K_LOG = 2.0

# Independent-sampling baseline: median error at p = q = 2 is at most
# K_MAUREY * sqrt(2 / k) (median ratio 0.70, max 0.83).
K_MAUREY = 2.0

# Smallest brute-force minimum discrepancy seen on the 96x12 hard instances
# over the 40-seed calibration range (2.062), with a 0.8 safety factor.
LOWER_BOUND_FLOOR = 1.649
