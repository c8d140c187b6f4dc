#!/usr/bin/env python3
"""Render log-log error-vs-k scaling figures from sweep CSV files.

Reads the harness CSV schema (one row per trial, `# ...` summary lines
ignored), draws one median-error curve per method plus dashed reference
slope lines anchored at the first data point, and writes an SVG (default)
or PNG.  Purely a view of the CSV: nothing is recomputed.

    python3 plots/render.py --csv sweep.csv --out sweep.svg [--slopes s1,s2]

Output is byte-deterministic for a fixed input (fixed svg hash salt, no
embedded date), so rerenders can be diffed.
"""

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "carabal-plots"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

EXPECTED_SCHEMA = ("kind,m,n,k,p,q,seed,method,error,bound,ratio,"
                   "time_ms,restarts,rounds")


@dataclass
class PlotSpec:
    """What to read and what to draw."""

    csv_path: str
    out_path: str
    x_field: str = "k"
    y_field: str = "error"
    group_by: str = "method"
    slopes: list = field(default_factory=list)  # empty: derive from p and q


def _parse_exponent(text):
    return math.inf if text.strip().lower() == "inf" else float(text)


def _load_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh)
                if row and not row[0].lstrip().startswith("#")]
    if not rows:
        raise ValueError(f"no data rows; expected schema: {EXPECTED_SCHEMA}")
    return rows[0], rows[1:]


def _column_index(header, fields):
    missing = [name for name in fields if name not in header]
    if missing:
        raise ValueError(f"missing columns {missing}; "
                         f"expected schema: {EXPECTED_SCHEMA}")
    return {name: header.index(name) for name in fields}


def default_slopes(p, q):
    """-1/2 and the theoretical -(1/2 + 1/p - 1/q)."""
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    slopes = [-0.5, -(0.5 + inv_p - inv_q)]
    if abs(slopes[1] - slopes[0]) < 1e-12:
        return [slopes[0]]
    return slopes


def render_scaling_plot(spec):
    """Draw the figure described by `spec`; returns the output path."""
    header, body = _load_rows(spec.csv_path)
    fields = [spec.x_field, spec.y_field, spec.group_by, "p", "q"]
    idx = _column_index(header, fields)
    if not body:
        raise ValueError("no data rows")

    series = {}
    order = []
    for row in body:
        method = row[idx[spec.group_by]]
        if method not in series:
            series[method] = {}
            order.append(method)
        k = float(row[idx[spec.x_field]])
        series[method].setdefault(k, []).append(float(row[idx[spec.y_field]]))

    slopes = list(spec.slopes)
    if not slopes:
        slopes = default_slopes(_parse_exponent(body[0][idx["p"]]),
                                _parse_exponent(body[0][idx["q"]]))

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    anchor = None
    for method in order:
        ks = sorted(series[method])
        medians = [float(np.median(series[method][k])) for k in ks]
        line, = ax.plot(ks, medians, marker="o", label=method)
        line.set_gid(f"curve-{method}")
        if anchor is None:
            positive = [(k, v) for k, v in zip(ks, medians) if v > 0.0]
            if positive:
                anchor = positive[0]

    if anchor is not None:
        x0, y0 = anchor
        xs = np.array(sorted({k for bucket in series.values() for k in bucket}))
        for slope in slopes:
            ref, = ax.plot(xs, y0 * (xs / x0) ** slope, linestyle="--",
                           linewidth=1.0, color="gray",
                           label=f"slope {slope:g}")
            ref.set_gid(f"ref-slope-{slope:g}")

    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(spec.x_field)
    ax.set_ylabel(f"median {spec.y_field}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    if spec.out_path.lower().endswith(".svg"):
        fig.savefig(spec.out_path, format="svg", metadata={"Date": None})
    else:
        fig.savefig(spec.out_path)
    plt.close(fig)
    return spec.out_path


def main(argv=None):
    parser = argparse.ArgumentParser(description="render scaling plots")
    parser.add_argument("--csv", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--slopes", default="",
                        help="comma-separated reference slopes "
                             "(default: -1/2 and the p,q shape)")
    args = parser.parse_args(argv)
    slopes = [float(t) for t in args.slopes.split(",") if t.strip()]
    spec = PlotSpec(csv_path=args.csv, out_path=args.out, slopes=slopes)
    try:
        render_scaling_plot(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
