"""Command line front end and experiment harness.

Subcommands: balance, cara, sweep, gen, oracle.  Every run emits CSV rows
with the fixed schema below; trial t draws its random stream from
SeedSequence([master_seed, ...]) so records do not depend on execution
order or the number of worker processes.  All fields except time_ms are
deterministic for fixed flags and seed.
"""

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import balancing, caratheodory, instances
from .linalg import PNorm

CSV_HEADER = "kind,m,n,k,p,q,seed,method,error,bound,ratio,time_ms,restarts,rounds"


@dataclass
class ExperimentRecord:
    kind: str
    m: int
    n: int
    k: int
    p: PNorm
    q: PNorm
    seed: int
    method: str
    error: float
    bound: float
    ratio: float
    time_ms: float
    restarts: int
    rounds: int

    def csv_row(self):
        return ",".join([
            self.kind, str(self.m), str(self.n), str(self.k),
            str(self.p), str(self.q), str(self.seed), self.method,
            format(self.error, ".17g"), format(self.bound, ".17g"),
            format(self.ratio, ".17g"), format(self.time_ms, ".3f"),
            str(self.restarts), str(self.rounds),
        ])


def _rng(*entropy):
    return np.random.default_rng(np.random.SeedSequence(list(entropy)))


def _ratio(error, bound):
    if not math.isfinite(bound) or bound == 0.0:
        return 0.0
    return error / bound


def _parse_pnorm(parser, text, minimum=2.0):
    try:
        p = PNorm.parse(text)
    except ValueError:
        parser.error(f"p must be >= {minimum:g} or inf (got {text!r})")
    if p.value < minimum:
        parser.error(f"p must be >= {minimum:g} or inf (got {text!r})")
    return p


def _default_seed():
    return int(os.environ.get("CARABAL_SEED", "0"))


def _add_common(sub):
    sub.add_argument("--seed", type=int, default=None,
                     help="master seed (default: CARABAL_SEED env var or 0)")
    sub.add_argument("--trials", type=int, default=1)
    sub.add_argument("--jobs", type=int, default=1)


def _matrix_for(args, rng):
    if args.input:
        return instances.read_matrix(args.input), "file"
    spec = instances.InstanceSpec(kind=args.gen, m=args.m, n=args.n,
                                  p=args.p, density=args.density)
    mat = spec.build(rng)
    return mat, args.gen


def _balance_trial(args, master_seed, trial):
    rng = _rng(master_seed, 0, trial)
    mat, kind = _matrix_for(args, rng)
    t0 = time.perf_counter()
    result = balancing.full_coloring(mat, args.p, args.q, rng)
    dt = (time.perf_counter() - t0) * 1e3
    bound = balancing.vb_bound(args.p, args.q, mat.m, mat.n)
    return ExperimentRecord(
        kind=kind, m=mat.m, n=mat.n, k=0, p=args.p, q=args.q,
        seed=master_seed, method="walk", error=result.value, bound=bound,
        ratio=_ratio(result.value, bound), time_ms=dt,
        restarts=result.restarts, rounds=result.rounds)


def cmd_balance(args):
    rows = _run_trials(args, _balance_trial)
    _emit(sys.stdout, rows)
    return 0


def _combination_for(args, rng):
    if args.input:
        comb, file_k = instances.read_combination(args.input)
        return comb, (args.k if args.k else file_k), "file"
    spec = instances.InstanceSpec(kind=args.gen, m=args.m,
                                  n=(args.n or args.m + 1), p=args.p)
    return spec.build_combination(rng), args.k, args.gen


def _cara_trial(args, master_seed, trial):
    rng = _rng(master_seed, 0, trial)
    comb, k, kind = _combination_for(args, rng)
    method_rng = _rng(master_seed, 1, trial)
    t0 = time.perf_counter()
    rounds = restarts = 0
    if args.method == "walk":
        sol = caratheodory.approx_caratheodory(comb, k, args.p, args.q, method_rng)
        rounds = len(sol.levels)
    elif args.method == "maurey":
        sol = caratheodory.maurey_sample(comb, k, args.q, method_rng)
    else:
        sol = caratheodory.brute_force_ac(comb, k, args.q)
    dt = (time.perf_counter() - t0) * 1e3
    bound = caratheodory.ac_bound(args.p, args.q, comb.m, k)
    return ExperimentRecord(
        kind=kind, m=comb.m, n=comb.n, k=k, p=args.p, q=args.q,
        seed=master_seed, method=args.method, error=sol.error_q, bound=bound,
        ratio=_ratio(sol.error_q, bound), time_ms=dt,
        restarts=restarts, rounds=rounds)


def cmd_cara(args):
    rows = _run_trials(args, _cara_trial)
    _emit(sys.stdout, rows)
    return 0


def _sweep_cell(args, master_seed, k, trial):
    rng = _rng(master_seed, 0, k, trial)
    spec = instances.InstanceSpec(kind=args.kind, m=args.m,
                                  n=(args.n or args.m + 1), p=args.p)
    comb = spec.build_combination(rng)
    rows = []
    for mi, method in enumerate(args.methods):
        method_rng = _rng(master_seed, 1, k, trial, mi)
        t0 = time.perf_counter()
        rounds = 0
        if method == "walk":
            sol = caratheodory.approx_caratheodory(comb, k, args.p, args.q, method_rng)
            rounds = len(sol.levels)
        elif method == "maurey":
            sol = caratheodory.maurey_sample(comb, k, args.q, method_rng)
        else:
            sol = caratheodory.brute_force_ac(comb, k, args.q)
        dt = (time.perf_counter() - t0) * 1e3
        bound = caratheodory.ac_bound(args.p, args.q, comb.m, k)
        rows.append(ExperimentRecord(
            kind=args.kind, m=comb.m, n=comb.n, k=k, p=args.p, q=args.q,
            seed=master_seed, method=method, error=sol.error_q, bound=bound,
            ratio=_ratio(sol.error_q, bound), time_ms=dt,
            restarts=0, rounds=rounds))
    return rows


def fit_slope(ks, medians):
    """Least-squares slope of log(median) vs log(k); None if degenerate."""
    ks = [k for k, v in zip(ks, medians) if v > 0.0]
    vals = [v for v in medians if v > 0.0]
    if len(ks) < 2:
        return None
    lx = np.log(np.asarray(ks, dtype=float))
    ly = np.log(np.asarray(vals, dtype=float))
    lx = lx - lx.mean()
    denom = float(np.sum(lx * lx))
    if denom == 0.0:
        return None
    return float(np.sum(lx * (ly - ly.mean())) / denom)


def sweep_summary(rows, methods):
    """Summary block lines: per-k medians and the log-log slope, per method."""
    lines = []
    for method in methods:
        ks = sorted({r.k for r in rows if r.method == method})
        medians = []
        for k in ks:
            errs = [r.error for r in rows if r.method == method and r.k == k]
            med = float(np.median(errs))
            medians.append(med)
            lines.append(f"# median,{method},{k},{format(med, '.17g')}")
        slope = fit_slope(ks, medians)
        slope_txt = "na" if slope is None else format(slope, ".17g")
        lines.append(f"# slope,{method},{slope_txt}")
    return lines


def cmd_sweep(args):
    master_seed = args.seed if args.seed is not None else _default_seed()
    cells = [(k, t) for k in args.k_list for t in range(args.trials)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_cell_star,
                                    [(args, master_seed, k, t) for k, t in cells]))
    else:
        results = [_sweep_cell(args, master_seed, k, t) for k, t in cells]
    rows = [r for cell in results for r in cell]
    try:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            _emit(fh, rows)
            for line in sweep_summary(rows, args.methods):
                fh.write(line + "\n")
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    return 0


def _sweep_cell_star(packed):
    return _sweep_cell(*packed)


def cmd_gen(args):
    seed = args.seed if args.seed is not None else _default_seed()
    rng = _rng(seed, 0, 0)
    spec = instances.InstanceSpec(kind=args.kind, m=args.m, n=args.n,
                                  p=args.p, density=args.density, seed=seed)
    if args.combination or args.kind == "simplex":
        comb = spec.build_combination(rng)
        instances.write_combination(comb, args.k, args.out)
    else:
        instances.write_matrix(spec.build(rng), args.out)
    return 0


def cmd_oracle(args):
    t0 = time.perf_counter()
    if args.k:
        comb, k = instances.read_combination(args.input)
        k = args.k or k
        sol = caratheodory.brute_force_ac(comb, k, args.q)
        dt = (time.perf_counter() - t0) * 1e3
        bound = caratheodory.ac_bound(args.p, args.q, comb.m, k)
        rec = ExperimentRecord(kind="file", m=comb.m, n=comb.n, k=k,
                               p=args.p, q=args.q, seed=0, method="oracle",
                               error=sol.error_q, bound=bound,
                               ratio=_ratio(sol.error_q, bound), time_ms=dt,
                               restarts=0, rounds=0)
    else:
        mat = instances.read_matrix(args.input)
        _, value = balancing.brute_force_min_discrepancy(mat, args.q)
        dt = (time.perf_counter() - t0) * 1e3
        bound = balancing.vb_bound(args.p, args.q, mat.m, mat.n)
        rec = ExperimentRecord(kind="file", m=mat.m, n=mat.n, k=0,
                               p=args.p, q=args.q, seed=0, method="oracle",
                               error=value, bound=bound,
                               ratio=_ratio(value, bound), time_ms=dt,
                               restarts=0, rounds=0)
    _emit(sys.stdout, [rec])
    return 0


def _run_trials(args, trial_fn):
    master_seed = args.seed if args.seed is not None else _default_seed()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            return list(pool.map(_trial_star,
                                 [(trial_fn, args, master_seed, t)
                                  for t in range(args.trials)]))
    return [trial_fn(args, master_seed, t) for t in range(args.trials)]


def _trial_star(packed):
    fn, args, seed, t = packed
    return fn(args, seed, t)


def _emit(stream, rows):
    stream.write(CSV_HEADER + "\n")
    for row in rows:
        stream.write(row.csv_row() + "\n")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="carabal",
        description="vector balancing and sparse convex approximation")
    subs = parser.add_subparsers(dest="command", required=True)

    pb = subs.add_parser("balance", help="full +-1 coloring of a matrix")
    src = pb.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="matrix file")
    src.add_argument("--gen", choices=("spencer", "lower_bound", "random_ball"))
    pb.add_argument("--m", type=int, default=64)
    pb.add_argument("--n", type=int, default=64)
    pb.add_argument("--density", type=float, default=0.5)
    pb.add_argument("--p", default="2")
    pb.add_argument("--q", default="2")
    _add_common(pb)
    pb.set_defaults(fn=cmd_balance)

    pc = subs.add_parser("cara", help="average z by exactly k points")
    src = pc.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="combination file")
    src.add_argument("--gen", choices=("simplex", "random_ball"))
    pc.add_argument("--k", type=int, required=True)
    pc.add_argument("--method", choices=("walk", "maurey", "oracle"),
                    default="walk")
    pc.add_argument("--m", type=int, default=64)
    pc.add_argument("--n", type=int, default=0, help="points (default m+1)")
    pc.add_argument("--p", default="2")
    pc.add_argument("--q", default="2")
    _add_common(pc)
    pc.set_defaults(fn=cmd_cara)

    ps = subs.add_parser("sweep", help="factorial sweep over k, CSV output")
    ps.add_argument("--k-list", required=True,
                    help="comma-separated k values, e.g. 8,16,32")
    ps.add_argument("--kind", choices=("random_ball", "simplex"),
                    default="random_ball")
    ps.add_argument("--m", type=int, default=512)
    ps.add_argument("--n", type=int, default=0, help="points (default m+1)")
    ps.add_argument("--p", default="2")
    ps.add_argument("--q", default="2")
    ps.add_argument("--methods", default="walk,maurey")
    ps.add_argument("--out", required=True)
    _add_common(ps)
    ps.set_defaults(fn=cmd_sweep)

    pg = subs.add_parser("gen", help="write an instance file")
    pg.add_argument("--kind", choices=instances.INSTANCE_KINDS, required=True)
    pg.add_argument("--m", type=int, required=True)
    pg.add_argument("--n", type=int, default=1)
    pg.add_argument("--k", type=int, default=1)
    pg.add_argument("--p", default="2")
    pg.add_argument("--density", type=float, default=0.5)
    pg.add_argument("--combination", action="store_true",
                    help="write the combination form (points + weights)")
    pg.add_argument("--seed", type=int, default=None)
    pg.add_argument("--out", required=True)
    pg.set_defaults(fn=cmd_gen)

    po = subs.add_parser("oracle", help="brute-force optimum of an instance file")
    po.add_argument("--input", required=True)
    po.add_argument("--k", type=int, default=0,
                    help="treat the input as a combination and average k points")
    po.add_argument("--p", default="2")
    po.add_argument("--q", default="2")
    po.set_defaults(fn=cmd_oracle)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    if hasattr(args, "p"):
        args.p = _parse_pnorm(parser, args.p)
    if hasattr(args, "q"):
        args.q = _parse_pnorm(parser, args.q, minimum=1.0)
        # the balancing bound needs q >= p; error measurement in cara/oracle
        # accepts any q >= 1
        if args.command == "balance" and args.q.value < args.p.value:
            parser.error("q must be >= p for balancing")
    if hasattr(args, "k_list"):
        try:
            args.k_list = [int(t) for t in args.k_list.split(",") if t.strip()]
        except ValueError:
            parser.error("--k-list must be comma-separated integers")
        if not args.k_list:
            parser.error("--k-list must not be empty")
    if hasattr(args, "methods") and isinstance(args.methods, str):
        args.methods = [t.strip() for t in args.methods.split(",") if t.strip()]
        for mname in args.methods:
            if mname not in ("walk", "maurey", "oracle"):
                parser.error(f"unknown method {mname!r}")

    try:
        return args.fn(args)
    except (ValueError, RuntimeError, instances.ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
