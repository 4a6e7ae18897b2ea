"""Command-line front end.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
The default sweep output directory can be set with ``ONLINEAP_OUT``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import OnlineAPError
from .experiment import (
    BOUND_NAMES,
    DEFAULT_EPSILONS,
    DEFAULT_MUS,
    DEFAULT_SIZES,
    DEFAULT_TRIALS,
    SweepGrid,
    bound_curves,
    compare_vs_bounds,
    load_summaries,
    run_sweep,
    run_trial,
    write_sweep,
)
from .instance import generate_uniform, load_orlib, render
from .matching import solve_exact
from .online import ALGORITHMS, FOLLOW_PREDICTION
from .prediction import PerturbationSpec

OUT_ENV = "ONLINEAP_OUT"


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _algorithms(text):
    names = tuple(x.strip() for x in text.split(",") if x.strip())
    bad = [x for x in names if x not in ALGORITHMS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {bad}; choose from {', '.join(ALGORITHMS)}")
    return names


def _orlib(text):
    n, sep, path = text.partition("=")
    if not sep or not n.isdigit():
        raise argparse.ArgumentTypeError(f"expected N=PATH, got {text!r}")
    return int(n), path


def _table(headers, rows):
    cells = [list(map(str, headers))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def cmd_gen(args):
    if args.n < 1:
        raise UsageError(f"--n must be positive, got {args.n}")
    if args.lo < 1 or args.hi < args.lo:
        raise UsageError(f"need 1 <= lo <= hi, got lo={args.lo} hi={args.hi}")
    text = render(generate_uniform(args.n, args.lo, args.hi, args.seed))
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


def cmd_solve(args):
    A = load_orlib(args.instance)
    sol = solve_exact(A)
    if args.format == "json":
        print(json.dumps({"instance": A.meta.label, "n": A.n, **sol.to_dict()}))
    elif args.format == "csv":
        print("request,server,cost")
        for v, u in enumerate(sol.match):
            print(f"{v},{u},{A.weights[u, v]}")
    else:
        print(f"instance: {A.meta.label} (n={A.n})")
        print(f"optimal cost: {sol.total_cost}")
    return 0


def cmd_simulate(args):
    A = load_orlib(args.instance)
    try:
        spec = PerturbationSpec(args.epsilon, args.mu, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    order = None
    if args.shuffle_seed is not None:
        from .online import ArrivalSequence
        order = ArrivalSequence.shuffled(A, args.shuffle_seed).order
    rec = run_trial(A, spec, args.algorithms, order=order)
    if args.format == "json":
        print(json.dumps(rec.to_dict()))
        return 0
    if args.format == "csv":
        print("algorithm,alg_cost,opt_cost,ratio,total_error")
        for name in args.algorithms:
            print(f"{name},{rec.alg_costs[name]},{rec.opt_cost},{rec.ratios[name]!r},{rec.total_error}")
        return 0
    print(f"instance: {rec.instance} (n={rec.n})  epsilon={rec.epsilon} mu={rec.mu} seed={rec.seed}")
    print(f"OPT cost: {rec.opt_cost}")
    print(f"advice error E: {rec.total_error} (delta={rec.delta})")
    rows = [(name, rec.alg_costs[name], f"{rec.ratios[name]:.4f}") for name in args.algorithms]
    print(_table(("algorithm", "cost", "ratio"), rows))
    print("timings (s):")
    for phase in sorted(rec.timings):
        print(f"  {phase}: {rec.timings[phase]:.6f}")
    return 0


def cmd_sweep(args):
    try:
        grid = SweepGrid(
            sizes=args.sizes, epsilons=args.epsilons, mus=args.mus, trials=args.trials,
            base_seed=args.seed, algorithms=args.algorithms, orlib=dict(args.orlib or []),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = args.out or os.environ.get(OUT_ENV) or "runs/sweep"
    result = run_sweep(grid, jobs=args.jobs)
    write_sweep(result, out)
    print(f"wrote {len(result.records)} trials ({len(result.failures)} failures) to {out}")
    for f in result.failures:
        print(f"  failed: n={f.n} epsilon={f.epsilon} mu={f.mu} trial={f.trial}: {f.error}",
              file=sys.stderr)
    return 0 if result.records else 1


def cmd_report(args):
    summaries = [s for s in load_summaries(args.sweep_dir) if s.algorithm == args.algorithm]
    if not summaries:
        print(f"no {args.algorithm} cells in {args.sweep_dir}", file=sys.stderr)
        return 1
    summaries.sort(key=lambda s: (s.mu, s.epsilon, s.n))
    rows = []
    for s in summaries:
        verdict = compare_vs_bounds(s)
        bounds = bound_curves(s.n)
        rows.append((s.mu, s.epsilon, s.n, s.trials, f"{s.mean_ratio:.4f}", f"{s.std_ratio:.4f}")
                    + tuple(f"{'below' if verdict[b] else 'ABOVE'} {v:.4f}"
                            for b, v in zip(BOUND_NAMES, bounds)))
    headers = ("mu", "epsilon", "n", "trials", "mean", "std") + BOUND_NAMES
    if args.format == "json":
        print(json.dumps([dict(zip(headers, r)) for r in rows]))
    elif args.format == "csv":
        print(",".join(headers))
        for r in rows:
            print(",".join(map(str, r)))
    else:
        print(_table(headers, rows))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="onlineap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a seeded uniform instance in OR-Library format")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--lo", type=int, default=1)
    g.add_argument("--hi", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", "-o", help="output file (default: stdout)")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="offline optimum of an instance")
    s.add_argument("instance")
    s.add_argument("--format", choices=("table", "json", "csv"), default="table")
    s.set_defaults(func=cmd_solve)

    m = sub.add_parser("simulate", help="one trial: advice, online runs, ratios")
    m.add_argument("instance")
    m.add_argument("--epsilon", type=float, default=0.1)
    m.add_argument("--mu", type=float, default=0.1)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--algorithms", type=_algorithms, default=ALGORITHMS)
    m.add_argument("--shuffle-seed", type=int, default=None,
                   help="permute the arrival order with this seed (default: natural order)")
    m.add_argument("--format", choices=("table", "json", "csv"), default="table")
    m.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="grid sweep over sizes, epsilons and mus")
    w.add_argument("--sizes", type=_ints, default=DEFAULT_SIZES)
    w.add_argument("--epsilons", type=_floats, default=DEFAULT_EPSILONS)
    w.add_argument("--mus", type=_floats, default=DEFAULT_MUS)
    w.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--algorithms", type=_algorithms, default=(FOLLOW_PREDICTION,))
    w.add_argument("--orlib", type=_orlib, action="append", metavar="N=PATH",
                   help="use this OR-Library file for size N (repeatable)")
    w.add_argument("--out", "-o", help=f"output directory (default: ${OUT_ENV} or runs/sweep)")
    w.add_argument("--jobs", "-j", type=int, default=1)
    w.set_defaults(func=cmd_sweep)

    r = sub.add_parser("report", help="mean ratios against bound curves")
    r.add_argument("sweep_dir")
    r.add_argument("--algorithm", choices=ALGORITHMS, default=FOLLOW_PREDICTION)
    r.add_argument("--format", choices=("table", "json", "csv"), default="table")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (OnlineAPError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
