"""Benchmark harness: trials, grid sweeps, summaries and bound curves.

A trial fixes an instance and one perturbation seed. It computes the offline
optimum, builds the advice, runs the requested online algorithms under the
protocol guard and records strict competitive ratios ``ALG / OPT``.

A sweep repeats trials over ``sizes x epsilons x mus x trials``. Each size
uses one instance (an OR-Library file when one is given for that size,
otherwise a seeded uniform ``{1..100}`` matrix), shared by all of its cells.
Trial seeds are derived from ``(base_seed, n, epsilon, mu, trial)`` via
numpy's ``SeedSequence``. Results therefore do not depend on execution
order or on the number of worker processes.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DegenerateOptimumError
from .instance import BEASLEY_HI, BEASLEY_LO, CostMatrix, generate_uniform, load_orlib
from .matching import Assignment, solve_exact
from .online import (
    ALGORITHMS,
    FOLLOW_PREDICTION,
    ArrivalSequence,
    OnlineRun,
    make_algorithm,
    replay_guard,
)
from .prediction import PerturbationSpec, make_advice

DEFAULT_SIZES = (100, 200, 300, 400, 500, 600, 700, 800)
DEFAULT_EPSILONS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
DEFAULT_MUS = (0.1, 0.3, 0.5)
DEFAULT_TRIALS = 30

BOUND_NAMES = ("2n-1", "(ln n)^2", "ln n")


def _fixed(x: float) -> int:
    return int(round(x * 1_000_000))


def trial_seed(base_seed: int, n: int, epsilon: float, mu: float, trial: int) -> int:
    ss = np.random.SeedSequence([int(base_seed), n, _fixed(epsilon), _fixed(mu), trial])
    return int(ss.generate_state(1, np.uint64)[0])


def instance_seed(base_seed: int, n: int) -> int:
    ss = np.random.SeedSequence([int(base_seed), n, 0x1A57])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SweepGrid:
    sizes: tuple = DEFAULT_SIZES
    epsilons: tuple = DEFAULT_EPSILONS
    mus: tuple = DEFAULT_MUS
    trials: int = DEFAULT_TRIALS
    base_seed: int = 0
    algorithms: tuple = (FOLLOW_PREDICTION,)
    # n -> OR-Library file; sizes without a file get a synthetic instance
    orlib: dict = field(default_factory=dict)
    lo: int = BEASLEY_LO
    hi: int = BEASLEY_HI

    def __post_init__(self):
        for name in ("sizes", "epsilons", "mus", "algorithms"):
            vals = tuple(getattr(self, name))
            if not vals:
                raise ValueError(f"grid {name} must be non-empty")
            object.__setattr__(self, name, vals)
        if any(int(n) < 1 for n in self.sizes):
            raise ValueError(f"sizes must be positive, got {self.sizes}")
        for e in self.epsilons:
            if not 0 <= e <= 1:
                raise ValueError(f"epsilon must lie in [0, 1], got {e}")
        for m in self.mus:
            if not 0 <= m <= 1:
                raise ValueError(f"mu must lie in [0, 1], got {m}")
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        if not 1 <= self.lo <= self.hi:
            raise ValueError(f"need 1 <= lo <= hi, got {self.lo}, {self.hi}")
        object.__setattr__(self, "orlib", {int(k): str(v) for k, v in dict(self.orlib).items()})

    def cells(self):
        for n in self.sizes:
            for eps in self.epsilons:
                for mu in self.mus:
                    yield n, eps, mu

    def to_dict(self):
        d = asdict(self)
        d["orlib"] = {str(k): v for k, v in self.orlib.items()}
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["orlib"] = {int(k): v for k, v in d.get("orlib", {}).items()}
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in d.items()})


@dataclass
class TrialRecord:
    n: int
    epsilon: float
    mu: float
    seed: int
    opt_cost: int | float
    alg_costs: dict
    ratios: dict
    total_error: int | float
    delta: int
    instance: str = ""
    timings: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class CellSummary:
    n: int
    epsilon: float
    mu: float
    algorithm: str
    trials: int
    mean_ratio: float
    min_ratio: float
    max_ratio: float
    std_ratio: float

    @property
    def key(self):
        return self.n, self.epsilon, self.mu, self.algorithm


@dataclass
class CellFailure:
    n: int
    epsilon: float
    mu: float
    trial: int
    error: str


@dataclass
class SweepResult:
    grid: SweepGrid
    records: list
    summaries: list
    failures: list = field(default_factory=list)
    instances: dict = field(default_factory=dict)

    def summary(self, n, epsilon, mu, algorithm=FOLLOW_PREDICTION) -> CellSummary:
        for s in self.summaries:
            if s.key == (n, epsilon, mu, algorithm):
                return s
        raise KeyError((n, epsilon, mu, algorithm))

    def to_dict(self, with_timings=True):
        recs = [r.to_dict() for r in self.records]
        if not with_timings:
            for r in recs:
                r.pop("timings")
        return {
            "grid": self.grid.to_dict(),
            "instances": {str(k): v for k, v in self.instances.items()},
            "records": recs,
            "summaries": [asdict(s) for s in self.summaries],
            "failures": [asdict(f) for f in self.failures],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            grid=SweepGrid.from_dict(d["grid"]),
            records=[TrialRecord.from_dict({"timings": {}, **r}) for r in d["records"]],
            summaries=[CellSummary(**s) for s in d["summaries"]],
            failures=[CellFailure(**f) for f in d["failures"]],
            instances={int(k): v for k, v in d["instances"].items()},
        )


def run_trial(
    A: CostMatrix,
    spec: PerturbationSpec,
    algorithms=ALGORITHMS,
    order=None,
    opt: Assignment | None = None,
    baselines: dict | None = None,
) -> TrialRecord:
    """One (instance, perturbation) trial.

    ``opt`` and ``baselines`` (algorithm name -> OnlineRun) let a sweep reuse
    results that do not depend on the perturbation seed.
    """
    timings = {}
    seq = ArrivalSequence(A, order) if order is not None else ArrivalSequence.natural(A)
    if opt is None:
        t0 = time.perf_counter()
        opt = solve_exact(A)
        timings["offline_solve"] = time.perf_counter() - t0
    if opt.total_cost == 0:
        raise DegenerateOptimumError("offline optimum is 0; competitive ratio undefined")

    t0 = time.perf_counter()
    advice = make_advice(A, spec)
    timings["advice"] = time.perf_counter() - t0

    costs, ratios = {}, {}
    for name in algorithms:
        if baselines and name in baselines:
            run = baselines[name]
        else:
            run = replay_guard(seq, make_algorithm(name, advice))
        costs[name] = run.total_cost
        ratios[name] = run.total_cost / opt.total_cost
        for phase, secs in run.timings.items():
            timings[f"{name}.{phase}"] = secs
        if run.total_cost < opt.total_cost:
            raise AssertionError(f"{name} beat the offline optimum: {run.total_cost} < {opt.total_cost}")

    return TrialRecord(
        n=A.n,
        epsilon=spec.epsilon,
        mu=spec.mu,
        seed=int(spec.seed),
        opt_cost=opt.total_cost,
        alg_costs=costs,
        ratios=ratios,
        total_error=advice.total_error,
        delta=advice.per_cell_delta,
        instance=A.meta.label if A.meta else "",
        timings=timings,
    )


@dataclass
class _Context:
    A: CostMatrix
    opt: Assignment
    baselines: dict
    timings: dict


@functools.lru_cache(maxsize=8)
def _context(n, base_seed, path, lo, hi, algorithms) -> _Context:
    timings = {}
    t0 = time.perf_counter()
    if path is not None:
        A = load_orlib(path)
        if A.n != n:
            raise ValueError(f"{path} holds an n={A.n} instance, grid expects n={n}")
    else:
        A = generate_uniform(n, lo, hi, instance_seed(base_seed, n))
    timings["instance"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    opt = solve_exact(A)
    timings["offline_solve"] = time.perf_counter() - t0
    seq = ArrivalSequence.natural(A)
    baselines = {}
    for name in algorithms:
        if name != FOLLOW_PREDICTION:
            baselines[name] = replay_guard(seq, make_algorithm(name))
    return _Context(A, opt, baselines, timings)


def _run_cell(grid: SweepGrid, n, eps, mu):
    records, failures = [], []
    try:
        ctx = _context(n, grid.base_seed, grid.orlib.get(n), grid.lo, grid.hi, grid.algorithms)
    except Exception as exc:
        return records, [CellFailure(n, eps, mu, -1, f"{type(exc).__name__}: {exc}")], None
    for t in range(grid.trials):
        spec = PerturbationSpec(eps, mu, trial_seed(grid.base_seed, n, eps, mu, t))
        try:
            rec = run_trial(ctx.A, spec, grid.algorithms, opt=ctx.opt, baselines=ctx.baselines)
        except Exception as exc:
            failures.append(CellFailure(n, eps, mu, t, f"{type(exc).__name__}: {exc}"))
            continue
        rec.timings.update(ctx.timings)
        records.append(rec)
    meta = ctx.A.meta.to_dict() if ctx.A.meta else {}
    return records, failures, meta


def run_sweep(grid: SweepGrid, jobs: int = 1) -> SweepResult:
    cells = list(grid.cells())
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outs = list(pool.map(_run_cell, [grid] * len(cells), *zip(*cells)))
    else:
        outs = [_run_cell(grid, *c) for c in cells]
    records, failures, instances = [], [], {}
    for (n, _, _), (recs, fails, meta) in zip(cells, outs):
        records.extend(recs)
        failures.extend(fails)
        if meta is not None:
            instances[n] = meta
    return SweepResult(grid, records, summarize(records, grid.algorithms), failures, instances)


def summarize(records, algorithms=ALGORITHMS) -> list:
    groups = {}
    for r in records:
        groups.setdefault((r.n, r.epsilon, r.mu), []).append(r)
    out = []
    for (n, eps, mu), recs in groups.items():
        for name in algorithms:
            vals = np.array([r.ratios[name] for r in recs if name in r.ratios], dtype=float)
            if vals.size == 0:
                continue
            std = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
            out.append(CellSummary(n, eps, mu, name, int(vals.size), float(vals.mean()),
                                   float(vals.min()), float(vals.max()), std))
    return out


def bound_curves(n: int):
    """Deterministic bound ``2n - 1`` and randomized curves ``(ln n)^2`` and ``ln n``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    ln = math.log(n)
    return 2 * n - 1, ln * ln, ln


def compare_vs_bounds(summary: CellSummary) -> dict:
    """``True`` where the cell's mean ratio lies strictly below the bound."""
    return {name: summary.mean_ratio < b for name, b in zip(BOUND_NAMES, bound_curves(summary.n))}


def timing_profile(records) -> list:
    """Mean seconds per phase for each ``n``, as rows ``{"n": .., phase: ..}``."""
    if not records:
        raise ValueError("no records to profile")
    by_n = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r.timings)
    rows = []
    for n in sorted(by_n):
        ts = by_n[n]
        phases = sorted({p for t in ts for p in t})
        row = {"n": n}
        for p in phases:
            vals = [t[p] for t in ts if p in t]
            row[p] = sum(vals) / len(vals)
        rows.append(row)
    return rows


# ---------------------------------------------------------------- artifacts

TRIAL_COLUMNS = ("n", "epsilon", "mu", "seed", "opt_cost", "algorithm", "alg_cost", "ratio",
                 "total_error")
SUMMARY_COLUMNS = ("n", "epsilon", "mu", "algorithm", "trials", "mean_ratio", "min_ratio",
                   "max_ratio", "std_ratio")


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def trials_csv(result: SweepResult) -> str:
    rows = []
    for r in result.records:
        for name in result.grid.algorithms:
            if name in r.alg_costs:
                rows.append((r.n, r.epsilon, r.mu, r.seed, r.opt_cost, name, r.alg_costs[name],
                             r.ratios[name], r.total_error))
    return _csv(rows, TRIAL_COLUMNS)


def summary_csv(result: SweepResult) -> str:
    rows = [tuple(getattr(s, c) for c in SUMMARY_COLUMNS) for s in result.summaries]
    return _csv(rows, SUMMARY_COLUMNS)


def timings_csv(result: SweepResult) -> str:
    rows = []
    for r in result.records:
        for phase in sorted(r.timings):
            rows.append((r.n, r.epsilon, r.mu, r.seed, phase, r.timings[phase]))
    return _csv(rows, ("n", "epsilon", "mu", "seed", "phase", "seconds"))


def figure_series(result: SweepResult) -> dict:
    """Plot-ready tables: ratio vs epsilon, ratio vs n, and ratio against bound curves."""
    cols = ("mu", "n", "epsilon", "algorithm", "mean_ratio", "std_ratio", "trials")
    s = result.summaries
    error_graph = sorted(((x.mu, x.n, x.epsilon, x.algorithm, x.mean_ratio, x.std_ratio, x.trials)
                          for x in s))
    size_cols = ("mu", "epsilon", "n", "algorithm", "mean_ratio", "std_ratio", "trials")
    size_graph = sorted(((x.mu, x.epsilon, x.n, x.algorithm, x.mean_ratio, x.std_ratio, x.trials)
                         for x in s))
    overlay_cols = ("mu", "epsilon", "n", "algorithm", "mean_ratio") + BOUND_NAMES
    overlay = sorted(((x.mu, x.epsilon, x.n, x.algorithm, x.mean_ratio) + bound_curves(x.n)
                      for x in s))
    return {
        "error_graph.csv": _csv(error_graph, cols),
        "size_graph.csv": _csv(size_graph, size_cols),
        "bounds_overlay.csv": _csv(overlay, overlay_cols),
    }


def write_sweep(result: SweepResult, out_dir) -> Path:
    """Write every artifact of a sweep. All files except ``provenance.json`` and
    ``timings.csv`` are byte-identical for identical grids."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trials.csv").write_text(trials_csv(result))
    (out / "summary.csv").write_text(summary_csv(result))
    (out / "timings.csv").write_text(timings_csv(result))
    (out / "results.json").write_text(json.dumps(result.to_dict(with_timings=False), indent=1) + "\n")
    figs = out / "figures"
    figs.mkdir(exist_ok=True)
    for name, text in figure_series(result).items():
        (figs / name).write_text(text)
    failures = "".join(f"n={f.n} epsilon={f.epsilon} mu={f.mu} trial={f.trial}: {f.error}\n"
                       for f in result.failures)
    (out / "failures.txt").write_text(failures)
    provenance = {
        "software": {"onlineap": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        "created": datetime.now(timezone.utc).isoformat(),
        "grid": result.grid.to_dict(),
        "instances": {str(k): v for k, v in result.instances.items()},
        "n_records": len(result.records),
        "n_failures": len(result.failures),
    }
    (out / "provenance.json").write_text(json.dumps(provenance, indent=1) + "\n")
    return out


def load_sweep(out_dir) -> SweepResult:
    path = Path(out_dir) / "results.json"
    if not path.is_file():
        raise FileNotFoundError(f"no sweep results at {path}")
    return SweepResult.from_dict(json.loads(path.read_text()))


def load_summaries(out_dir) -> list:
    path = Path(out_dir) / "summary.csv"
    if not path.is_file():
        raise FileNotFoundError(f"no sweep summary at {path}")
    out = []
    with path.open(newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(CellSummary(int(row["n"]), float(row["epsilon"]), float(row["mu"]),
                                   row["algorithm"], int(row["trials"]), float(row["mean_ratio"]),
                                   float(row["min_ratio"]), float(row["max_ratio"]),
                                   float(row["std_ratio"])))
    return out
