import json
import math

import numpy as np
import pytest

from onlineap.errors import DegenerateOptimumError, InfeasibleMagnitudeError
from onlineap.experiment import (
    CellSummary,
    SweepGrid,
    SweepResult,
    TrialRecord,
    bound_curves,
    compare_vs_bounds,
    load_sweep,
    run_sweep,
    run_trial,
    summarize,
    timing_profile,
    trial_seed,
    trials_csv,
    write_sweep,
)
from onlineap.instance import CostMatrix, generate_uniform
from onlineap.online import ALGORITHMS
from onlineap.prediction import PerturbationSpec


def test_trial_perfect_advice():
    A = generate_uniform(30, seed=0)
    rec = run_trial(A, PerturbationSpec(0.0, 0.5, 3))
    assert rec.ratios["follow-prediction"] == 1.0
    assert rec.total_error == 0
    assert set(rec.ratios) == set(ALGORITHMS)
    assert all(r >= 1 for r in rec.ratios.values())


def test_trial_single_request():
    rec = run_trial(CostMatrix(np.array([[4]])), PerturbationSpec(0.0, 0.1, 0))
    assert all(r == 1.0 for r in rec.ratios.values())


def test_trial_advice_error_inequality():
    A = generate_uniform(40, seed=1)
    for s in range(10):
        rec = run_trial(A, PerturbationSpec(0.3, 0.5, s))
        assert rec.alg_costs["follow-prediction"] <= rec.opt_cost + 2 * rec.total_error
        assert rec.ratios["follow-prediction"] == rec.alg_costs["follow-prediction"] / rec.opt_cost


def test_trial_degenerate_optimum():
    with pytest.raises(DegenerateOptimumError):
        run_trial(CostMatrix(np.zeros((3, 3), dtype=int)), PerturbationSpec(0.0, 0.1, 0))


def test_trial_propagates_infeasible():
    A = CostMatrix(np.array([[40, 60], [50, 45]]))
    with pytest.raises(InfeasibleMagnitudeError):
        run_trial(A, PerturbationSpec(0.5, 0.5, 0))


def test_trial_deterministic():
    A = generate_uniform(25, seed=2)
    a = run_trial(A, PerturbationSpec(0.2, 0.3, 7))
    b = run_trial(A, PerturbationSpec(0.2, 0.3, 7))
    assert (a.alg_costs, a.total_error) == (b.alg_costs, b.total_error)


def test_trial_seed_distinct_and_stable():
    seeds = {trial_seed(0, n, e, m, t) for n in (50, 100) for e in (0, 0.1) for m in (0.1, 0.3)
             for t in range(5)}
    assert len(seeds) == 40
    assert trial_seed(0, 100, 0.1, 0.1, 0) == trial_seed(0, 100, 0.1, 0.1, 0)


def test_grid_defaults():
    g = SweepGrid()
    assert g.sizes == (100, 200, 300, 400, 500, 600, 700, 800)
    assert g.epsilons == (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
    assert g.mus == (0.1, 0.3, 0.5)
    assert g.trials == 30


@pytest.mark.parametrize("kw", [{"sizes": ()}, {"epsilons": (1.5,)}, {"mus": (-0.1,)}, {"trials": 0},
                                {"algorithms": ("bogus",)}])
def test_grid_validation(kw):
    with pytest.raises(ValueError):
        SweepGrid(**kw)


def test_sweep_single_cell():
    res = run_sweep(SweepGrid(sizes=(100,), epsilons=(0.0,), mus=(0.1,), trials=1))
    assert len(res.records) == 1
    assert res.records[0].ratios["follow-prediction"] == 1.0


def test_sweep_cardinality_and_determinism():
    grid = SweepGrid(sizes=(8, 12), epsilons=(0.0, 0.2), mus=(0.1, 0.3), trials=3,
                     algorithms=ALGORITHMS)
    a, b = run_sweep(grid), run_sweep(grid)
    assert len(a.records) == 2 * 2 * 2 * 3
    assert trials_csv(a) == trials_csv(b)
    assert a.to_dict(with_timings=False) == b.to_dict(with_timings=False)


def test_sweep_parallel_equals_serial():
    grid = SweepGrid(sizes=(10, 20), epsilons=(0.1, 0.3), mus=(0.1,), trials=2)
    assert trials_csv(run_sweep(grid, jobs=2)) == trials_csv(run_sweep(grid, jobs=1))


def test_sweep_records_failures_without_aborting():
    # n=2 uniform instance: delta=50 cannot fit inside a narrow value range for every cell
    grid = SweepGrid(sizes=(2, 20), epsilons=(0.5,), mus=(0.5,), trials=3)
    res = run_sweep(grid)
    assert res.failures
    assert any(r.n == 20 for r in res.records)
    assert all(f.n == 2 for f in res.failures)


def test_sweep_uses_orlib_file(tmp_path):
    p = tmp_path / "assign5.txt"
    p.write_text("3\n1 5 9\n7 2 8\n9 9 3\n")
    res = run_sweep(SweepGrid(sizes=(3,), epsilons=(0.0,), mus=(0.1,), trials=1, orlib={3: str(p)}))
    assert res.instances[3]["source"] == "orlib-file"
    assert res.records[0].opt_cost == 6


def test_summary_recomputable():
    res = run_sweep(SweepGrid(sizes=(15,), epsilons=(0.2,), mus=(0.3,), trials=6))
    s = res.summary(15, 0.2, 0.3)
    vals = [r.ratios["follow-prediction"] for r in res.records]
    assert s.trials == 6
    assert s.mean_ratio == pytest.approx(sum(vals) / 6, rel=1e-15)
    assert s.min_ratio == min(vals) and s.max_ratio == max(vals)
    mean = sum(vals) / 6
    assert s.std_ratio == pytest.approx(math.sqrt(sum((v - mean) ** 2 for v in vals) / 5))
    assert summarize(res.records, res.grid.algorithms) == res.summaries


def test_result_json_roundtrip():
    res = run_sweep(SweepGrid(sizes=(6,), epsilons=(0.0, 0.5), mus=(0.1,), trials=2))
    back = SweepResult.from_dict(json.loads(json.dumps(res.to_dict())))
    assert back.grid == res.grid
    assert [r.alg_costs for r in back.records] == [r.alg_costs for r in res.records]
    assert back.summaries == res.summaries
    rec = res.records[0]
    assert TrialRecord.from_dict(rec.to_dict()) == rec


def test_bound_curves():
    assert bound_curves(100)[0] == 199
    assert bound_curves(1) == (1, 0.0, 0.0)
    det, sq, ln = bound_curves(800)
    assert det == 1599
    assert sq == pytest.approx(44.684, abs=1e-3)
    assert ln == pytest.approx(6.6846, abs=1e-4)
    with pytest.raises(ValueError):
        bound_curves(0)


def _cell(n, mean):
    return CellSummary(n, 0.1, 0.1, "follow-prediction", 1, mean, mean, mean, 0.0)


def test_compare_vs_bounds():
    # a ratio of 1 sits below ln n and (ln n)^2 only once ln n > 1, i.e. n >= 3
    for n in (3, 10, 800):
        assert all(compare_vs_bounds(_cell(n, 1.0)).values())
    assert compare_vs_bounds(_cell(2, 1.0)) == {"2n-1": True, "(ln n)^2": False, "ln n": False}
    # Table 4, mu=0.5 eps=0.5 n=800: between ln n and (ln n)^2
    v = compare_vs_bounds(_cell(800, 25.736469072164947))
    assert v == {"2n-1": True, "(ln n)^2": True, "ln n": False}


def test_timing_profile():
    rec = TrialRecord(5, 0.1, 0.1, 0, 10, {}, {}, 0, 0, timings={"advice": 0.5, "offline_solve": 2.0})
    assert timing_profile([rec]) == [{"n": 5, "advice": 0.5, "offline_solve": 2.0}]
    with pytest.raises(ValueError):
        timing_profile([])


def _best_of(f, reps=3):
    import time
    best = math.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        f()
        best = min(best, time.perf_counter() - t0)
    return best


def test_offline_solve_superlinear():
    from onlineap.matching import solve_exact
    small, large = generate_uniform(100, seed=1), generate_uniform(400, seed=1)
    t_small = _best_of(lambda: solve_exact(small))
    t_large = _best_of(lambda: solve_exact(large))
    # 4x the size: linear growth would be a factor 4
    assert t_large / t_small > 4


def test_profile_rows_per_size():
    res = run_sweep(SweepGrid(sizes=(20, 40), epsilons=(0.1,), mus=(0.1,), trials=2))
    rows = timing_profile(res.records)
    assert [r["n"] for r in rows] == [20, 40]
    assert {"advice", "offline_solve", "follow-prediction.plan", "follow-prediction.serve"} <= set(rows[0])


def test_write_and_load(tmp_path):
    res = run_sweep(SweepGrid(sizes=(6, 9), epsilons=(0.0, 0.2), mus=(0.1,), trials=2))
    out = write_sweep(res, tmp_path / "sw")
    names = {p.name for p in out.iterdir()}
    assert {"trials.csv", "summary.csv", "timings.csv", "results.json", "provenance.json",
            "figures", "failures.txt"} <= names
    header = (out / "trials.csv").read_text().splitlines()[0]
    assert header == "n,epsilon,mu,seed,opt_cost,algorithm,alg_cost,ratio,total_error"
    assert len((out / "trials.csv").read_text().splitlines()) == 1 + 8
    back = load_sweep(out)
    assert back.summaries == res.summaries
    figs = {p.name for p in (out / "figures").iterdir()}
    assert figs == {"error_graph.csv", "size_graph.csv", "bounds_overlay.csv"}
