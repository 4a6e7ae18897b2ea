"""Online assignment with simulated machine-learned advice."""

__version__ = "0.1.0"

from .instance import CostMatrix, InstanceMeta, generate_uniform, load_orlib, matrix_stats, parse_orlib, render
from .matching import Assignment, evaluate, solve_bruteforce, solve_exact
from .prediction import AdviceRecord, PerturbationSpec, incr_sign, make_advice, select_cells
from .online import (
    ArrivalSequence,
    OnlineRun,
    replay_guard,
    run_follow_prediction,
    run_greedy,
    run_permutation,
)
from .experiment import (
    SweepGrid,
    SweepResult,
    TrialRecord,
    bound_curves,
    compare_vs_bounds,
    run_sweep,
    run_trial,
    timing_profile,
)
