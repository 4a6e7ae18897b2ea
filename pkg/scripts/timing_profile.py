"""Per-phase running time against n for the follow-prediction pipeline.

    python scripts/timing_profile.py --sizes 100,200,400,800 --trials 3

Phases: advice construction, offline solve of the true matrix, planning
(offline solve of the predicted matrix) and the online lookup pass.
"""

import argparse
import csv
import sys

import numpy as np

from onlineap.experiment import run_trial, timing_profile
from onlineap.instance import generate_uniform
from onlineap.prediction import PerturbationSpec

PHASES = ("advice", "offline_solve", "follow-prediction.plan", "follow-prediction.serve")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="100,200,300,400,500,600,700,800")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--mu", type=float, default=0.1)
    args = p.parse_args()

    records = []
    for n in (int(x) for x in args.sizes.split(",")):
        A = generate_uniform(n, seed=n)
        for t in range(args.trials):
            records.append(run_trial(A, PerturbationSpec(args.epsilon, args.mu, t),
                                     algorithms=("follow-prediction",)))
            print(f"n={n} trial={t} done", file=sys.stderr)

    rows = timing_profile(records)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(("n",) + PHASES)
    for row in rows:
        w.writerow([row["n"]] + [f"{row.get(ph, float('nan')):.6f}" for ph in PHASES])

    ns = np.array([r["n"] for r in rows], dtype=float)
    if len(ns) > 1:
        for ph in PHASES:
            ts = np.array([r[ph] for r in rows])
            slope = np.polyfit(np.log(ns), np.log(ts), 1)[0]
            print(f"# log-log slope {ph}: {slope:.2f}", file=sys.stderr)


if __name__ == "__main__":
    main()
