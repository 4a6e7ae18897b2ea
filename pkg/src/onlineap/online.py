"""Online assignment protocol and the three online algorithms.

Requests (columns of the base matrix) arrive one per step. At step ``t`` the
algorithm sees request ``order[t]``'s column and must commit a still-free
server immediately; decisions are never revised.

Algorithms read weights only through a :class:`RequestView`. In guarded mode
the view refuses any column that has not arrived yet and raises
:class:`~onlineap.errors.ProtocolViolation`. The engine itself rejects reused
or out-of-range servers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidMatchingError, ProtocolViolation
from .instance import CostMatrix, make_rng
from .matching import IncrementalAssigner, check_permutation, solve_exact
from .prediction import AdviceRecord

FOLLOW_PREDICTION = "follow-prediction"
GREEDY = "greedy"
PERMUTATION = "permutation"
ALGORITHMS = (FOLLOW_PREDICTION, GREEDY, PERMUTATION)


@dataclass(frozen=True, eq=False)
class ArrivalSequence:
    base: CostMatrix
    order: tuple

    def __post_init__(self):
        order = tuple(int(v) for v in self.order)
        check_permutation(np.array(order, dtype=np.int64), self.base.n)
        object.__setattr__(self, "order", order)

    @property
    def n(self):
        return self.base.n

    @classmethod
    def natural(cls, base: CostMatrix):
        return cls(base, tuple(range(base.n)))

    @classmethod
    def shuffled(cls, base: CostMatrix, seed: int):
        perm = make_rng(seed).permutation(base.n)
        return cls(base, tuple(perm.tolist()))


class RequestView:
    """Read access to the base matrix as the algorithm is allowed to see it."""

    def __init__(self, seq: ArrivalSequence, algorithm: str, guarded: bool):
        self._w = seq.base.weights
        self._order = seq.order
        self._arrived = np.zeros(seq.n, dtype=bool)
        self.algorithm = algorithm
        self.guarded = guarded
        self.step = -1
        self.reads = 0
        self.n = seq.n
        self.integral = seq.base.is_integral

    def _advance(self):
        self.step += 1
        v = self._order[self.step]
        self._arrived[v] = True
        return v

    def _check(self, v):
        self.reads += 1
        if self.guarded and not self._arrived[v]:
            raise ProtocolViolation(self.algorithm, self.step, int(v))

    def column(self, v) -> np.ndarray:
        self._check(v)
        return self._w[:, v]

    def weight(self, u, v):
        self._check(v)
        return self._w[u, v].item()


class OnlineAlgorithm:
    """Base class: override :meth:`decide` (and :meth:`start` if needed)."""

    name = "online"

    def start(self, n: int, view: RequestView):
        pass

    def decide(self, step: int, request: int, view: RequestView) -> int:
        raise NotImplementedError


class FollowPrediction(OnlineAlgorithm):
    """Solve the predicted matrix once, then serve each request by table lookup."""

    name = FOLLOW_PREDICTION

    def __init__(self, advice: AdviceRecord | None = None, plan=None):
        if (advice is None) == (plan is None):
            raise ValueError("give exactly one of advice or plan")
        self.advice = advice
        self.plan = None if plan is None else tuple(int(u) for u in plan)
        self.plan_seconds = 0.0

    def start(self, n, view):
        if self.plan is None:
            if self.advice.n != n:
                raise ValueError(f"advice has n={self.advice.n}, instance has n={n}")
            t0 = time.perf_counter()
            self.plan = solve_exact(self.advice.predicted).match
            self.plan_seconds = time.perf_counter() - t0
        else:
            # externally supplied advice must be a complete matching up front
            check_permutation(np.array(self.plan, dtype=np.int64), n)

    def decide(self, step, request, view):
        return self.plan[request]


class Greedy(OnlineAlgorithm):
    """Cheapest free server for each request; ties to the lowest index."""

    name = GREEDY

    def start(self, n, view):
        self.free = np.ones(n, dtype=bool)
        self.big = np.iinfo(np.int64).max if view.integral else np.inf

    def decide(self, step, request, view):
        col = view.column(request)
        u = int(np.argmin(np.where(self.free, col, self.big)))
        self.free[u] = False
        return u


class Permutation(OnlineAlgorithm):
    """Deterministic (2n-1)-competitive permutation algorithm.

    Keeps an optimal matching of the revealed requests and serves the new
    request with the one server that the updated optimum adds. The prefix
    optimum is grown by one shortest augmenting path per arrival, which keeps
    the set of used servers nested from step to step.
    """

    name = PERMUTATION

    def start(self, n, view):
        self.assigner = IncrementalAssigner(n, integral=view.integral)

    def decide(self, step, request, view):
        return self.assigner.add(view.column(request))


@dataclass
class OnlineRun:
    algorithm: str
    order: tuple
    decisions: tuple
    total_cost: int | float
    guarded: bool = False
    violations: int = 0
    timings: dict = field(default_factory=dict)
    advice: AdviceRecord | None = field(default=None, repr=False)

    def matching(self) -> tuple:
        """Decisions re-indexed by request: ``match[v]`` serves column ``v``."""
        match = [0] * len(self.order)
        for v, u in zip(self.order, self.decisions):
            match[v] = u
        return tuple(match)

    def to_dict(self):
        return {
            "algorithm": self.algorithm,
            "order": list(self.order),
            "decisions": list(self.decisions),
            "total_cost": self.total_cost,
            "guarded": self.guarded,
            "violations": self.violations,
            "timings": dict(self.timings),
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["algorithm"], tuple(doc["order"]), tuple(doc["decisions"]),
                   doc["total_cost"], doc["guarded"], doc["violations"], dict(doc["timings"]))


def execute(seq: ArrivalSequence, algorithm: OnlineAlgorithm, guarded=False) -> OnlineRun:
    n = seq.n
    view = RequestView(seq, algorithm.name, guarded)
    W = seq.base.weights
    used = np.zeros(n, dtype=bool)
    decisions = []
    total = 0

    t0 = time.perf_counter()
    algorithm.start(n, view)
    t1 = time.perf_counter()
    for t in range(n):
        v = view._advance()
        u = algorithm.decide(t, v, view)
        if not isinstance(u, (int, np.integer)) or not 0 <= u < n:
            raise InvalidMatchingError(f"{algorithm.name} chose invalid server {u!r} at step {t}")
        u = int(u)
        if used[u]:
            raise InvalidMatchingError(
                f"{algorithm.name} reassigned server {u} at step {t}; assignments are irrevocable"
            )
        used[u] = True
        decisions.append(u)
        total += W[u, v].item()
    t2 = time.perf_counter()

    timings = {"start": t1 - t0, "serve": t2 - t1}
    if isinstance(algorithm, FollowPrediction):
        timings["plan"] = algorithm.plan_seconds
    return OnlineRun(
        algorithm=algorithm.name,
        order=seq.order,
        decisions=tuple(decisions),
        total_cost=total,
        guarded=guarded,
        timings=timings,
        advice=getattr(algorithm, "advice", None),
    )


def run_follow_prediction(seq: ArrivalSequence, advice: AdviceRecord, guarded=False) -> OnlineRun:
    if advice.n != seq.n:
        raise ValueError(f"advice has n={advice.n}, instance has n={seq.n}")
    return execute(seq, FollowPrediction(advice), guarded)


def run_greedy(seq: ArrivalSequence, guarded=False) -> OnlineRun:
    return execute(seq, Greedy(), guarded)


def run_permutation(seq: ArrivalSequence, guarded=False) -> OnlineRun:
    return execute(seq, Permutation(), guarded)


def make_algorithm(name: str, advice: AdviceRecord | None = None) -> OnlineAlgorithm:
    if name == FOLLOW_PREDICTION:
        if advice is None:
            raise ValueError("follow-prediction needs advice")
        return FollowPrediction(advice)
    if name == GREEDY:
        return Greedy()
    if name == PERMUTATION:
        return Permutation()
    raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")


def replay_guard(seq: ArrivalSequence, algorithm: OnlineAlgorithm) -> OnlineRun:
    """Run ``algorithm`` so that any look at a future request fails the run."""
    return execute(seq, algorithm, guarded=True)
