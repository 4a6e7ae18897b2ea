"""Simulated machine-learned advice.

The predictor is a black box that returns the true matrix with errors. Its
error is controlled by two knobs:

* ``epsilon`` is the fraction of cells that are wrong. Exactly
  ``round(epsilon * n**2)`` distinct cells are drawn uniformly without
  replacement.
* ``mu`` sets the size of each error as a fraction of the matrix maximum:
  ``delta = round(mu * max(A))``.

Every selected cell moves by exactly ``+delta`` or ``-delta``. The direction
is forced when one side would leave ``[min(A), max(A)]`` (upper bound
checked first). Otherwise a fair coin decides: ``+delta`` when a uniform
draw is ``>= 0.5``. The total L1 error is therefore exactly
``round(epsilon * n**2) * delta``.

Randomness for one prediction comes from one PCG64 stream seeded by
``spec.seed``. The cell sample is drawn first. Then comes one uniform per
selected cell, in row-major cell order, whether or not that cell's
direction is forced.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleMagnitudeError
from .instance import CostMatrix, make_rng


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class PerturbationSpec:
    epsilon: float
    mu: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def n_cells(self, n):
        return round_half_up(self.epsilon * n * n)

    def delta(self, A: CostMatrix):
        return round_half_up(self.mu * A.max())

    def to_dict(self):
        return {"epsilon": self.epsilon, "mu": self.mu, "seed": int(self.seed)}


@dataclass(frozen=True, eq=False)
class AdviceRecord:
    predicted: CostMatrix
    mask: np.ndarray
    per_cell_delta: int
    total_error: int | float
    spec: PerturbationSpec
    warnings: tuple = field(default=())

    @property
    def n(self):
        return self.predicted.n

    def signs(self, A: CostMatrix) -> np.ndarray:
        """+1/-1 per perturbed cell, row-major; empty when ``delta == 0``."""
        if self.per_cell_delta == 0:
            return np.zeros(0, dtype=np.int64)
        diff = (self.predicted.weights - A.weights)[self.mask]
        return np.sign(diff).astype(np.int64)

    def to_dict(self, A: CostMatrix):
        return {
            "n": self.n,
            "spec": self.spec.to_dict(),
            "delta": self.per_cell_delta,
            "total_error": self.total_error,
            "mask_runs": encode_runs(self.mask),
            "signs": self.signs(A).tolist(),
            "warnings": list(self.warnings),
        }

    def to_json(self, A: CostMatrix, **kw) -> str:
        return json.dumps(self.to_dict(A), **kw)

    @classmethod
    def from_dict(cls, doc, A: CostMatrix) -> "AdviceRecord":
        """Rebuild the advice for the true matrix ``A`` from an audit document."""
        n = doc["n"]
        if n != A.n:
            raise ValueError(f"advice is for n={n}, matrix has n={A.n}")
        mask = decode_runs(doc["mask_runs"], n)
        delta = doc["delta"]
        signs = np.asarray(doc["signs"], dtype=np.int64)
        w = A.weights.copy()
        if delta:
            w[mask] += signs * delta
        predicted = CostMatrix(w)
        return cls(predicted, mask, delta, doc["total_error"],
                   PerturbationSpec(**doc["spec"]), tuple(doc.get("warnings", ())))

    @classmethod
    def from_json(cls, text, A: CostMatrix) -> "AdviceRecord":
        return cls.from_dict(json.loads(text), A)


def encode_runs(mask: np.ndarray):
    """Run-length encode the set cells of ``mask`` as ``[start, length]`` pairs
    over row-major flat indices."""
    flat = np.flatnonzero(np.asarray(mask).ravel())
    if flat.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(flat) != 1) + 1
    starts = np.concatenate(([0], breaks))
    ends = np.concatenate((breaks, [flat.size]))
    return [[int(flat[s]), int(e - s)] for s, e in zip(starts, ends)]


def decode_runs(runs, n) -> np.ndarray:
    mask = np.zeros(n * n, dtype=bool)
    for start, length in runs:
        mask[start:start + length] = True
    return mask.reshape(n, n)


def select_cells(n: int, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    """Boolean ``n x n`` mask with exactly ``round(epsilon * n**2)`` cells set."""
    k = round_half_up(epsilon * n * n)
    mask = np.zeros(n * n, dtype=bool)
    if k:
        mask[rng.choice(n * n, size=k, replace=False)] = True
    return mask.reshape(n, n)


def _directions(values, delta, lo, hi, draws):
    up_blocked = values + delta > hi
    down_blocked = values - delta < lo
    if (up_blocked & down_blocked).any():
        a = values[up_blocked & down_blocked][0]
        raise InfeasibleMagnitudeError(
            f"no in-bounds move of size {delta} for value {a} within [{lo}, {hi}]"
        )
    coin = np.where(draws >= 0.5, 1, -1)
    return np.where(up_blocked, -1, np.where(down_blocked, 1, coin))


def incr_sign(a, delta, lo, hi, rng: np.random.Generator):
    """Signed perturbation for a single value ``a`` in ``[lo, hi]``.

    Consumes exactly one uniform draw from ``rng``.
    """
    if delta > hi - lo:
        raise InfeasibleMagnitudeError(f"delta={delta} exceeds the value range {hi - lo}")
    draw = rng.random()
    sign = _directions(np.array([a]), delta, lo, hi, np.array([draw]))[0]
    return int(sign) * delta


def make_advice(A: CostMatrix, spec: PerturbationSpec) -> AdviceRecord:
    n = A.n
    lo, hi = A.min(), A.max()
    delta = spec.delta(A)
    warnings = []
    if spec.mu > 0 and delta == 0:
        warnings.append(f"mu={spec.mu} rounds to a zero perturbation for max={hi}; advice is exact")

    rng = make_rng(spec.seed)
    mask = select_cells(n, spec.epsilon, rng)
    k = int(mask.sum())
    if k and delta > hi - lo:
        raise InfeasibleMagnitudeError(
            f"delta={delta} (mu={spec.mu} * max={hi}) exceeds max - min = {hi - lo}"
        )
    draws = rng.random(k)

    w = A.weights.copy()
    if k and delta:
        values = w[mask]
        w[mask] = values + _directions(values, delta, lo, hi, draws) * delta
    predicted = CostMatrix(w)
    total_error = np.abs(predicted.weights - A.weights).sum().item()
    if A.is_integral:
        assert total_error == k * delta
    return AdviceRecord(predicted, mask, delta, total_error, spec, tuple(warnings))
