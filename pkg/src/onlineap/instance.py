"""Cost-matrix model, OR-Library assignment files and seeded synthetic instances.

An instance is an ``n x n`` nonnegative weight matrix. Rows are the servers
known upfront, columns are the requests that arrive online, so
``weights[u, v]`` is the cost of serving request ``v`` with server ``u``.

The OR-Library (Beasley) assignment format is ``n`` followed by ``n*n``
integer costs in row-major order, separated by arbitrary whitespace.

All randomness in the package uses numpy's ``PCG64`` bit generator, whose
output for a given seed is identical across platforms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, MalformedInstanceError, ParseError

BEASLEY_LO = 1
BEASLEY_HI = 100


def make_rng(seed) -> np.random.Generator:
    """Return the package's standard generator (PCG64) for ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


class Source(str, enum.Enum):
    ORLIB_FILE = "orlib-file"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class InstanceMeta:
    source: Source
    label: str
    seed: int | None = None

    def __post_init__(self):
        if self.source is Source.SYNTHETIC and self.seed is None:
            raise ValueError("synthetic instances must carry their seed")

    def to_dict(self):
        return {"source": self.source.value, "label": self.label, "seed": self.seed}


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Immutable square matrix of nonnegative weights.

    Integral inputs are stored as ``int64`` so that every cost sum downstream
    is exact; anything else is stored as ``float64``.
    """

    weights: np.ndarray
    meta: InstanceMeta | None = field(default=None, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] == 0:
            raise DomainError(f"cost matrix must be square and non-empty, got shape {w.shape}")
        if w.dtype.kind in "iub":
            w = w.astype(np.int64)
        elif w.dtype.kind == "f":
            if not np.all(np.isfinite(w)):
                raise DomainError("cost matrix contains non-finite entries")
            if np.all(w == np.round(w)) and np.abs(w).max() < 2**53:
                w = w.astype(np.int64)
            else:
                w = w.astype(np.float64)
        else:
            raise DomainError(f"unsupported weight dtype {w.dtype}")
        if (w < 0).any():
            u, v = np.argwhere(w < 0)[0]
            raise DomainError(f"negative weight {w[u, v]} at ({u}, {v})")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def is_integral(self) -> bool:
        return self.weights.dtype.kind == "i"

    def min(self):
        return self.weights.min().item()

    def max(self):
        return self.weights.max().item()

    def __eq__(self, other):
        if not isinstance(other, CostMatrix):
            return NotImplemented
        return self.weights.shape == other.weights.shape and bool(
            np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.n, self.weights.tobytes()))

    def __repr__(self):
        label = f", label={self.meta.label!r}" if self.meta else ""
        return f"CostMatrix(n={self.n}{label})"


def matrix_stats(A: CostMatrix):
    """Exact ``(min, max, sum)`` of the entries."""
    w = A.weights
    return w.min().item(), w.max().item(), w.sum().item()


def parse_orlib(text: str, label: str = "<text>") -> CostMatrix:
    tokens = text.split()
    if not tokens:
        raise MalformedInstanceError(expected=1, found=0)
    values = []
    for pos, tok in enumerate(tokens):
        try:
            values.append(int(tok))
        except ValueError:
            raise ParseError(tok, pos) from None
    n = values[0]
    if n < 1:
        raise DomainError(f"instance size must be positive, got {n}")
    body = values[1:]
    if len(body) != n * n:
        raise MalformedInstanceError(expected=n * n, found=len(body))
    w = np.array(body, dtype=np.int64).reshape(n, n)
    return CostMatrix(w, InstanceMeta(Source.ORLIB_FILE, label))


def load_orlib(path) -> CostMatrix:
    path = Path(path)
    return parse_orlib(path.read_text(), label=path.name)


def render(A: CostMatrix) -> str:
    """Inverse of :func:`parse_orlib`: ``n`` then one matrix row per line."""
    if not A.is_integral:
        raise DomainError("the OR-Library format holds integer costs only")
    lines = [str(A.n)]
    lines.extend(" ".join(map(str, row.tolist())) for row in A.weights)
    return "\n".join(lines) + "\n"


def generate_uniform(n: int, lo: int = BEASLEY_LO, hi: int = BEASLEY_HI, seed: int = 0) -> CostMatrix:
    """Draw every entry independently from ``{lo, ..., hi}``.

    Equal arguments give bit-identical matrices on every platform.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if lo < 1 or lo > hi:
        raise ValueError(f"need 1 <= lo <= hi, got lo={lo}, hi={hi}")
    rng = make_rng(seed)
    w = rng.integers(lo, hi, size=(n, n), endpoint=True, dtype=np.int64)
    return CostMatrix(w, InstanceMeta(Source.SYNTHETIC, f"uniform-n{n}-{lo}-{hi}-s{seed}", seed))
