"""Exact minimum-weight perfect matching.

The solver is the O(n^3) shortest-augmenting-path form of the Hungarian
method (Kuhn-Munkres with Jonker-Volgenant style potentials). It stands in
for Karp's O(n^2 log n) algorithm: both return a minimum-cost matching, so
optimal costs and competitive ratios are unaffected.

Requests (matrix columns) are inserted one at a time. After every insertion
the partial matching is optimal for the requests inserted so far, and the set
of used servers only grows by the single server reached by the augmenting
path. :class:`IncrementalAssigner` exposes that step on its own because the
permutation online baseline is exactly this process driven by arrivals.

Ties are broken towards the lowest index: the next column scanned is the
first minimiser of the reduced-cost slack.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidMatchingError, SizeLimitError
from .instance import CostMatrix

BRUTEFORCE_MAX_N = 10


@dataclass(frozen=True)
class Assignment:
    """``match[v] = u``: request (column) ``v`` is served by server (row) ``u``."""

    match: tuple
    total_cost: int | float

    @property
    def n(self):
        return len(self.match)

    def to_dict(self):
        return {"match": list(self.match), "total_cost": self.total_cost}


class IncrementalAssigner:
    """Grow an optimal matching of requests to ``n_servers`` servers.

    Each :meth:`add` inserts one request's cost vector (cost per server) and
    returns the server that became newly occupied. The dual potentials are
    kept so that every intermediate matching is a minimum-cost matching of the
    inserted requests into distinct servers.
    """

    def __init__(self, n_servers, integral=True, capacity=None):
        m = int(n_servers)
        cap = m if capacity is None else int(capacity)
        self.m = m
        self.dtype = np.int64 if integral else np.float64
        self.inf = np.iinfo(np.int64).max // 4 if integral else np.inf
        self.costs = np.zeros((cap, m), dtype=self.dtype)
        self.u = np.zeros(cap, dtype=self.dtype)
        self.v = np.zeros(m, dtype=self.dtype)
        self.owner = np.full(m, -1, dtype=np.int64)
        self.rows = 0

    def add(self, row_costs):
        r = self.rows
        if r >= self.costs.shape[0]:
            raise SizeLimitError(f"cannot place more than {self.costs.shape[0]} requests")
        self.costs[r] = row_costs
        self.rows += 1
        m = self.m
        u, v, owner, C = self.u, self.v, self.owner, self.costs

        # Dijkstra over reduced costs; potentials are settled once the sink is found
        dist = C[r] - v
        way = np.full(m, -1, dtype=np.int64)
        done = np.zeros(m, dtype=bool)
        slack = dist.copy()
        scanned = []
        while True:
            j = int(np.argmin(slack))
            d = slack[j]
            if owner[j] == -1:
                break
            scanned.append(j)
            done[j] = True
            slack[j] = self.inf
            i = owner[j]
            cand = C[i] - v
            cand += d - u[i]
            better = cand < slack
            better &= ~done
            np.copyto(slack, cand, where=better)
            np.copyto(dist, cand, where=better)
            way[better] = j
        sink, total = j, d
        if scanned:
            cols = np.array(scanned, dtype=np.int64)
            shift = total - dist[cols]
            v[cols] -= shift
            u[owner[cols]] += shift
        u[r] += total
        j = sink
        while way[j] != -1:
            prev = way[j]
            owner[j] = owner[prev]
            j = prev
        owner[j] = r
        return sink

    def server_of(self):
        """Array ``a`` with ``a[request] = server`` for inserted requests."""
        out = np.full(self.rows, -1, dtype=np.int64)
        cols = np.flatnonzero(self.owner >= 0)
        out[self.owner[cols]] = cols
        return out

    def cost(self):
        a = self.server_of()
        return self.costs[np.arange(self.rows), a].sum().item()


def solve_exact(A: CostMatrix) -> Assignment:
    """Minimum-cost perfect matching of ``A`` in O(n^3)."""
    n = A.n
    W = A.weights
    solver = IncrementalAssigner(n, integral=A.is_integral)
    for v in range(n):
        solver.add(W[:, v])
    match = solver.server_of()
    return Assignment(tuple(match.tolist()), W[match, np.arange(n)].sum().item())


def solve_rectangular(costs) -> np.ndarray:
    """Optimal assignment of each row of ``costs`` (k x m, k <= m) to a distinct column.

    Solved from scratch; returns the column chosen for each row.
    """
    costs = np.asarray(costs)
    k, m = costs.shape
    if k > m:
        raise ValueError(f"need at most as many rows as columns, got {costs.shape}")
    solver = IncrementalAssigner(m, integral=costs.dtype.kind in "iub", capacity=k)
    for row in costs:
        solver.add(row)
    return solver.server_of()


def solve_bruteforce(A: CostMatrix) -> Assignment:
    """Enumerate all n! matchings; the lexicographically smallest optimum wins."""
    n = A.n
    if n > BRUTEFORCE_MAX_N:
        raise SizeLimitError(f"brute force limited to n <= {BRUTEFORCE_MAX_N}, got n={n}")
    W = A.weights.tolist()
    cols = range(n)
    best, best_cost = None, None
    # permutations() yields in lexicographic order, so strict < keeps the smallest tie
    for perm in itertools.permutations(range(n)):
        c = sum(W[u][v] for v, u in zip(cols, perm))
        if best_cost is None or c < best_cost:
            best, best_cost = perm, c
    return Assignment(tuple(best), best_cost)


def check_permutation(match, n) -> np.ndarray:
    match = np.asarray(match)
    if match.shape != (n,):
        raise ValueError(f"matching has length {match.size}, expected {n}")
    if match.dtype.kind not in "iu":
        raise InvalidMatchingError(f"matching entries must be integers, got dtype {match.dtype}")
    if ((match < 0) | (match >= n)).any() or np.unique(match).size != n:
        raise InvalidMatchingError(f"not a permutation of 0..{n - 1}: {match.tolist()}")
    return match


def evaluate(A: CostMatrix, match) -> int | float:
    """Cost of serving column ``v`` with row ``match[v]`` for every ``v``."""
    match = check_permutation(match, A.n)
    return A.weights[match, np.arange(A.n)].sum().item()
