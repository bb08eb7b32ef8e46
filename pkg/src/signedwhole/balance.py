"""Structural balance, frustration and correlation clustering solvers.

Two notions of balance are handled: strict (bisections, ``mode="bisection"``)
and generalized (any number of clusters, ``mode="free_k"``).
"""
from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import SignedGraph, Sign

BISECTION_CAP = 20
FREE_K_CAP = 12

MODES = ("bisection", "free_k")


class CapacityError(RuntimeError):
    """Raised when an exact solve would exceed the enumeration cap."""


@dataclass(frozen=True)
class Partition:
    assignment: tuple[int, ...]

    def __post_init__(self):
        a = self.assignment
        if a and (min(a) != 0 or sorted(set(a)) != list(range(max(a) + 1))):
            raise ValueError("cluster ids must be 0..k-1 with every id used")

    @classmethod
    def from_assignment(cls, assignment: Sequence[int]) -> "Partition":
        """Canonical form: clusters renumbered by first appearance."""
        remap: dict[int, int] = {}
        out = []
        for c in assignment:
            c = int(c)
            if c not in remap:
                remap[c] = len(remap)
            out.append(remap[c])
        return cls(tuple(out))

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def k(self) -> int:
        return max(self.assignment) + 1 if self.assignment else 0

    def clusters(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for v, c in enumerate(self.assignment):
            out[c].append(v)
        return out

    def checksum(self) -> str:
        import hashlib

        return hashlib.sha1(",".join(map(str, self.assignment)).encode()).hexdigest()[:12]


@dataclass(frozen=True)
class FrustrationResult:
    frustrated_edge_count: int
    frustration_ratio: float
    partition: Partition
    method: str = "exact"


def _result(g: SignedGraph, count: int, assignment, method: str) -> FrustrationResult:
    count = int(count)
    return FrustrationResult(count, count / g.m if g.m else 0.0, Partition.from_assignment(assignment), method)


def frustration_of_partition(g: SignedGraph, p) -> int:
    a = p.assignment if isinstance(p, Partition) else tuple(p)
    if len(a) != g.n:
        raise ValueError(f"partition has {len(a)} entries, graph has {g.n} vertices")
    count = 0
    for u, v, s in g.edges:
        same = a[u] == a[v]
        if (s is Sign.POSITIVE) != same:
            count += 1
    return count


def _edge_arrays(g: SignedGraph):
    if not g.m:
        return np.zeros(0, int), np.zeros(0, int), np.zeros(0, bool)
    e = np.array([(u, v, int(s)) for u, v, s in g.edges])
    return e[:, 0], e[:, 1], e[:, 2] > 0


@functools.lru_cache(maxsize=None)
def _restricted_growth_strings(n: int) -> np.ndarray:
    """All set partitions of ``n`` items as restricted growth strings, in lex order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)
    for _ in range(1, n):
        counts = top.astype(np.int64) + 2
        parent = np.repeat(np.arange(len(rows)), counts)
        starts = np.cumsum(counts) - counts
        child = (np.arange(counts.sum()) - np.repeat(starts, counts)).astype(np.int8)
        rows = np.concatenate([rows[parent], child[:, None]], axis=1)
        top = np.maximum(top[parent], child)
    rows.setflags(write=False)
    return rows


@functools.lru_cache(maxsize=None)
def _bisections(n: int) -> np.ndarray:
    """All 0/1 vectors with vertex 0 pinned to 0, in lex order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    codes = np.arange(2 ** (n - 1), dtype=np.int64)
    shifts = np.arange(n - 2, -1, -1)
    bits = ((codes[:, None] >> shifts) & 1).astype(np.int8)
    rows = np.concatenate([np.zeros((len(codes), 1), np.int8), bits], axis=1)
    rows.setflags(write=False)
    return rows


def exact_min_frustration(g: SignedGraph, mode: str = "bisection") -> FrustrationResult:
    """Minimum frustration by full enumeration.

    Ties go to the lexicographically smallest assignment vector (vertex 0 is
    always in cluster 0).
    """
    if mode == "bisection":
        if g.n > BISECTION_CAP:
            raise CapacityError(f"n={g.n} exceeds exact bisection cap {BISECTION_CAP}; use local search")
        states = _bisections(g.n)
    elif mode == "free_k":
        if g.n > FREE_K_CAP:
            raise CapacityError(f"n={g.n} exceeds exact free_k cap {FREE_K_CAP}; use local search")
        states = _restricted_growth_strings(g.n)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    us, vs, pos = _edge_arrays(g)
    cost = np.zeros(len(states), dtype=np.int32)
    for u, v, p in zip(us, vs, pos):
        same = states[:, u] == states[:, v]
        cost += same if not p else ~same
    best = int(np.argmin(cost))
    return _result(g, cost[best], states[best], "exact")


def _heuristic_start(g: SignedGraph, mode: str) -> np.ndarray:
    if mode == "free_k":
        # positive components: no positive edge is frustrated
        a = -np.ones(g.n, dtype=int)
        c = 0
        for r in range(g.n):
            if a[r] >= 0:
                continue
            a[r] = c
            queue = deque([r])
            while queue:
                x = queue.popleft()
                for y in g.neighborhood(x, "positive"):
                    if a[y] < 0:
                        a[y] = c
                        queue.append(y)
            c += 1
        return a
    # BFS 2-colouring that respects edge signs where it can
    a = -np.ones(g.n, dtype=int)
    for r in range(g.n):
        if a[r] >= 0:
            continue
        a[r] = 0
        queue = deque([r])
        while queue:
            x = queue.popleft()
            for y in g.neighborhood(x):
                if a[y] < 0:
                    a[y] = a[x] if g.sign(x, y) is Sign.POSITIVE else 1 - a[x]
                    queue.append(y)
    return a


def _climb(ap: np.ndarray, an: np.ndarray, a: np.ndarray, mode: str) -> np.ndarray:
    n = len(a)
    kp = ap.sum(axis=1)
    slots = 2 if mode == "bisection" else n + 1
    a = a.copy()
    rows = np.arange(n)
    while True:
        onehot = np.zeros((n, slots))
        onehot[rows, a] = 1.0
        p = ap @ onehot
        q = an @ onehot
        cost = kp[:, None] - p + q
        delta = cost - cost[rows, a][:, None]
        used = onehot.sum(axis=0) > 0
        if mode == "free_k":
            empty = np.flatnonzero(~used)
            allowed = used.copy()
            if len(empty):
                allowed[empty[0]] = True
            delta[:, ~allowed] = np.inf
        delta[rows, a] = np.inf
        best_move = delta.min() if delta.size else np.inf
        best_merge = np.inf
        if mode == "free_k":
            bp = onehot.T @ ap @ onehot
            bn = onehot.T @ an @ onehot
            md = bn - bp
            iu = np.triu_indices(slots, 1)
            mask = np.zeros_like(md, dtype=bool)
            mask[iu] = True
            mask &= used[:, None] & used[None, :]
            md[~mask] = np.inf
            best_merge = md.min()
        if min(best_move, best_merge) >= 0:
            return a
        if best_move <= best_merge:
            u, c = np.unravel_index(np.argmin(delta), delta.shape)  # row-major: lowest u, then lowest c
            a[u] = c
        else:
            x, y = np.unravel_index(np.argmin(md), md.shape)
            a[a == y] = x


def local_search_min_frustration(g: SignedGraph, mode: str = "bisection", restarts: int = 20,
                                 seed: int = 0) -> FrustrationResult:
    """Best-of-restarts steepest-descent single-vertex moves (plus merges for free_k).

    Restart 0 starts from a sign-respecting heuristic partition, the others
    from random assignments drawn from ``seed``.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if g.n == 0:
        return _result(g, 0, (), "local")
    adj = g.signed_adjacency()
    ap = (adj > 0).astype(float)
    an = (adj < 0).astype(float)
    rng = np.random.default_rng(seed)
    best = None
    for r in range(restarts):
        if r == 0:
            start = _heuristic_start(g, mode)
        elif mode == "bisection":
            start = rng.integers(0, 2, g.n)
        else:
            start = rng.integers(0, int(rng.integers(1, g.n + 1)), g.n)
        a = _climb(ap, an, start, mode)
        canon = Partition.from_assignment(a).assignment
        if mode == "bisection" and canon and canon[0] != 0:
            canon = tuple(1 - c for c in canon)
        key = (frustration_of_partition(g, canon), canon)
        if best is None or key < best:
            best = key
    return _result(g, best[0], best[1], "local")


def min_frustration(g: SignedGraph, mode: str = "bisection", restarts: int = 20, seed: int = 0) -> FrustrationResult:
    """Exact solve within the caps, local search beyond them."""
    cap = BISECTION_CAP if mode == "bisection" else FREE_K_CAP
    if g.n <= cap:
        return exact_min_frustration(g, mode)
    return local_search_min_frustration(g, mode, restarts=restarts, seed=seed)


def is_balanced(g: SignedGraph, mode: str = "strict") -> bool:
    if mode == "strict":
        color = [-1] * g.n
        for r in range(g.n):
            if color[r] >= 0:
                continue
            color[r] = 0
            queue = deque([r])
            while queue:
                x = queue.popleft()
                for y in g.neighborhood(x):
                    want = color[x] if g.sign(x, y) is Sign.POSITIVE else 1 - color[x]
                    if color[y] < 0:
                        color[y] = want
                        queue.append(y)
                    elif color[y] != want:
                        return False
        return True
    if mode == "generalized":
        comp = _heuristic_start(g, "free_k")
        return all(comp[u] != comp[v] for u, v in g.negative_edges)
    raise ValueError(f"unknown balance mode {mode!r}")
