"""Signed graph data model: neighborhoods, degrees, path signs, reachable sets."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np


class Sign(IntEnum):
    POSITIVE = 1
    NEGATIVE = -1

    def __mul__(self, other):
        return Sign(int(self) * int(other))

    @property
    def glyph(self) -> str:
        return "+" if self is Sign.POSITIVE else "-"

    @classmethod
    def coerce(cls, s) -> "Sign":
        if isinstance(s, Sign):
            return s
        if s in ("+", "+1", 1, 1.0):
            return cls.POSITIVE
        if s in ("-", "-1", -1, -1.0):
            return cls.NEGATIVE
        raise ValueError(f"not a sign: {s!r}")


class GraphError(ValueError):
    """Invalid graph construction or query (bad vertex id, self-loop, duplicate edge)."""


class SignedGraph:
    """Undirected, unweighted, simple signed graph on vertices ``0..n-1``.

    Edges are normalized so that ``u < v`` and stored sorted by ``(u, v)``.
    The object is immutable after construction.
    """

    __slots__ = ("n", "edges", "_pos", "_neg", "_sign_of", "name")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, object]] = (), name: str | None = None):
        if n < 0:
            raise GraphError("negative vertex count")
        self.n = int(n)
        self.name = name
        sign_of: dict[tuple[int, int], Sign] = {}
        for e in edges:
            u, v, s = int(e[0]), int(e[1]), Sign.coerce(e[2])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop on vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in sign_of:
                if sign_of[key] != s:
                    raise GraphError(f"edge {key} given with conflicting signs")
                raise GraphError(f"duplicate edge {key}")
            sign_of[key] = s
        self._sign_of = sign_of
        self.edges: tuple[tuple[int, int, Sign], ...] = tuple(
            (u, v, sign_of[(u, v)]) for (u, v) in sorted(sign_of)
        )
        pos: list[list[int]] = [[] for _ in range(n)]
        neg: list[list[int]] = [[] for _ in range(n)]
        for u, v, s in self.edges:
            bucket = pos if s is Sign.POSITIVE else neg
            bucket[u].append(v)
            bucket[v].append(u)
        self._pos = tuple(tuple(sorted(a)) for a in pos)
        self._neg = tuple(tuple(sorted(a)) for a in neg)

    # -- basic accessors -------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def positive_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v, s in self.edges if s is Sign.POSITIVE]

    @property
    def negative_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v, s in self.edges if s is Sign.NEGATIVE]

    def sign(self, u: int, v: int) -> Sign | None:
        key = (u, v) if u < v else (v, u)
        return self._sign_of.get(key)

    def _check(self, u: int) -> None:
        if not (0 <= u < self.n):
            raise GraphError(f"vertex {u} out of range for n={self.n}")

    def neighborhood(self, u: int, filter: str = "any") -> list[int]:
        self._check(u)
        if filter == "positive":
            return list(self._pos[u])
        if filter == "negative":
            return list(self._neg[u])
        if filter == "any":
            return sorted(self._pos[u] + self._neg[u])
        raise ValueError(f"unknown neighborhood filter {filter!r}")

    def degree(self, u: int, filter: str = "any") -> int:
        self._check(u)
        if filter == "positive":
            return len(self._pos[u])
        if filter == "negative":
            return len(self._neg[u])
        return len(self._pos[u]) + len(self._neg[u])

    def degrees(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(k_plus, k_minus)`` arrays over all vertices."""
        kp = np.fromiter((len(a) for a in self._pos), dtype=np.int64, count=self.n)
        kn = np.fromiter((len(a) for a in self._neg), dtype=np.int64, count=self.n)
        return kp, kn

    def signed_adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v, s in self.edges:
            a[u, v] = a[v, u] = int(s)
        return a

    def flipped(self) -> "SignedGraph":
        return SignedGraph(self.n, [(u, v, -int(s)) for u, v, s in self.edges])

    def relabeled(self, perm: Sequence[int]) -> "SignedGraph":
        """Graph with vertex ``i`` renamed ``perm[i]``."""
        return SignedGraph(self.n, [(perm[u], perm[v], s) for u, v, s in self.edges], name=self.name)

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for r in range(self.n):
            if seen[r]:
                continue
            seen[r] = True
            comp, queue = [r], deque([r])
            while queue:
                x = queue.popleft()
                for y in self._pos[x] + self._neg[x]:
                    if not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        queue.append(y)
            comps.append(sorted(comp))
        return comps

    def __eq__(self, other) -> bool:
        return isinstance(other, SignedGraph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"SignedGraph(n={self.n}, m={self.m})"


def path_sign(signs: Sequence) -> Sign:
    if len(signs) == 0:
        raise ValueError("path_sign of an empty path")
    odd = sum(1 for s in signs if Sign.coerce(s) is Sign.NEGATIVE) % 2
    return Sign.NEGATIVE if odd else Sign.POSITIVE


def reachable_sets(g: SignedGraph, u: int) -> tuple[set[int], set[int]]:
    """Vertices joined to ``u`` by positive / negative shortest paths.

    A vertex reached by shortest paths of both signs lands in both sets.
    """
    g._check(u)
    dist = {u: 0}
    signs: dict[int, set[int]] = {u: {1}}
    frontier = [u]
    while frontier:
        nxt: list[int] = []
        for x in frontier:
            for y in g.neighborhood(x):
                s = int(g.sign(x, y))
                if y not in dist:
                    dist[y] = dist[x] + 1
                    signs[y] = set()
                    nxt.append(y)
                if dist[y] == dist[x] + 1:
                    signs[y].update(s * t for t in signs[x])
        frontier = nxt
    pos = {v for v, ss in signs.items() if v != u and 1 in ss}
    neg = {v for v, ss in signs.items() if v != u and -1 in ss}
    return pos, neg


def ambiguous_reach_count(g: SignedGraph) -> int:
    """Number of ordered pairs (u, v) reached by shortest paths of both signs."""
    total = 0
    for u in range(g.n):
        p, q = reachable_sets(g, u)
        total += len(p & q)
    return total


def eccentricities(g: SignedGraph) -> list[int]:
    out = []
    for r in range(g.n):
        dist = {r: 0}
        queue = deque([r])
        while queue:
            x = queue.popleft()
            for y in g.neighborhood(x):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        out.append(max(dist.values()))
    return out


def diameter(g: SignedGraph) -> int:
    """Largest finite shortest-path length (over all components)."""
    return max(eccentricities(g), default=0)


@dataclass(frozen=True)
class GraphStats:
    order: int
    size: int
    density: float
    positive_edge_count: int
    negative_edge_count: int
    positive_edge_proportion: float


def graph_stats(g: SignedGraph) -> GraphStats:
    n, m = g.n, g.m
    npos = len(g.positive_edges)
    density = 2.0 * m / (n * (n - 1)) if n >= 2 else 0.0
    prop = 100.0 * npos / m if m > 0 else 0.0
    return GraphStats(n, m, density, npos, m - npos, prop)


@dataclass
class GraphCollection:
    """Labeled set of signed graphs: the unit of embedding and evaluation."""

    graphs: list[SignedGraph]
    labels: list[int]
    ids: list[str] = field(default_factory=list)
    class_names: list[str] = field(default_factory=list)
    partitions: list | None = None
    name: str = "collection"

    def __post_init__(self):
        if not self.ids:
            self.ids = [f"g{i:05d}" for i in range(len(self.graphs))]
        if len(self.labels) != len(self.graphs) or len(self.ids) != len(self.graphs):
            raise ValueError("graphs, labels and ids must have equal length")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("graph ids must be unique")
        if not self.class_names:
            self.class_names = [str(c) for c in sorted(set(self.labels))]

    def __len__(self):
        return len(self.graphs)

    def subset(self, idx: Sequence[int]) -> "GraphCollection":
        return GraphCollection(
            [self.graphs[i] for i in idx],
            [self.labels[i] for i in idx],
            [self.ids[i] for i in idx],
            list(self.class_names),
            None if self.partitions is None else [self.partitions[i] for i in idx],
            self.name,
        )
