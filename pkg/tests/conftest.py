import sys
import itertools

import numpy as np
import pytest

from signedwhole.graph import SignedGraph

# vertex v_i of the drawings is index i-1 here

FIG1A = [(0, 1, 1), (0, 2, 1), (1, 2, 1), (1, 3, -1), (2, 3, -1), (2, 5, -1),
         (3, 4, 1), (3, 6, 1), (4, 5, 1), (5, 6, 1)]
FIG1B = [(0, 1, 1), (0, 2, 1), (1, 2, 1), (3, 4, 1), (5, 6, 1), (5, 7, 1),
         (1, 3, -1), (1, 7, -1), (2, 3, -1), (2, 7, -1), (3, 7, -1), (4, 7, -1), (4, 6, -1)]
FIG3A = [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1)]
FIG3B = [(0, 1, 1), (0, 2, -1), (0, 3, 1), (1, 2, -1)]
FIG5 = [(0, 1, 1), (0, 2, -1), (1, 2, -1), (1, 3, 1), (2, 3, 1), (3, 4, -1), (3, 5, -1), (4, 5, 1)]
# clusters as drawn for the gb scheme: {v1,v2}, {v3,v4}, {v5,v6}
FIG5_GB = (0, 0, 1, 1, 2, 2)

# v1 with positive neighbours v2, v3 and negative neighbour v4; v9 hangs off v2
# by a positive edge, v10 off v4 by a positive edge (so v1 -> v10 is negative)
FIG4 = [(0, 1, 1), (0, 2, 1), (0, 3, -1), (1, 8, 1), (3, 9, 1), (2, 4, -1), (3, 5, 1),
        (4, 6, 1), (5, 7, -1)]


@pytest.fixture
def fig1a():
    return SignedGraph(7, FIG1A)


@pytest.fixture
def fig1b():
    return SignedGraph(8, FIG1B)


@pytest.fixture
def fig3a():
    return SignedGraph(4, FIG3A)


@pytest.fixture
def fig3b():
    return SignedGraph(4, FIG3B)


@pytest.fixture
def fig4():
    return SignedGraph(10, FIG4)


@pytest.fixture
def fig5():
    return SignedGraph(6, FIG5)


def random_graph(rng, n, p=0.5, neg=0.5):
    edges = []
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < p:
            edges.append((u, v, -1 if rng.random() < neg else 1))
    return SignedGraph(n, edges)


def brute_frustration(g, mode):
    """Independent exact oracle: depth-first assignment with pruning.

    bisection: every 0/1 labelling; free_k: clusters opened lazily so each
    set partition is met once.
    """
    n = g.n
    if n == 0:
        return 0
    nbrs = [[] for _ in range(n)]
    for u, v, s in g.edges:
        nbrs[max(u, v)].append((min(u, v), int(s)))
    best = [g.m + 1]
    lab = [0] * n

    def go(i, used, cost):
        if cost >= best[0]:
            return
        if i == n:
            best[0] = cost
            return
        top = 2 if mode == "bisection" else used + 1
        for c in range(top):
            extra = 0
            for j, s in nbrs[i]:
                same = lab[j] == c
                if (s > 0 and not same) or (s < 0 and same):
                    extra += 1
            lab[i] = c
            go(i + 1, max(used, c + 1), cost + extra)

    go(0, 0, 0)
    return best[0]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in mod.VERDICTS:
        terminalreporter.write_line(mod.VERDICTS[key])
