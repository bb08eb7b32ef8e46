"""Signed GCN with dual hidden states, extended to whole graphs through master nodes.

Each vertex carries a positive and a negative hidden vector. One layer maps

    h+(u) <- act(W+ [mean h+ over N+(u) ; mean h- over N-(u) ; h+(u)])
    h-(u) <- act(W- [mean h- over N+(u) ; mean h+ over N-(u) ; h-(u)])

so information reaching ``u`` through a negative path crosses channels. An
empty neighborhood contributes a zero block. Master nodes are ordinary
vertices appended after the base vertices; the graph vector is read from them.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .balance import FrustrationResult, Partition, frustration_of_partition, min_frustration
from .graph import SignedGraph, Sign
from .utils import Adam, log1pexp, rng_for, sigmoid

log = logging.getLogger(__name__)

SCHEMES = ("none", "plus", "minus", "plusminus", "sb", "gb")


@dataclass
class AugmentedGraph:
    base: SignedGraph
    scheme: str
    master_vertices: list[int]
    master_edges: list[tuple[int, int, Sign]]
    partition_used: Partition | None = None
    frustration: int | None = None

    @property
    def n_total(self) -> int:
        return self.base.n + len(self.master_vertices)

    @property
    def graph(self) -> SignedGraph:
        return SignedGraph(self.n_total, list(self.base.edges) + self.master_edges)

    def metadata(self) -> dict:
        return {
            "scheme": self.scheme,
            "k": len(self.master_vertices),
            "partition_checksum": self.partition_used.checksum() if self.partition_used else "",
            "frustration": "" if self.frustration is None else self.frustration,
        }


def _default_solver(mode: str, seed: int = 0) -> Callable[[SignedGraph], FrustrationResult]:
    return lambda g: min_frustration(g, mode, restarts=20, seed=seed)


def attach_master_nodes(g: SignedGraph, scheme: str,
                        balance_solver: Callable | Partition | Sequence[int] | None = None) -> AugmentedGraph:
    """Add master nodes to ``g`` following ``scheme``.

    For ``sb``/``gb``, ``balance_solver`` is either a callable returning a
    ``FrustrationResult`` (or ``Partition``) for ``g``, or a fixed partition.
    By default the minimum-frustration solver is used.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown master-node scheme {scheme!r}")
    if g.n == 0:
        raise ValueError("cannot attach master nodes to an empty graph")
    n = g.n
    P, N = Sign.POSITIVE, Sign.NEGATIVE
    if scheme == "none":
        return AugmentedGraph(g, scheme, [], [])
    if scheme == "plus":
        return AugmentedGraph(g, scheme, [n], [(n, v, P) for v in range(n)])
    if scheme == "minus":
        return AugmentedGraph(g, scheme, [n], [(n, v, N) for v in range(n)])
    if scheme == "plusminus":
        return AugmentedGraph(g, scheme, [n, n + 1],
                              [(n, v, P) for v in range(n)] + [(n + 1, v, N) for v in range(n)])

    mode = "bisection" if scheme == "sb" else "free_k"
    if balance_solver is None:
        balance_solver = _default_solver(mode)
    if callable(balance_solver):
        res = balance_solver(g)
        part = res.partition if isinstance(res, FrustrationResult) else res
    else:
        part = balance_solver
    if not isinstance(part, Partition):
        part = Partition.from_assignment(part)
    if part.n != n:
        raise ValueError("partition does not match the graph")
    k = 2 if scheme == "sb" else part.k
    if scheme == "sb" and part.k > 2:
        raise ValueError("sb scheme needs a bisection")
    masters = [n + c for c in range(k)]
    edges = [(n + c, v, P if part.assignment[v] == c else N) for c in range(k) for v in range(n)]
    return AugmentedGraph(g, scheme, masters, edges, part, frustration_of_partition(g, part))


@dataclass
class DualHidden:
    pos: list[np.ndarray] = field(default_factory=list)
    neg: list[np.ndarray] = field(default_factory=list)

    def final(self) -> np.ndarray:
        return np.concatenate([self.pos[-1], self.neg[-1]], axis=1)

    def layer(self, t: int) -> np.ndarray:
        return np.concatenate([self.pos[t], self.neg[t]], axis=1)


def init_features(ag: AugmentedGraph, d0: int = 8, seed: int = 0,
                  vertex_keys: Sequence[str] | None = None) -> DualHidden:
    """Degree features on the augmented graph plus a random tail seeded per vertex.

    Base vertex ``i`` uses key ``vertex_keys[i]`` (default ``"v{i}"``), master
    ``j`` uses ``"m{j}"``; the tail is drawn from ``(seed, key)`` only.
    """
    if d0 < 2:
        raise ValueError("d0 must be >= 2")
    kp, kn = ag.graph.degrees()
    k = np.maximum(kp + kn, 1)
    nb = ag.base.n
    keys = list(vertex_keys) if vertex_keys is not None else [f"v{i}" for i in range(nb)]
    keys += [f"m{j}" for j in range(len(ag.master_vertices))]
    hp = np.zeros((ag.n_total, d0))
    hn = np.zeros((ag.n_total, d0))
    hp[:, 0], hp[:, 1] = kp, kp / k
    hn[:, 0], hn[:, 1] = kn, kn / k
    if d0 > 2:
        for i, key in enumerate(keys):
            tail = rng_for(seed, "wsgcn-feature", key).uniform(-0.5, 0.5, (2, d0 - 2))
            hp[i, 2:], hn[i, 2:] = tail
    return DualHidden([hp], [hn])


def mean_operators(g: SignedGraph) -> tuple[np.ndarray, np.ndarray]:
    """Row-normalized positive / negative adjacency (zero rows where the degree is 0)."""
    a = g.signed_adjacency()
    ap = (a > 0).astype(float)
    an = (a < 0).astype(float)
    kp = ap.sum(axis=1, keepdims=True)
    kn = an.sum(axis=1, keepdims=True)
    return np.divide(ap, kp, out=np.zeros_like(ap), where=kp > 0), \
        np.divide(an, kn, out=np.zeros_like(an), where=kn > 0)


def init_weights(d0: int, d: int, layers: int, seed: int) -> dict[str, np.ndarray]:
    rng = rng_for(seed, "wsgcn-weights")
    w = {}
    din = d0
    for t in range(1, layers + 1):
        lim = np.sqrt(6.0 / (3 * din + d))
        w[f"Wp{t}"] = rng.uniform(-lim, lim, (3 * din, d))
        w[f"Wn{t}"] = rng.uniform(-lim, lim, (3 * din, d))
        din = d
    lim = np.sqrt(6.0 / (4 * d))
    w["B"] = rng.uniform(-lim, lim, (2 * d, 2 * d))
    return w


def _act(x, activation):
    return np.tanh(x) if activation == "tanh" else x


def sgcn_forward(ops: tuple[np.ndarray, np.ndarray], dual: DualHidden, weights: dict[str, np.ndarray],
                 layers: int, activation: str = "tanh"):
    """Run ``layers`` signed convolutions from ``dual``'s layer 0.

    Returns the full ``DualHidden`` and the per-layer inputs kept for backprop.
    """
    if layers < 1:
        raise ValueError("need at least one layer")
    ap, an = ops
    hp, hn = dual.pos[0], dual.neg[0]
    out = DualHidden([hp], [hn])
    cache = []
    for t in range(1, layers + 1):
        wp, wn = weights[f"Wp{t}"], weights[f"Wn{t}"]
        if wp.shape[0] != 3 * hp.shape[1] or wn.shape[0] != 3 * hn.shape[1]:
            raise ValueError(f"layer {t}: weight shape {wp.shape} does not fit input width {hp.shape[1]}")
        mp = np.concatenate([ap @ hp, an @ hn, hp], axis=1)
        mn = np.concatenate([ap @ hn, an @ hp, hn], axis=1)
        hp, hn = _act(mp @ wp, activation), _act(mn @ wn, activation)
        cache.append((mp, mn))
        out.pos.append(hp)
        out.neg.append(hn)
    return out, cache


def _forward_backward(ops, dual0, weights, layers, activation, edges, nonedges, margin, reg):
    out, cache = sgcn_forward(ops, dual0, weights, layers, activation)
    z = out.final()
    B = weights["B"]
    grads = {k: np.zeros_like(v) for k, v in weights.items()}
    gz = np.zeros_like(z)
    loss = 0.0
    eu, ev, es = edges
    if len(eu):
        zb = z[ev] @ B.T
        score = np.sum(z[eu] * zb, axis=1)
        loss += float(np.mean(log1pexp(-es * score)))
        gs = -es * sigmoid(-es * score) / len(eu)
        _score_back(z, B, eu, ev, gs, gz, grads)
    nu, nv = nonedges
    if len(nu):
        zb = z[nv] @ B.T
        score = np.sum(z[nu] * zb, axis=1)
        loss += float(np.mean(log1pexp(score - margin) + log1pexp(-score - margin)))
        gs = (sigmoid(score - margin) - sigmoid(-score - margin)) / len(nu)
        _score_back(z, B, nu, nv, gs, gz, grads)
    for k, v in weights.items():
        loss += reg * float(np.sum(v * v))
        grads[k] += 2 * reg * v
    ap, an = ops
    d = out.pos[-1].shape[1]
    gp, gn = gz[:, :d], gz[:, d:]
    for t in range(layers, 0, -1):
        mp, mn = cache[t - 1]
        wp, wn = weights[f"Wp{t}"], weights[f"Wn{t}"]
        if activation == "tanh":
            gp = gp * (1 - out.pos[t] ** 2)
            gn = gn * (1 - out.neg[t] ** 2)
        grads[f"Wp{t}"] += mp.T @ gp
        grads[f"Wn{t}"] += mn.T @ gn
        if t == 1:
            break
        gmp = gp @ wp.T
        gmn = gn @ wn.T
        w = out.pos[t - 1].shape[1]
        gp_prev = ap.T @ gmp[:, :w] + an.T @ gmn[:, w:2 * w] + gmp[:, 2 * w:]
        gn_prev = an.T @ gmp[:, w:2 * w] + ap.T @ gmn[:, :w] + gmn[:, 2 * w:]
        gp, gn = gp_prev, gn_prev
    return loss, grads, out


def _score_back(z, B, u, v, gs, gz, grads):
    grads["B"] += z[u].T @ (gs[:, None] * z[v])
    np.add.at(gz, u, gs[:, None] * (z[v] @ B.T))
    np.add.at(gz, v, gs[:, None] * (z[u] @ B))


def link_sign_loss(ag: AugmentedGraph, dual0: DualHidden, weights, layers, activation="tanh",
                   nonedges=((), ()), margin: float = 1.0, reg: float = 1e-4):
    """Loss and weight gradients for a fixed set of sampled non-edges."""
    g = ag.graph
    ops = mean_operators(g)
    edges = _base_edges(ag.base)
    nonedges = (np.asarray(nonedges[0], dtype=int), np.asarray(nonedges[1], dtype=int))
    loss, grads, _ = _forward_backward(ops, dual0, weights, layers, activation, edges, nonedges, margin, reg)
    return loss, grads


def _base_edges(g: SignedGraph):
    if not g.m:
        return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
    e = np.array([(u, v, int(s)) for u, v, s in g.edges])
    return e[:, 0], e[:, 1], e[:, 2].astype(float)


def _sample_nonedges(g: SignedGraph, count: int, rng: np.random.Generator):
    n = g.n
    total = n * (n - 1) // 2
    if total == g.m or count == 0:
        return np.zeros(0, int), np.zeros(0, int)
    a = np.abs(g.signed_adjacency())
    iu, iv = np.triu_indices(n, 1)
    free = a[iu, iv] == 0
    cu, cv = iu[free], iv[free]
    pick = rng.choice(len(cu), size=min(count, len(cu)), replace=False)
    pick.sort()
    return cu[pick], cv[pick]


@dataclass
class WSGCNModel:
    augmented: AugmentedGraph
    weights: dict[str, np.ndarray]
    hidden: DualHidden
    epoch_loss: list[float]
    layers: int
    activation: str = "tanh"

    def edge_sign_accuracy(self) -> float:
        z = self.hidden.final()
        eu, ev, es = _base_edges(self.augmented.base)
        if not len(eu):
            return float("nan")
        score = np.sum(z[eu] * (z[ev] @ self.weights["B"].T), axis=1)
        return float(np.mean(np.sign(score) == es))


def train_wsgcn(ag: AugmentedGraph, d: int = 32, layers: int = 2, epochs: int = 50, seed: int = 0,
                d0: int = 8, lr: float = 0.01, margin: float = 1.0, reg: float = 1e-4,
                activation: str = "tanh", graph_id: str = "", vertex_keys=None) -> WSGCNModel:
    """Fit the link-sign objective on base edges; master edges only carry messages.

    Initial weights depend on ``seed`` alone so every graph of a collection
    starts from the same parameters; non-edge sampling is drawn per graph.
    """
    g = ag.graph
    ops = mean_operators(g)
    dual0 = init_features(ag, d0, seed, vertex_keys)
    weights = init_weights(d0, d, layers, seed)
    edges = _base_edges(ag.base)
    rng = rng_for(seed, "wsgcn-nonedge", graph_id)
    opt = Adam(weights, lr=lr)
    history = []
    if len(edges[0]) == 0:
        log.warning("graph %s has no edges; representation uses untrained weights", graph_id)
        epochs = 0
    for _ in range(epochs):
        nonedges = _sample_nonedges(ag.base, len(edges[0]), rng)
        loss, grads, _ = _forward_backward(ops, dual0, weights, layers, activation, edges, nonedges, margin, reg)
        history.append(loss)
        opt.step(grads)
    hidden, _ = sgcn_forward(ops, dual0, weights, layers, activation)
    return WSGCNModel(ag, weights, hidden, history, layers, activation)


def graph_representation(model: WSGCNModel, mode: str = "last_layer", fallback_aggregate: str = "sum") -> np.ndarray:
    ag = model.augmented
    if mode == "last_layer":
        layers = [model.layers]
    elif mode == "sum_layers":
        layers = list(range(1, model.layers + 1))
    else:
        raise ValueError(f"unknown readout mode {mode!r}")
    total = 0
    for t in layers:
        z = model.hidden.layer(t)
        if ag.scheme == "none":
            base = z[: ag.base.n]
            if fallback_aggregate == "sum":
                total = total + base.sum(axis=0)
            elif fallback_aggregate == "average":
                total = total + base.mean(axis=0)
            else:
                raise ValueError(f"unknown aggregation {fallback_aggregate!r}")
        else:
            total = total + z[ag.master_vertices].sum(axis=0)
    return np.asarray(total, dtype=float)
