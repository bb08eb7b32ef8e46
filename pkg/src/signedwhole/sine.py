"""SiNE vertex embedding aggregated into a whole-graph vector (baseline).

Each mixed open triad (center, positive neighbor, negative neighbor) asks the
network to score the positive pair above the negative one by a margin. A
center with only positive neighbors gets one dummy negative neighbor shared
by the whole graph; all-negative centers are skipped.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .graph import SignedGraph
from .utils import Adam, rng_for

log = logging.getLogger(__name__)

DUMMY = -1


@dataclass(frozen=True)
class Triad:
    center: int
    positive_neighbor: int
    negative_neighbor: int  # DUMMY for augmented triads


def extract_triads(g: SignedGraph) -> list[Triad]:
    out = []
    for c in range(g.n):
        pos = g.neighborhood(c, "positive")
        neg = g.neighborhood(c, "negative")
        if neg:
            out.extend(Triad(c, j, k) for k in neg for j in pos)
        else:
            out.extend(Triad(c, j, DUMMY) for j in pos)
    return out


@dataclass
class SineModel:
    vertex_vectors: np.ndarray          # (n, d); the dummy row is kept in params
    params: dict[str, np.ndarray]
    margin: float
    layers: int
    epoch_loss: list[float] = field(default_factory=list)
    degenerate: bool = False


def init_params(d: int, layers: int, seed: int, n: int, hidden: int | None = None) -> dict[str, np.ndarray]:
    """Weights from one seed stream; vertex ``i``'s vector depends only on ``(seed, i)``."""
    h = hidden or d
    rng = rng_for(seed, "sine-weights")

    def glorot(a, b):
        lim = np.sqrt(6.0 / (a + b))
        return rng.uniform(-lim, lim, (a, b))

    p = {"W1c": glorot(d, h), "W1o": glorot(d, h), "b1": np.zeros(h)}
    for tower in "pn":
        for l in range(2, layers + 1):
            p[f"W{l}{tower}"] = glorot(h, h)
            p[f"b{l}{tower}"] = np.zeros(h)
        p[f"w{tower}"] = glorot(h, 1)[:, 0]
        p[f"c{tower}"] = np.zeros(1)
    x = np.empty((n + 1, d))
    for i in range(n):
        x[i] = rng_for(seed, "sine-vertex", str(i)).uniform(-0.5, 0.5, d)
    x[n] = rng_for(seed, "sine-dummy").uniform(-0.5, 0.5, d)
    p["X"] = x
    return p


def _tower(p, tower, layers, xc, xo):
    a1 = xc @ p["W1c"] + xo @ p["W1o"] + p["b1"]
    zs = [np.tanh(a1)]
    for l in range(2, layers + 1):
        zs.append(np.tanh(zs[-1] @ p[f"W{l}{tower}"] + p[f"b{l}{tower}"]))
    s = np.tanh(zs[-1] @ p[f"w{tower}"] + p[f"c{tower}"][0])
    return s, zs


def _tower_back(p, tower, layers, xc, xo, s, zs, gs, grads):
    ga = gs * (1 - s ** 2)                                # (B,)
    grads[f"w{tower}"] += zs[-1].T @ ga
    grads[f"c{tower}"] += ga.sum()
    gz = np.outer(ga, p[f"w{tower}"])
    for l in range(layers, 1, -1):
        gpre = gz * (1 - zs[l - 1] ** 2)
        grads[f"W{l}{tower}"] += zs[l - 2].T @ gpre
        grads[f"b{l}{tower}"] += gpre.sum(axis=0)
        gz = gpre @ p[f"W{l}{tower}"].T
    gpre = gz * (1 - zs[0] ** 2)
    grads["W1c"] += xc.T @ gpre
    grads["W1o"] += xo.T @ gpre
    grads["b1"] += gpre.sum(axis=0)
    return gpre @ p["W1c"].T, gpre @ p["W1o"].T


def sine_loss(p: dict[str, np.ndarray], centers, pos, neg, layers: int, margin: float, reg: float):
    """Mean hinge ranking loss over triads plus L2 regularization, with gradients."""
    X = p["X"]
    xc, xp, xn = X[centers], X[pos], X[neg]
    sp, zp = _tower(p, "p", layers, xc, xp)
    sn, zn = _tower(p, "n", layers, xc, xn)
    viol = sn + margin - sp
    active = (viol > 0).astype(float)
    b = len(centers)
    loss = float(np.sum(viol * active) / b)
    grads = {k: np.zeros_like(v) for k, v in p.items()}
    gc1, go1 = _tower_back(p, "p", layers, xc, xp, sp, zp, -active / b, grads)
    gc2, go2 = _tower_back(p, "n", layers, xc, xn, sn, zn, active / b, grads)
    np.add.at(grads["X"], centers, gc1 + gc2)
    np.add.at(grads["X"], pos, go1)
    np.add.at(grads["X"], neg, go2)
    for k, v in p.items():
        if k.startswith(("W", "w", "X")):
            loss += reg * float(np.sum(v * v))
            grads[k] += 2 * reg * v
    return loss, grads, sp, sn


def train_sine(g: SignedGraph, triads: list[Triad] | None = None, d: int = 32, layers: int = 2,
               epochs: int = 50, margin: float = 1.0, reg: float = 1e-4, lr: float = 0.01,
               seed: int = 0, triads_per_vertex: int | None = None, graph_id: str = "") -> SineModel:
    if triads is None:
        triads = extract_triads(g)
    if not triads:
        log.warning("graph %s has no usable triads; returning zero vertex vectors", graph_id or g)
        return SineModel(np.zeros((g.n, d)), {}, margin, layers, degenerate=True)
    p = init_params(d, layers, seed, g.n)
    c = np.array([t.center for t in triads])
    a = np.array([t.positive_neighbor for t in triads])
    b = np.array([g.n if t.negative_neighbor == DUMMY else t.negative_neighbor for t in triads])
    opt = Adam(p, lr=lr)
    rng = rng_for(seed, "sine-sample", graph_id)
    history = []
    for _ in range(epochs):
        idx = _sample(c, triads_per_vertex, rng) if triads_per_vertex else slice(None)
        loss, grads, _, _ = sine_loss(p, c[idx], a[idx], b[idx], layers, margin, reg)
        history.append(loss)
        opt.step(grads)
    return SineModel(p["X"][: g.n].copy(), p, margin, layers, history)


def _sample(centers: np.ndarray, cap: int, rng: np.random.Generator) -> np.ndarray:
    keep = []
    for v in np.unique(centers):
        idx = np.flatnonzero(centers == v)
        keep.append(idx if len(idx) <= cap else np.sort(rng.choice(idx, cap, replace=False)))
    return np.concatenate(keep)


def similarity(model: SineModel, center: int, other: int, tower: str = "p") -> float:
    p = model.params
    x = p["X"]
    s, _ = _tower(p, tower, model.layers, x[[center]], x[[other]])
    return float(s[0])


def aggregate_vertices(model: SineModel, mode: str = "sum") -> np.ndarray:
    if mode == "sum":
        return model.vertex_vectors.sum(axis=0)
    if mode == "average":
        if len(model.vertex_vectors) == 0:
            return np.zeros(model.vertex_vectors.shape[1])
        return model.vertex_vectors.mean(axis=0)
    raise ValueError(f"unknown aggregation {mode!r}")
