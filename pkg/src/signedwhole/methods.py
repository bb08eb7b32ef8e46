"""Method registry: one entry point that embeds a collection with any of the three families."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import sg2v, sine, wsgcn
from .balance import min_frustration
from .embedding import EmbeddingMatrix
from .graph import GraphCollection, SignedGraph

log = logging.getLogger(__name__)

SG2V_METHODS = {"g2v": "unsigned", "sg2vn": "sg2vn", "sg2vsb": "sg2vsb"}
SINE_METHODS = {"sine-sum": "sum", "sine-avg": "average"}
WSGCN_METHODS = {"sgcn": "none", "wsgcn+": "plus", "wsgcn-": "minus", "wsgcn±": "plusminus",
                 "wsgcn-sb": "sb", "wsgcn-gb": "gb"}
ALIASES = {"wsgcn+-": "wsgcn±", "wsgcn-pm": "wsgcn±", "wsgcnpm": "wsgcn±", "sine-average": "sine-avg"}
METHODS = tuple(SINE_METHODS) + tuple(SG2V_METHODS) + tuple(WSGCN_METHODS)

DEFAULTS = {
    "sg2v": {"d": 128, "epochs": 50, "min_count": 5},
    "sine": {"d": 32, "epochs": 20},
    "wsgcn": {"d": 32, "epochs": 10},
}


def canonical_method(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in METHODS:
        raise KeyError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return name


def family(method: str) -> str:
    method = canonical_method(method)
    if method in SG2V_METHODS:
        return "sg2v"
    if method in SINE_METHODS:
        return "sine"
    return "wsgcn"


@dataclass
class EmbedResult:
    embedding: EmbeddingMatrix
    seconds: float
    graph_meta: list[dict] = field(default_factory=list)

    @property
    def seconds_per_graph(self) -> float:
        return self.seconds / max(len(self.embedding), 1)


_PARTITIONS: dict = {}
_SINE_VECTORS: dict = {}


def cached_partition(g: SignedGraph, mode: str, seed: int = 0):
    key = (g.n, g.edges, mode, seed)
    if key not in _PARTITIONS:
        _PARTITIONS[key] = min_frustration(g, mode, restarts=20, seed=seed)
    return _PARTITIONS[key]


def _sine_one(args):
    g, gid, d, epochs, seed, hyper = args
    key = (g.n, g.edges, d, epochs, seed, tuple(sorted(hyper.items())))
    if key not in _SINE_VECTORS:
        model = sine.train_sine(g, d=d, epochs=epochs, seed=seed, graph_id=gid, **hyper)
        _SINE_VECTORS[key] = (model.vertex_vectors, model.degenerate)
    return _SINE_VECTORS[key]


def _wsgcn_one(args):
    g, gid, scheme, depth, d, epochs, seed, hyper = args
    solver, solved = None, None
    if scheme in ("sb", "gb"):
        solved = cached_partition(g, "bisection" if scheme == "sb" else "free_k", seed)
        solver = solved.partition
    readout = hyper.pop("readout", "last_layer")
    ag = wsgcn.attach_master_nodes(g, scheme, solver)
    model = wsgcn.train_wsgcn(ag, d=d, layers=depth, epochs=epochs, seed=seed, graph_id=gid, **hyper)
    vec = wsgcn.graph_representation(model, readout)
    meta = ag.metadata()
    meta["graph_id"] = gid
    meta["partition_solver"] = solved.method if solved else ""
    return vec, meta


def _map(fn, jobs, threads):
    if threads <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * threads))))


def embed(collection: GraphCollection, method: str, depth: int = 3, d: int | None = None,
          epochs: int | None = None, seed: int = 0, threads: int = 1, **hyper) -> EmbedResult:
    """Embed every graph of ``collection``; rows follow the collection order."""
    method = canonical_method(method)
    fam = family(method)
    d = d or DEFAULTS[fam]["d"]
    epochs = epochs or DEFAULTS[fam]["epochs"]
    if fam != "sine" and not (1 <= depth):
        raise ValueError("depth must be >= 1")
    t0 = time.perf_counter()
    meta: list[dict] = []
    if fam == "sg2v":
        hyper.setdefault("min_count", DEFAULTS["sg2v"]["min_count"])
        emb = sg2v.embed_collection(collection, SG2V_METHODS[method], depth, d=d, epochs=epochs, seed=seed, **hyper)
    elif fam == "sine":
        jobs = [(g, gid, d, epochs, seed, hyper) for g, gid in zip(collection.graphs, collection.ids)]
        outs = _map(_sine_one, jobs, threads)
        mode = SINE_METHODS[method]
        vecs = np.array([v.sum(axis=0) if mode == "sum" else
                         (v.mean(axis=0) if len(v) else np.zeros(d)) for v, _ in outs])
        meta = [{"graph_id": gid, "degenerate": int(deg)} for gid, (_, deg) in zip(collection.ids, outs)]
        emb = EmbeddingMatrix(list(collection.ids), vecs, seed, {"method": method})
    else:
        scheme = WSGCN_METHODS[method]
        jobs = [(g, gid, scheme, depth, d, epochs, seed, dict(hyper))
                for g, gid in zip(collection.graphs, collection.ids)]
        outs = _map(_wsgcn_one, jobs, threads)
        vecs = np.array([v for v, _ in outs])
        meta = [m for _, m in outs]
        emb = EmbeddingMatrix(list(collection.ids), vecs, seed, {"method": method, "depth": depth})
    elapsed = time.perf_counter() - t0
    emb.meta.update({"method": method, "depth": depth if fam != "sine" else "", "seconds": elapsed})
    return EmbedResult(emb, elapsed, meta)
