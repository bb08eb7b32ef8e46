"""Collection persistence, planted-partition generator and dataset statistics.

On-disk layout::

    manifest.csv          graph_id,path,label
    graphs/<id>.edges     "# n=<order>" then one "u v s" line per edge, s in {+1,-1}
"""
from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .balance import exact_min_frustration, local_search_min_frustration, min_frustration
from .evaluation import class_imbalance_index
from .graph import GraphCollection, GraphError, SignedGraph, Sign, diameter, graph_stats
from .utils import rng_for

log = logging.getLogger(__name__)

MANIFEST = "manifest.csv"


class LoadError(ValueError):
    pass


class ConfigError(ValueError):
    pass


# -- edge files ----------------------------------------------------------------

def _sign_token(tok: str) -> Sign:
    if tok in ("+1", "1", "+"):
        return Sign.POSITIVE
    if tok in ("-1", "-", "−1"):
        return Sign.NEGATIVE
    raise ValueError(f"unknown sign token {tok!r}")


def read_edge_file(path: str | os.PathLike) -> tuple[SignedGraph, list[str]]:
    """Parse one edge file; returns the graph and its vertex-name table."""
    declared = None
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                body = text[1:].strip().replace(" ", "")
                if body.startswith("n="):
                    declared = int(body[2:])
                continue
            parts = text.split()
            if len(parts) != 3:
                raise LoadError(f"{path}:{lineno}: expected 'u v s', got {text!r}")
            try:
                s = _sign_token(parts[2])
            except ValueError as exc:
                raise LoadError(f"{path}:{lineno}: {exc}") from None
            rows.append((parts[0], parts[1], s, lineno))
    names = {x for r in rows for x in r[:2]}
    all_int = all(x.lstrip("-").isdigit() for x in names)
    if declared is not None and all_int:
        order = [str(i) for i in range(declared)]
        extra = names - set(order)
        if extra:
            raise LoadError(f"{path}: vertex ids {sorted(extra)[:5]} outside declared n={declared}")
    else:
        order = sorted(names, key=(lambda x: int(x)) if all_int else None)
    index = {name: i for i, name in enumerate(order)}
    seen: dict[tuple[int, int], int] = {}
    edges = []
    for a, b, s, lineno in rows:
        u, v = index[a], index[b]
        if u == v:
            raise LoadError(f"{path}:{lineno}: self-loop on vertex {a}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise LoadError(f"{path}:{lineno}: duplicate edge ({a},{b}) (first at line {seen[key]})")
        seen[key] = lineno
        edges.append((u, v, s))
    try:
        return SignedGraph(len(order), edges), order
    except GraphError as exc:
        raise LoadError(f"{path}: {exc}") from None


def write_edge_file(path: str | os.PathLike, g: SignedGraph) -> None:
    with open(path, "w") as fh:
        fh.write(f"# n={g.n}\n")
        for u, v, s in g.edges:
            fh.write(f"{u} {v} {'+1' if s is Sign.POSITIVE else '-1'}\n")


# -- collections -------------------------------------------------------------

def load_collection(manifest: str | os.PathLike) -> GraphCollection:
    manifest = Path(manifest)
    if manifest.is_dir():
        manifest = manifest / MANIFEST
    root = manifest.parent
    ids, paths, raw_labels = [], [], []
    with open(manifest, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["graph_id", "path", "label"]:
            raise LoadError(f"{manifest}: header must be 'graph_id,path,label'")
        for lineno, row in enumerate(reader, 2):
            gid, rel, lab = (row["graph_id"] or "").strip(), (row["path"] or "").strip(), (row["label"] or "").strip()
            if not gid or not rel or not lab:
                raise LoadError(f"{manifest}:{lineno}: incomplete entry (dangling label or missing path)")
            p = root / rel
            if not p.exists():
                raise LoadError(f"{manifest}:{lineno}: graph file {rel} does not exist")
            ids.append(gid)
            paths.append(p)
            raw_labels.append(lab)
    if len(set(ids)) != len(ids):
        raise LoadError(f"{manifest}: duplicate graph ids")
    class_names = sorted(set(raw_labels))
    lookup = {c: i for i, c in enumerate(class_names)}
    graphs = [read_edge_file(p)[0] for p in paths]
    return GraphCollection(graphs, [lookup[x] for x in raw_labels], ids, class_names, name=manifest.parent.name)


def save_collection(collection: GraphCollection, directory: str | os.PathLike) -> Path:
    """Canonical, byte-stable serialization (edges sorted by (u, v))."""
    directory = Path(directory)
    (directory / "graphs").mkdir(parents=True, exist_ok=True)
    with open(directory / MANIFEST, "w", newline="") as fh:
        fh.write("graph_id,path,label\n")
        for gid, g, lab in zip(collection.ids, collection.graphs, collection.labels):
            rel = f"graphs/{gid}.edges"
            write_edge_file(directory / rel, g)
            fh.write(f"{gid},{rel},{collection.class_names[lab]}\n")
    return directory / MANIFEST


# -- generator -----------------------------------------------------------------

@dataclass
class GeneratorConfig:
    n_graphs: int = 1000
    n_min: int = 16
    n_max: int = 40
    k_min: int = 2
    k_max: int = 3
    rho_min: float = 0.4
    rho_max: float = 1.0
    noise_levels: tuple[float, ...] = (0.05, 0.15)
    class_rule: str = "cluster_count"
    seed: int = 0

    def validate(self) -> None:
        if self.n_graphs < 1:
            raise ConfigError("n_graphs must be >= 1")
        if not (1 <= self.n_min <= self.n_max):
            raise ConfigError("need 1 <= n_min <= n_max")
        if not (1 <= self.k_min <= self.k_max):
            raise ConfigError("need 1 <= k_min <= k_max")
        if self.k_max > self.n_min:
            raise ConfigError("k_max cannot exceed n_min")
        if not (0 < self.rho_min <= self.rho_max <= 1):
            raise ConfigError("density range must lie in (0, 1]")
        if not self.noise_levels or any(not (0 <= q <= 0.5) for q in self.noise_levels):
            raise ConfigError("sign noise must lie in [0, 0.5]")
        if self.class_rule not in ("cluster_count", "noise_band"):
            raise ConfigError(f"unknown class rule {self.class_rule!r}")


@dataclass
class PlantedInfo:
    k: int
    rho: float
    q: float
    flips: int
    assignment: tuple[int, ...]


def generate_planted(config: GeneratorConfig) -> GraphCollection:
    """Planted-partition signed graphs; ``collection.partitions`` holds the ground truth."""
    config.validate()
    levels = sorted(set(config.noise_levels))
    graphs, labels, infos = [], [], []
    for i in range(config.n_graphs):
        rng = rng_for(config.seed, "planted", str(i))
        n = int(rng.integers(config.n_min, config.n_max + 1))
        k = int(rng.integers(config.k_min, config.k_max + 1))
        rho = float(rng.uniform(config.rho_min, config.rho_max))
        q = float(config.noise_levels[int(rng.integers(len(config.noise_levels)))])
        cluster = rng.permutation(np.arange(n) % k)
        iu, iv = np.triu_indices(n, 1)
        keep = rng.random(len(iu)) < rho
        iu, iv = iu[keep], iv[keep]
        sign = np.where(cluster[iu] == cluster[iv], 1, -1)
        flip = rng.random(len(iu)) < q
        sign[flip] *= -1
        graphs.append(SignedGraph(n, zip(iu.tolist(), iv.tolist(), sign.tolist())))
        infos.append(PlantedInfo(k, rho, q, int(flip.sum()), tuple(int(c) for c in cluster)))
        labels.append(k - config.k_min if config.class_rule == "cluster_count" else levels.index(q))
    if config.class_rule == "cluster_count":
        names = [f"k={k}" for k in range(config.k_min, config.k_max + 1)]
    else:
        names = [f"q={q:g}" for q in levels]
    ids = [f"g{i:05d}" for i in range(config.n_graphs)]
    return GraphCollection(graphs, labels, ids, names, infos, name="planted")


def write_planted_info(collection: GraphCollection, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write("graph_id,k,rho,q,flips\n")
        for gid, info in zip(collection.ids, collection.partitions or []):
            fh.write(f"{gid},{info.k},{info.rho:.6f},{info.q:g},{info.flips}\n")


# -- statistics ----------------------------------------------------------------

STAT_COLUMNS = ("order", "density", "negative_edges", "positive_edges", "positive_proportion",
                "diameter", "sb_frustration", "gb_frustration")


@dataclass
class CollectionStats:
    n_graphs: int
    n_classes: int
    imbalance_index: float
    columns: dict[str, dict[str, float]]
    per_graph: list[dict]

    def rows(self) -> list[dict]:
        out = [{"statistic": "graphs", "mean": self.n_graphs, "std": 0.0, "min": self.n_graphs, "max": self.n_graphs},
               {"statistic": "classes", "mean": self.n_classes, "std": 0.0, "min": self.n_classes,
                "max": self.n_classes},
               {"statistic": "gini_impurity", "mean": self.imbalance_index, "std": 0.0,
                "min": self.imbalance_index, "max": self.imbalance_index}]
        out += [{"statistic": name, **vals} for name, vals in self.columns.items()]
        return out

    def write_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, ["statistic", "mean", "std", "min", "max"])
            w.writeheader()
            for r in self.rows():
                w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in r.items()})


def _summary(values) -> dict[str, float]:
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return {"mean": math.nan, "std": math.nan, "min": math.nan, "max": math.nan}
    return {"mean": float(a.mean()), "std": float(a.std()), "min": float(a.min()), "max": float(a.max())}


def collection_stats(collection: GraphCollection, restarts: int = 20, seed: int = 0,
                     solver: str = "auto") -> CollectionStats:
    """Per-collection aggregates; frustration is a ratio over edges.

    ``solver`` is ``auto`` (exact within the caps, local search beyond),
    ``exact`` (raises ``CapacityError`` past the caps) or ``local``.
    """
    solve = {"auto": lambda g, m: min_frustration(g, m, restarts=restarts, seed=seed),
             "exact": exact_min_frustration,
             "local": lambda g, m: local_search_min_frustration(g, m, restarts=restarts, seed=seed)}
    if solver not in solve:
        raise ValueError(f"unknown solver {solver!r}")
    per_graph = []
    for gid, g in zip(collection.ids, collection.graphs):
        st = graph_stats(g)
        sb = solve[solver](g, "bisection")
        gb = solve[solver](g, "free_k")
        row = {"graph_id": gid, "order": st.order, "density": st.density,
               "negative_edges": st.negative_edge_count, "positive_edges": st.positive_edge_count,
               "diameter": diameter(g),
               "sb_frustration": sb.frustration_ratio, "gb_frustration": gb.frustration_ratio,
               "sb_solver": sb.method, "gb_solver": gb.method}
        if st.size:
            row["positive_proportion"] = st.positive_edge_proportion
        per_graph.append(row)
    cols = {c: _summary([r[c] for r in per_graph if c in r]) for c in STAT_COLUMNS}
    imb = class_imbalance_index(collection.labels) if len(collection) else 0.0
    return CollectionStats(len(collection), len(set(collection.labels)), imb, cols, per_graph)


def planted_info_dicts(collection: GraphCollection) -> list[dict]:
    return [asdict(p) for p in collection.partitions or []]
