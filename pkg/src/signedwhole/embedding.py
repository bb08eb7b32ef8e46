"""Whole-graph embedding matrix and its text file format.

File layout::

    # key=value provenance lines (optional)
    <n_graphs> <d> <seed>
    <graph-id> <v1> ... <vd>
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np


@dataclass
class EmbeddingMatrix:
    ids: list[str]
    vectors: np.ndarray
    seed: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        if self.vectors.ndim != 2 or len(self.ids) != self.vectors.shape[0]:
            raise ValueError("need one row per graph id")

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.ids)


def write_embeddings(path: str | os.PathLike, emb: EmbeddingMatrix, provenance: dict | None = None) -> None:
    with open(path, "w") as fh:
        for k, v in (provenance or {}).items():
            fh.write(f"# {k}={v}\n")
        fh.write(f"{len(emb)} {emb.d} {emb.seed}\n")
        for gid, row in zip(emb.ids, emb.vectors):
            fh.write(gid + " " + " ".join(repr(float(x)) for x in row) + "\n")


def read_embeddings(path: str | os.PathLike) -> EmbeddingMatrix:
    prov: dict[str, str] = {}
    header = None
    ids, rows = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                prov[k] = v
                continue
            parts = line.split()
            if header is None:
                header = tuple(int(x) for x in parts)
                continue
            ids.append(parts[0])
            rows.append([float(x) for x in parts[1:]])
    if header is None:
        raise ValueError(f"{path}: missing header line")
    n, d, seed = header
    vecs = np.array(rows, dtype=float).reshape(len(rows), d)
    if len(ids) != n:
        raise ValueError(f"{path}: header declares {n} graphs, found {len(ids)}")
    return EmbeddingMatrix(ids, vecs, seed, prov)
