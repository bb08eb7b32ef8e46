"""Graph2vec-style whole-graph embedding (graph = document, WL labels = words).

Training is PV-DBOW with negative sampling: each document vector is pushed to
score its own tokens above tokens drawn from the unigram^0.75 distribution.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .embedding import EmbeddingMatrix
from .graph import GraphCollection
from .utils import derive_seed, log1pexp, rng_for, sigmoid
from .wl import VARIANTS, LabelDictionary, relabel

log = logging.getLogger(__name__)


@dataclass
class Corpus:
    vocabulary: dict[str, int]
    documents: list[np.ndarray]
    variant: str
    iterations: int
    doc_ids: list[str] = field(default_factory=list)

    @property
    def tokens(self) -> list[str]:
        inv = [""] * len(self.vocabulary)
        for tok, i in self.vocabulary.items():
            inv[i] = tok
        return inv


def build_corpus(collection: GraphCollection, variant: str, iterations: int,
                 include_initial: bool = True, min_count: int = 1) -> Corpus:
    """Tokens ``"{t}_{label}"`` per vertex and iteration; tokens seen fewer than
    ``min_count`` times in the whole corpus are dropped."""
    if len(collection) == 0:
        raise ValueError("empty collection")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    dictionary = LabelDictionary()
    raw_docs = []
    for g in collection.graphs:
        trace = relabel(g, variant, iterations, dictionary)
        start = 0 if include_initial else 1
        raw_docs.append([f"{t}_{lab}" for t in range(start, iterations + 1) for lab in trace.labels[t]])
    counts = Counter(t for doc in raw_docs for t in doc)
    vocab = {tok: i for i, tok in enumerate(sorted(t for t, c in counts.items() if c >= min_count))}
    docs = [np.array([vocab[t] for t in doc if t in vocab], dtype=np.int64) for doc in raw_docs]
    return Corpus(vocab, docs, variant, iterations, list(collection.ids))


def pvdbow_loss(doc_vecs: np.ndarray, out_vecs: np.ndarray, doc: int, targets: np.ndarray,
                negatives: np.ndarray):
    """Negative-sampling loss of one document and its gradients.

    ``targets`` has shape (L,), ``negatives`` (L, K). Returns
    ``(loss, grad_doc_vector, out_rows, grad_out_rows)`` where the output-row
    gradients are listed per (possibly repeated) row index.
    """
    dv = doc_vecs[doc]
    rows = np.concatenate([targets[:, None], negatives], axis=1)
    labels = np.zeros(rows.shape)
    labels[:, 0] = 1.0
    w = out_vecs[rows]                                  # (L, K+1, d)
    x = w @ dv                                          # (L, K+1)
    loss = float(np.sum(log1pexp(-x[:, 0])) + np.sum(log1pexp(x[:, 1:])))
    gx = sigmoid(x) - labels
    g_doc = np.einsum("lk,lkd->d", gx, w)
    g_rows = gx[..., None] * dv
    return loss, g_doc, rows.ravel(), g_rows.reshape(-1, dv.shape[0])


def _unigram_table(corpus: Corpus, power: float = 0.75) -> np.ndarray:
    counts = np.zeros(len(corpus.vocabulary))
    for doc in corpus.documents:
        np.add.at(counts, doc, 1)
    p = counts ** power
    return np.cumsum(p / p.sum())


@dataclass
class PVDBOWResult:
    doc_vectors: np.ndarray
    out_vectors: np.ndarray
    epoch_loss: list[float]


def train_pvdbow(corpus: Corpus, d: int = 128, epochs: int = 50, negatives: int = 5,
                 alpha: float = 0.025, min_alpha: float = 0.0001, seed: int = 0) -> PVDBOWResult:
    """Train document vectors; documents are visited in fixed (corpus) order."""
    if d < 1 or epochs < 1:
        raise ValueError("d and epochs must be >= 1")
    vsize = len(corpus.vocabulary)
    if vsize < negatives + 1:
        raise ValueError(f"vocabulary of {vsize} tokens is too small for {negatives} negatives")
    ids = corpus.doc_ids or [str(i) for i in range(len(corpus.documents))]
    doc_vecs = np.empty((len(corpus.documents), d))
    for i, gid in enumerate(ids):
        doc_vecs[i] = rng_for(seed, "pvdbow-init", gid).uniform(-0.5 / d, 0.5 / d, d)
    out_vecs = np.zeros((vsize, d))
    cdf = _unigram_table(corpus)
    streams = [rng_for(seed, "pvdbow-neg", gid) for gid in ids]
    total = epochs * len(corpus.documents)
    step = 0
    history = []
    for _ in range(epochs):
        ep_loss, ep_pairs = 0.0, 0
        for i, doc in enumerate(corpus.documents):
            lr = alpha - (alpha - min_alpha) * step / total
            step += 1
            if len(doc) == 0:
                continue
            neg = np.searchsorted(cdf, streams[i].random((len(doc), negatives)), side="right")
            np.minimum(neg, vsize - 1, out=neg)
            loss, g_doc, rows, g_rows = pvdbow_loss(doc_vecs, out_vecs, i, doc, neg)
            np.add.at(out_vecs, rows, -lr * g_rows)
            doc_vecs[i] -= lr * g_doc
            ep_loss += loss
            ep_pairs += len(doc)
        history.append(ep_loss / max(ep_pairs, 1))
    return PVDBOWResult(doc_vecs, out_vecs, history)


def embed_collection(collection: GraphCollection, variant: str, iterations: int, d: int = 128,
                     epochs: int = 50, negatives: int = 5, alpha: float = 0.025,
                     min_alpha: float = 0.0001, seed: int = 0, include_initial: bool = True,
                     min_count: int = 1) -> EmbeddingMatrix:
    # graphs are processed in id order so the result does not depend on collection order
    order = sorted(range(len(collection)), key=lambda i: collection.ids[i])
    sub = collection.subset(order)
    corpus = build_corpus(sub, variant, iterations, include_initial, min_count)
    if min_count > 1 and len(corpus.vocabulary) < negatives + 1:
        log.warning("min_count=%d leaves %d tokens; keeping every token", min_count, len(corpus.vocabulary))
        corpus = build_corpus(sub, variant, iterations, include_initial, 1)
    res = train_pvdbow(corpus, d, epochs, negatives, alpha, min_alpha, derive_seed(seed, "sg2v"))
    vecs = np.empty_like(res.doc_vectors)
    vecs[order] = res.doc_vectors
    log.info("%s T=%d: vocabulary %d, final loss %.4f", variant, iterations, len(corpus.vocabulary),
             res.epoch_loss[-1])
    return EmbeddingMatrix(list(collection.ids), vecs, seed,
                           {"method": variant, "depth": iterations, "vocabulary": len(corpus.vocabulary)})
