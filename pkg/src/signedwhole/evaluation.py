"""Classification harness: stratified k-fold CV with a one-vs-rest linear SVM."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

log = logging.getLogger(__name__)

DEFAULT_CS = (0.1, 1.0, 10.0)


def stratified_kfold(labels: Sequence[int], k: int = 10, seed: int = 0) -> np.ndarray:
    """Fold id per item; per-class counts across folds differ by at most one.

    Classes are dealt round-robin, continuing where the previous class
    stopped, so overall fold sizes stay balanced too.
    """
    if k < 2:
        raise ValueError("need at least 2 folds")
    y = np.asarray(labels)
    classes, counts = np.unique(y, return_counts=True)
    if counts.min() < k:
        k_new = int(counts.min())
        if k_new < 2:
            raise ValueError("a class has fewer than 2 members; cannot cross-validate")
        warnings.warn(f"smallest class has {k_new} members; using {k_new} folds instead of {k}")
        k = k_new
    rng = np.random.default_rng(seed)
    folds = np.empty(len(y), dtype=int)
    offset = 0
    for c in classes:
        idx = rng.permutation(np.flatnonzero(y == c))
        folds[idx] = (np.arange(len(idx)) + offset) % k
        offset = (offset + len(idx)) % k
    return folds


@numba.njit(cache=True)
def _dual_cd(X, y, C, max_iter, tol, seed):
    n, p = X.shape
    w = np.zeros(p)
    alpha = np.zeros(n)
    qii = np.empty(n)
    for i in range(n):
        qii[i] = X[i] @ X[i]
    np.random.seed(seed)
    order = np.arange(n)
    for _ in range(max_iter):
        np.random.shuffle(order)
        pg_max, pg_min = -np.inf, np.inf
        for j in order:
            if qii[j] == 0.0:
                continue
            g = y[j] * (w @ X[j]) - 1.0
            pg = g
            if alpha[j] == 0.0:
                pg = min(g, 0.0)
            elif alpha[j] == C:
                pg = max(g, 0.0)
            pg_max = max(pg_max, pg)
            pg_min = min(pg_min, pg)
            if pg != 0.0:
                old = alpha[j]
                alpha[j] = min(max(old - g / qii[j], 0.0), C)
                w += (alpha[j] - old) * y[j] * X[j]
        if pg_max - pg_min < tol:
            break
    return w


class LinearSVM:
    """One-vs-rest L1-loss linear SVM trained by dual coordinate descent.

    Features are standardized with the training mean and standard deviation;
    the intercept is learned as the weight of a constant feature.
    """

    def __init__(self, C: float = 1.0, max_iter: int = 1000, tol: float = 1e-3, seed: int = 0):
        self.C, self.max_iter, self.tol, self.seed = C, max_iter, tol, seed

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        if len(self.classes_) < 2:
            raise ValueError("training data must contain at least two classes")
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 1e-12, std, 1.0)
        Z = self._design(X)
        self.coef_ = np.empty((len(self.classes_), Z.shape[1]))
        for i, c in enumerate(self.classes_):
            yy = np.where(y == c, 1.0, -1.0)
            self.coef_[i] = _dual_cd(Z, yy, float(self.C), self.max_iter, self.tol, self.seed + i)
        return self

    def _design(self, X):
        Z = (np.asarray(X, dtype=float) - self.mean_) / self.scale_
        return np.ascontiguousarray(np.hstack([Z, np.ones((len(Z), 1))]))

    def decision_function(self, X):
        return self._design(X) @ self.coef_.T

    def predict(self, X):
        # argmax picks the lowest class id on ties
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]


def train_linear_classifier(X, y, C: float = 1.0, seed: int = 0) -> LinearSVM:
    return LinearSVM(C=C, seed=seed).fit(X, y)


@dataclass
class ScoreReport:
    macro_f: float
    macro_precision: float
    macro_recall: float
    accuracy: float = 0.0
    majority_rate: float = 0.0
    per_fold: list[dict] = field(default_factory=list)
    per_class: dict = field(default_factory=dict)
    chosen_C: list[float] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        """True when accuracy does not exceed always predicting the majority class."""
        return self.accuracy <= self.majority_rate + 1e-9


def macro_scores(predictions, truth, classes: Sequence | None = None) -> ScoreReport:
    pred = np.asarray(predictions)
    true = np.asarray(truth)
    if pred.shape != true.shape:
        raise ValueError("predictions and truth differ in length")
    if classes is None:
        classes = np.unique(true)
    per_class = {}
    for c in classes:
        tp = float(np.sum((pred == c) & (true == c)))
        fp = float(np.sum((pred == c) & (true != c)))
        fn = float(np.sum((pred != c) & (true == c)))
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        per_class[c.item() if hasattr(c, "item") else c] = {"precision": 100 * p, "recall": 100 * r, "f": 100 * f}
    vals = list(per_class.values())
    _, counts = np.unique(true, return_counts=True)
    return ScoreReport(
        macro_f=float(np.mean([v["f"] for v in vals])),
        macro_precision=float(np.mean([v["precision"] for v in vals])),
        macro_recall=float(np.mean([v["recall"] for v in vals])),
        accuracy=100.0 * float(np.mean(pred == true)) if len(true) else 0.0,
        majority_rate=100.0 * counts.max() / len(true) if len(true) else 0.0,
        per_class=per_class,
    )


def _select_C(X, y, Cs, seed, inner_folds=3):
    if len(Cs) == 1:
        return Cs[0]
    if np.unique(y, return_counts=True)[1].min() < 2:
        # too few items for an inner split
        return 1.0 if 1.0 in Cs else Cs[0]
    folds = stratified_kfold(y, inner_folds, seed)
    best, best_c = -1.0, Cs[0]
    for C in Cs:
        pred = np.empty_like(y)
        for f in np.unique(folds):
            tr, te = folds != f, folds == f
            pred[te] = LinearSVM(C=C, seed=seed).fit(X[tr], y[tr]).predict(X[te])
        score = macro_scores(pred, y).macro_f
        if score > best + 1e-9:
            best, best_c = score, C
    return best_c


def cross_validate(X, y, k: int = 10, seed: int = 0, Cs: Sequence[float] = DEFAULT_CS) -> ScoreReport:
    """Macro scores averaged over ``k`` stratified folds.

    ``C`` is picked per outer fold by an inner 3-fold search over ``Cs``.
    Per-class values are computed on the pooled out-of-fold predictions.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        folds = stratified_kfold(y, k, seed)
    pooled = np.empty_like(y)
    fold_rows, chosen = [], []
    for f in range(folds.max() + 1):
        tr, te = folds != f, folds == f
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            C = _select_C(X[tr], y[tr], tuple(Cs), seed + 1000 + f)
        chosen.append(C)
        pred = LinearSVM(C=C, seed=seed).fit(X[tr], y[tr]).predict(X[te])
        pooled[te] = pred
        s = macro_scores(pred, y[te], classes=np.unique(y))
        fold_rows.append({"fold": f, "macro_f": s.macro_f, "macro_precision": s.macro_precision,
                          "macro_recall": s.macro_recall, "C": C})
    overall = macro_scores(pooled, y)
    return ScoreReport(
        macro_f=float(np.mean([r["macro_f"] for r in fold_rows])),
        macro_precision=float(np.mean([r["macro_precision"] for r in fold_rows])),
        macro_recall=float(np.mean([r["macro_recall"] for r in fold_rows])),
        accuracy=overall.accuracy,
        majority_rate=overall.majority_rate,
        per_fold=fold_rows,
        per_class=overall.per_class,
        chosen_C=chosen,
    )


def class_imbalance_index(labels: Sequence) -> float:
    """Gini impurity ``1 - sum_c p_c**2`` of the class distribution."""
    if len(labels) == 0:
        raise ValueError("no labels")
    _, counts = np.unique(np.asarray(labels), return_counts=True)
    p = counts / counts.sum()
    return float(1.0 - np.sum(p * p))
