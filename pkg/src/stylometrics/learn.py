"""A small numpy MLP classifier and its cross-validated evaluation.

Architecture: tanh hidden layer -> linear hidden layer -> softmax, trained
full-batch on cross-entropy plus a squared (L2) weight penalty. Training runs
several seeded random restarts ("tours") and keeps the one with the lowest
penalized loss.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

log = logging.getLogger(__name__)

PROB_FLOOR = 1e-15


class LearnError(ValueError):
    pass


class DivergenceError(LearnError):
    pass


@dataclass(frozen=True)
class MlpConfig:
    hidden1: int = 100
    hidden2: int = 25
    l2_lambda: float = 0.01
    tours: int = 10
    max_epochs: int = 2000
    optimizer: str = "lbfgs"
    learning_rate: float = 0.5
    momentum: float = 0.9
    tol: float = 1e-8
    seed: int = 1

    def __post_init__(self):
        if self.hidden1 < 1 or self.hidden2 < 1:
            raise LearnError("layer sizes must be >= 1")
        if not self.l2_lambda > 0:
            raise LearnError("l2_lambda must be > 0")
        if self.tours < 1 or self.max_epochs < 1:
            raise LearnError("tours and max_epochs must be >= 1")
        if self.optimizer not in ("lbfgs", "momentum"):
            raise LearnError(f"unknown optimizer {self.optimizer!r}")


# --------------------------------------------------------------------------
# feature tables

@dataclass(frozen=True)
class FeatureTable:
    doc_ids: tuple[str, ...]
    feature_names: tuple[str, ...]
    X: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        if self.X.shape != (len(self.doc_ids), len(self.feature_names)):
            raise LearnError("feature matrix shape does not match ids/feature names")
        if len(self.labels) != len(self.doc_ids):
            raise LearnError("every row needs a label")

    def __len__(self) -> int:
        return len(self.doc_ids)

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.labels)))

    def y(self, classes: Sequence[str] | None = None) -> np.ndarray:
        classes = list(classes or self.classes)
        return np.array([classes.index(l) for l in self.labels], dtype=np.int64)

    def subset(self, rows) -> "FeatureTable":
        rows = np.asarray(rows, dtype=np.int64)
        return FeatureTable(tuple(self.doc_ids[i] for i in rows), self.feature_names,
                            self.X[rows], tuple(self.labels[i] for i in rows))

    def select_features(self, names: Sequence[str]) -> "FeatureTable":
        cols = [self.feature_names.index(n) for n in names]
        return FeatureTable(self.doc_ids, tuple(names), self.X[:, cols], self.labels)

    def dropna(self, policy: str = "rows") -> "FeatureTable":
        """Remove missing values by dropping incomplete rows or incomplete features."""
        missing = np.isnan(self.X)
        if policy == "rows":
            return self.subset(np.flatnonzero(~missing.any(axis=1)))
        if policy == "features":
            keep = [n for n, bad in zip(self.feature_names, missing.any(axis=0)) if not bad]
            return self.select_features(keep)
        raise ValueError(f"unknown policy {policy!r}")


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        sd = X.std(axis=0)
        return cls(X.mean(axis=0), np.where(sd > 0, sd, 1.0))

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale


# --------------------------------------------------------------------------
# network

def init_params(sizes: Sequence[int], rng: np.random.Generator) -> list[np.ndarray]:
    """Glorot-uniform weights and zero biases, as ``[W1, b1, W2, b2, ...]``."""
    params = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        lim = math.sqrt(6.0 / (fan_in + fan_out))
        params.append(rng.uniform(-lim, lim, size=(fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(params: Sequence[np.ndarray], X: np.ndarray) -> np.ndarray:
    W1, b1, W2, b2, W3, b3 = params
    h1 = np.tanh(X @ W1 + b1)
    h2 = h1 @ W2 + b2
    return softmax(h2 @ W3 + b3)


def loss_and_grad(params: Sequence[np.ndarray], X: np.ndarray, Y: np.ndarray,
                  l2_lambda: float) -> tuple[float, list[np.ndarray]]:
    """Mean cross-entropy plus ``l2_lambda / 2 * sum(W**2)`` and its gradient.

    ``Y`` is one-hot. Biases are not penalized.
    """
    W1, b1, W2, b2, W3, b3 = params
    n = X.shape[0]
    h1 = np.tanh(X @ W1 + b1)
    h2 = h1 @ W2 + b2
    logits = h2 @ W3 + b3
    z = logits - logits.max(axis=1, keepdims=True)
    logsum = np.log(np.exp(z).sum(axis=1, keepdims=True))
    logp = z - logsum
    ce = -(Y * logp).sum() / n
    penalty = 0.5 * l2_lambda * sum(float((W * W).sum()) for W in (W1, W2, W3))
    d3 = (np.exp(logp) - Y) / n
    gW3 = h2.T @ d3 + l2_lambda * W3
    gb3 = d3.sum(axis=0)
    d2 = d3 @ W3.T
    gW2 = h1.T @ d2 + l2_lambda * W2
    gb2 = d2.sum(axis=0)
    d1 = (d2 @ W2.T) * (1.0 - h1 * h1)
    gW1 = X.T @ d1 + l2_lambda * W1
    gb1 = d1.sum(axis=0)
    return float(ce + penalty), [gW1, gb1, gW2, gb2, gW3, gb3]


@dataclass
class MlpModel:
    classes: tuple[str, ...]
    feature_names: tuple[str, ...]
    standardizer: Standardizer
    params: list[np.ndarray]
    config: MlpConfig
    loss: float
    tour: int
    history: list[float] = field(default_factory=list, repr=False)

    def predict_proba(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(self.feature_names):
            raise LearnError(f"expected {len(self.feature_names)} features, got {X.shape[1]}")
        return forward(self.params, self.standardizer.transform(X))

    def predict(self, X) -> np.ndarray:
        # argmax takes the lowest index on ties
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "feature_names": list(self.feature_names),
            "standardizer": {"mean": self.standardizer.mean.tolist(),
                             "scale": self.standardizer.scale.tolist()},
            "params": [p.tolist() for p in self.params],
            "loss": self.loss,
            "tour": self.tour,
        }


def predict_proba(model: MlpModel, row) -> np.ndarray:
    out = model.predict_proba(row)
    return out[0] if np.ndim(row) == 1 else out


def _flatten(params: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate([p.ravel() for p in params])


def _unflatten(vec: np.ndarray, like: Sequence[np.ndarray]) -> list[np.ndarray]:
    out, i = [], 0
    for p in like:
        out.append(vec[i:i + p.size].reshape(p.shape))
        i += p.size
    return out


def _momentum_descent(f, x, config: MlpConfig) -> tuple[np.ndarray, float, list[float]]:
    vel = np.zeros_like(x)
    lr = config.learning_rate
    loss, grad = f(x)
    history = [loss]
    for _ in range(config.max_epochs):
        new_vel = config.momentum * vel - lr * grad
        cand = x + new_vel
        cand_loss, cand_grad = f(cand)
        if not math.isfinite(cand_loss) or cand_loss > loss:
            lr *= 0.5
            vel = np.zeros_like(x)
            if lr < 1e-12:
                break
            continue
        rel = (loss - cand_loss) / max(abs(loss), 1e-300)
        x, vel, loss, grad = cand, new_vel, cand_loss, cand_grad
        history.append(loss)
        if rel < config.tol:
            break
    return x, loss, history


def _lbfgs(f, x, config: MlpConfig, memory: int = 10) -> tuple[np.ndarray, float, list[float]]:
    """Limited-memory BFGS with a step-halving Armijo line search."""
    loss, grad = f(x)
    history = [loss]
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    for _ in range(config.max_epochs):
        # two-loop recursion
        q = grad.copy()
        alphas = []
        for s, y in zip(reversed(s_hist), reversed(y_hist)):
            a = (s @ q) / (y @ s)
            alphas.append(a)
            q -= a * y
        if s_hist:
            q *= (s_hist[-1] @ y_hist[-1]) / (y_hist[-1] @ y_hist[-1])
        else:
            q *= min(1.0, config.learning_rate / max(np.abs(grad).max(), 1e-300))
        for (s, y), a in zip(zip(s_hist, y_hist), reversed(alphas)):
            b = (y @ q) / (y @ s)
            q += s * (a - b)
        direction = -q
        slope = grad @ direction
        if slope >= 0:
            s_hist.clear()
            y_hist.clear()
            direction = -grad * min(1.0, config.learning_rate / max(np.abs(grad).max(), 1e-300))
            slope = grad @ direction
        step = 1.0
        while True:
            cand = x + step * direction
            cand_loss, cand_grad = f(cand)
            if math.isfinite(cand_loss) and cand_loss <= loss + 1e-4 * step * slope:
                break
            step *= 0.5
            if step < 1e-12:
                return x, loss, history
        s = cand - x
        y = cand_grad - grad
        if s @ y > 1e-12 * (y @ y):
            s_hist.append(s)
            y_hist.append(y)
            if len(s_hist) > memory:
                s_hist.pop(0)
                y_hist.pop(0)
        rel = (loss - cand_loss) / max(abs(loss), 1e-300)
        x, loss, grad = cand, cand_loss, cand_grad
        history.append(loss)
        if rel < config.tol or np.abs(grad).max() < config.tol:
            break
    return x, loss, history


def _run_tour(X: np.ndarray, Y: np.ndarray, config: MlpConfig, rng: np.random.Generator
              ) -> tuple[list[np.ndarray], float, list[float]]:
    sizes = [X.shape[1], config.hidden1, config.hidden2, Y.shape[1]]
    like = init_params(sizes, rng)

    def f(vec):
        loss, grad = loss_and_grad(_unflatten(vec, like), X, Y, config.l2_lambda)
        return loss, _flatten(grad)

    if config.optimizer == "lbfgs":
        x, loss, history = _lbfgs(f, _flatten(like), config)
    else:
        x, loss, history = _momentum_descent(f, _flatten(like), config)
    if not math.isfinite(loss):
        raise DivergenceError(f"non-finite loss {loss} after {len(history)} epochs")
    return _unflatten(x, like), loss, history


def train_mlp(table: FeatureTable, config: MlpConfig = MlpConfig(),
              classes: Sequence[str] | None = None) -> MlpModel:
    """Fit the network on ``table``; features are z-scored on the training rows."""
    classes = tuple(classes or table.classes)
    counts = {c: 0 for c in classes}
    for l in table.labels:
        counts[l] += 1
    present = [c for c in classes if counts[c] > 0]
    if len(present) < 2:
        raise LearnError("training needs at least two classes")
    if any(counts[c] < 2 for c in present):
        raise LearnError("every class needs at least two rows")
    std = Standardizer.fit(table.X)
    X = std.transform(table.X)
    Y = np.eye(len(classes))[table.y(classes)]
    best = None
    for tour in range(config.tours):
        rng = np.random.default_rng([config.seed, tour])
        params, loss, hist = _run_tour(X, Y, config, rng)
        if best is None or loss < best[1]:
            best = (params, loss, hist, tour)
    params, loss, hist, tour = best
    return MlpModel(classes, table.feature_names, std, params, config, loss, tour, hist)


# --------------------------------------------------------------------------
# evaluation

def stratified_folds(labels: Sequence[str], k: int, seed: int = 1) -> np.ndarray:
    """Fold index per row; each class is shuffled and dealt round-robin.

    Classes with fewer than ``k`` rows are pooled and dealt together.
    """
    n = len(labels)
    if k < 2:
        raise LearnError("k must be >= 2")
    if k > n:
        raise LearnError(f"k={k} exceeds the number of rows ({n})")
    rng = np.random.default_rng(seed)
    by_class: dict[str, list[int]] = {}
    for i, l in enumerate(labels):
        by_class.setdefault(l, []).append(i)
    groups = []
    pooled: list[int] = []
    for c in sorted(by_class):
        if len(by_class[c]) < k:
            log.warning("class %r has %d rows < k=%d; pooled for stratification",
                        c, len(by_class[c]), k)
            pooled.extend(by_class[c])
        else:
            groups.append(by_class[c])
    if pooled:
        groups.append(sorted(pooled))
    folds = np.empty(n, dtype=np.int64)
    offset = 0
    for rows in groups:
        perm = rng.permutation(np.asarray(rows))
        for j, i in enumerate(perm):
            folds[i] = (offset + j) % k
        offset += len(rows)
    return folds


def roc_curve(scores: np.ndarray, positives: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """ROC points (fpr, tpr), thresholds stepping through distinct scores high to low."""
    scores = np.asarray(scores, dtype=float)
    positives = np.asarray(positives, dtype=bool)
    n_pos = positives.sum()
    n_neg = len(positives) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise LearnError("ROC needs both positive and negative rows")
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    p = positives[order]
    tp = np.cumsum(p)
    fp = np.cumsum(~p)
    last = np.r_[np.flatnonzero(np.diff(s) != 0), len(s) - 1]
    tpr = np.r_[0.0, tp[last] / n_pos]
    fpr = np.r_[0.0, fp[last] / n_neg]
    return fpr, tpr


def auc(scores, positives) -> float:
    fpr, tpr = roc_curve(scores, positives)
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def cross_entropy(probs: np.ndarray, y: np.ndarray) -> float:
    return float(-np.log(np.maximum(probs[np.arange(len(y)), y], PROB_FLOOR)).sum())


@dataclass
class EvalReport:
    classes: tuple[str, ...]
    feature_names: tuple[str, ...]
    confusion_counts: np.ndarray
    misclassification: float
    auc: dict[str, float]
    r2_entropy: float
    importances: dict[str, float]
    class_importances: dict[str, dict[str, float]]
    probabilities: np.ndarray
    y_true: np.ndarray
    doc_ids: tuple[str, ...]
    mode: str = "kfold"

    @property
    def confusion(self) -> np.ndarray:
        """Row-normalized confusion matrix (rows: true class, columns: predicted)."""
        c = self.confusion_counts.astype(float)
        rows = c.sum(axis=1, keepdims=True)
        return np.divide(c, rows, out=np.zeros_like(c), where=rows > 0)

    def roc_points(self) -> list[tuple[str, float, float]]:
        out = []
        for j, c in enumerate(self.classes):
            pos = self.y_true == j
            if pos.all() or not pos.any():
                continue
            fpr, tpr = roc_curve(self.probabilities[:, j], pos)
            out.extend((c, float(f), float(t)) for f, t in zip(fpr, tpr))
        return out

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "classes": list(self.classes),
            "feature_names": list(self.feature_names),
            "confusion": self.confusion.tolist(),
            "confusion_counts": self.confusion_counts.tolist(),
            "misclassification": self.misclassification,
            "auc": self.auc,
            "r2_entropy": self.r2_entropy,
            "importances": self.importances,
            "class_importances": self.class_importances,
            "predictions": [
                {"doc_id": d, "true": self.classes[t], "probabilities": p.tolist()}
                for d, t, p in zip(self.doc_ids, self.y_true, self.probabilities)
            ],
        }


def _normalize_drops(drops: np.ndarray, names: Sequence[str]) -> dict[str, float]:
    drops = np.maximum(drops, 0.0)
    top = drops.max() if len(drops) else 0.0
    vals = drops / top if top > 0 else np.zeros_like(drops)
    return {n: float(v) for n, v in zip(names, vals)}


def _permutation_drops(model: MlpModel, X: np.ndarray, y: np.ndarray, n_repeats: int,
                       rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Raw accuracy drops: overall (n_features,) and one-vs-rest per class (n_classes, n_features)."""
    n_cls = len(model.classes)

    def scores(pred):
        overall = np.mean(pred == y)
        ovr = np.array([np.mean((pred == c) == (y == c)) for c in range(n_cls)])
        return overall, ovr

    base, base_ovr = scores(model.predict(X))
    drops = np.zeros(X.shape[1])
    cls_drops = np.zeros((n_cls, X.shape[1]))
    for f in range(X.shape[1]):
        for _ in range(n_repeats):
            Xp = X.copy()
            Xp[:, f] = Xp[rng.permutation(len(Xp)), f]
            acc, ovr = scores(model.predict(Xp))
            drops[f] += (base - acc) / n_repeats
            cls_drops[:, f] += (base_ovr - ovr) / n_repeats
    return drops, cls_drops


def feature_importance(model: MlpModel, table: FeatureTable, seed: int = 1,
                       n_repeats: int = 10) -> dict[str, float]:
    """Permutation importance on ``table``'s rows, scaled so the top feature is 1."""
    if n_repeats < 1:
        raise LearnError("n_repeats must be >= 1")
    rng = np.random.default_rng(seed)
    drops, _ = _permutation_drops(model, table.X, table.y(model.classes), n_repeats, rng)
    return _normalize_drops(drops, table.feature_names)


def kfold_cv(table: FeatureTable, config: MlpConfig = MlpConfig(), k: int = 5, seed: int = 1,
             n_repeats: int = 10) -> EvalReport:
    """Stratified k-fold evaluation with pooled out-of-fold predictions.

    Importances are permutation accuracy drops measured on each held-out
    fold with that fold's model, summed over folds (weighted by fold size).
    """
    if n_repeats < 1:
        raise LearnError("n_repeats must be >= 1")
    classes = table.classes
    y = table.y(classes)
    folds = stratified_folds(table.labels, k, seed)
    probs = np.zeros((len(table), len(classes)))
    ce_model = 0.0
    ce_null = 0.0
    drops = np.zeros(len(table.feature_names))
    cls_drops = np.zeros((len(classes), len(table.feature_names)))
    for f in range(k):
        test = np.flatnonzero(folds == f)
        train = np.flatnonzero(folds != f)
        if len(test) == 0:
            continue
        model = train_mlp(table.subset(train), config, classes)
        p = model.predict_proba(table.X[test])
        probs[test] = p
        prior = np.bincount(y[train], minlength=len(classes)) / len(train)
        ce_model += cross_entropy(p, y[test])
        ce_null += cross_entropy(np.tile(prior, (len(test), 1)), y[test])
        rng = np.random.default_rng([seed, f, 7])
        d, cd = _permutation_drops(model, table.X[test], y[test], n_repeats, rng)
        drops += d * len(test)
        cls_drops += cd * len(test)
    return _report(table, classes, probs, y, ce_model, ce_null, drops, cls_drops, "kfold")


def holdout_eval(table: FeatureTable, config: MlpConfig = MlpConfig(), test_fraction: float = 0.2,
                 seed: int = 1, n_repeats: int = 10) -> EvalReport:
    """Single stratified train/test split (one fold of ``round(1/test_fraction)``-fold CV)."""
    k = max(2, round(1.0 / test_fraction))
    classes = table.classes
    y = table.y(classes)
    folds = stratified_folds(table.labels, k, seed)
    test = np.flatnonzero(folds == 0)
    train = np.flatnonzero(folds != 0)
    model = train_mlp(table.subset(train), config, classes)
    probs = model.predict_proba(table.X[test])
    prior = np.bincount(y[train], minlength=len(classes)) / len(train)
    rng = np.random.default_rng([seed, 0, 7])
    d, cd = _permutation_drops(model, table.X[test], y[test], n_repeats, rng)
    sub = table.subset(test)
    return _report(sub, classes, probs, y[test], cross_entropy(probs, y[test]),
                   cross_entropy(np.tile(prior, (len(test), 1)), y[test]), d, cd, "holdout")


def _report(table, classes, probs, y, ce_model, ce_null, drops, cls_drops, mode) -> EvalReport:
    pred = np.argmax(probs, axis=1)
    conf = np.zeros((len(classes), len(classes)), dtype=np.int64)
    np.add.at(conf, (y, pred), 1)
    aucs = {}
    for j, c in enumerate(classes):
        pos = y == j
        if pos.any() and not pos.all():
            aucs[c] = auc(probs[:, j], pos)
    r2 = 1.0 - ce_model / ce_null if ce_null > 0 else 0.0
    return EvalReport(
        classes, table.feature_names, conf, float(np.mean(pred != y)), aucs, float(r2),
        _normalize_drops(drops, table.feature_names),
        {c: _normalize_drops(cls_drops[j], table.feature_names) for j, c in enumerate(classes)},
        probs, y, table.doc_ids, mode,
    )


def footprint(report: EvalReport, group: str) -> list[tuple[str, float]]:
    """Feature -> importance series for one class, in the report's feature order."""
    if group not in report.class_importances:
        raise LearnError(f"unknown group {group!r}")
    imp = report.class_importances[group]
    return [(f, imp[f]) for f in report.feature_names]


# --------------------------------------------------------------------------
# export

def write_report(report: EvalReport, out_dir: str | Path, prefix: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{prefix}_report.json").write_text(
        json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8")
    with open(out / f"{prefix}_confusion.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["true", *report.classes])
        for c, row in zip(report.classes, report.confusion):
            w.writerow([c, *(repr(float(v)) for v in row)])
    with open(out / f"{prefix}_importances.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", "feature", "importance"])
        for f in report.feature_names:
            w.writerow(["__overall__", f, repr(report.importances[f])])
        for c in report.classes:
            for f, v in footprint(report, c):
                w.writerow([c, f, repr(v)])
    with open(out / f"{prefix}_roc.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["class", "fpr", "tpr"])
        for c, f, t in report.roc_points():
            w.writerow([c, repr(f), repr(t)])
