"""Lexical baselines: TF-IDF pair features into a random forest or linear SVM.

Both learners are implemented here rather than wrapped, so that seeding,
class weighting, and tie-breaking are exactly reproducible across runs and
platforms. Trees are CART with Gini impurity, ceil(sqrt(d)) features per
split, and bootstrap sampling; per-tree RNGs are derived from (seed, tree
index) so training order never matters. The SVM is one-vs-rest hinge loss
trained by seeded epoch-based subgradient descent (Pegasos schedule).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import LinkExample
from .errors import (
    DegenerateTraining,
    DimensionMismatch,
    StratificationImpossible,
)
from .evaluate import Prediction, PredictionSet, classification_report
from .textfeat import SparseVector, TfidfModel, TfidfParams, tfidf_fit, tfidf_transform
from .util import stable_seed

RANDOM_FOREST = "RANDOM_FOREST"
LINEAR_SVM = "LINEAR_SVM"
BALANCED = "BALANCED"
NO_WEIGHTING = "NONE"


@dataclass(frozen=True)
class BaselineConfig:
    model_kind: str = RANDOM_FOREST
    n_trees: int = 100
    max_depth: int | None = None
    max_features: int | None = None  # None -> ceil(sqrt(d))
    svm_epochs: int = 30
    svm_regularization: float = 1e-4
    class_weighting: str = BALANCED
    seed: int = 0

    def __post_init__(self):
        if self.model_kind not in (RANDOM_FOREST, LINEAR_SVM):
            raise ValueError(f"unknown model kind {self.model_kind!r}")
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.class_weighting not in (BALANCED, NO_WEIGHTING):
            raise ValueError(f"unknown class weighting {self.class_weighting!r}")

    def to_dict(self) -> dict:
        return {
            "model_kind": self.model_kind,
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "max_features": self.max_features,
            "svm_epochs": self.svm_epochs,
            "svm_regularization": self.svm_regularization,
            "class_weighting": self.class_weighting,
            "seed": self.seed,
        }


def issue_text(title: str, description: str) -> str:
    return f"{title} {description}"


def featurize_pair(model: TfidfModel, example: LinkExample) -> SparseVector:
    """Block concatenation [v(issue_a) ; v(issue_b)], dimension 2*|V|."""
    va = tfidf_transform(model, issue_text(example.issue_a.title, example.issue_a.description))
    vb = tfidf_transform(model, issue_text(example.issue_b.title, example.issue_b.description))
    offset = model.dim
    indices = va.indices + tuple(i + offset for i in vb.indices)
    return SparseVector(indices, va.weights + vb.weights)


def vectors_to_dense(vectors: list[SparseVector], dim: int) -> np.ndarray:
    X = np.zeros((len(vectors), dim))
    for row, vec in enumerate(vectors):
        if vec.nnz:
            X[row, list(vec.indices)] = vec.weights
    return X


def class_weights(y: np.ndarray, n_classes: int, scheme: str) -> np.ndarray:
    """Per-class weight N / (k * count); uniform 1.0 under NONE."""
    if scheme == NO_WEIGHTING:
        return np.ones(n_classes)
    counts = np.bincount(y, minlength=n_classes).astype(float)
    return len(y) / (n_classes * counts)


# --------------------------------------------------------------------------
# CART trees, grown iteratively (no recursion) with vectorized split search.
# Node encoding: leaf {"c": class}, internal {"f": feat, "t": thr, "l": i, "r": i}.
# --------------------------------------------------------------------------


def _best_split(X, y, w, idx, feats, n_classes):
    """Lowest weighted-Gini split over the sampled features.

    Returns (feature, threshold, left_mask) or None; ties go to the earliest
    feature in sampled order, then the lowest threshold position."""
    n = len(idx)
    Xs = X[np.ix_(idx, feats)]  # (n, F)
    order = np.argsort(Xs, axis=0, kind="stable")
    sx = np.take_along_axis(Xs, order, axis=0)
    sy = y[idx][order]  # (n, F)
    sw = w[idx][order]
    onehot = (sy[:, :, None] == np.arange(n_classes)) * sw[:, :, None]  # (n, F, k)
    prefix = np.cumsum(onehot, axis=0)
    total = prefix[-1]  # (F, k)
    w_total = total.sum(axis=1)  # (F,)

    left = prefix[:-1]  # (n-1, F, k): split after position i
    right = total[None, :, :] - left
    wl = left.sum(axis=2)
    wr = right.sum(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        gini_l = 1.0 - np.sum((left / wl[:, :, None]) ** 2, axis=2)
        gini_r = 1.0 - np.sum((right / wr[:, :, None]) ** 2, axis=2)
    cost = (wl * gini_l + wr * gini_r) / w_total[None, :]
    cost = np.where((wl == 0) | (wr == 0), np.inf, cost)
    cost[sx[:-1] >= sx[1:]] = np.inf  # only boundaries between distinct values

    flat = cost.T.reshape(-1)  # feature-major so earlier features win ties
    best = int(np.argmin(flat))
    if not np.isfinite(flat[best]):
        return None
    f_pos, s_pos = divmod(best, n - 1)
    feature = int(feats[f_pos])
    threshold = float((sx[s_pos, f_pos] + sx[s_pos + 1, f_pos]) / 2.0)
    left_mask = X[idx, feature] < threshold
    return feature, threshold, left_mask


def _leaf_class(y, w, idx, n_classes) -> int:
    scores = np.bincount(y[idx], weights=w[idx], minlength=n_classes)
    return int(np.argmax(scores))


def _grow_tree(X, y, w, boot_idx, n_classes, max_features, max_depth, rng) -> list[dict]:
    d = X.shape[1]
    nodes: list[dict] = []
    stack = [(boot_idx, 0, None, None)]  # (indices, depth, parent node, side)
    while stack:
        idx, depth, parent, side = stack.pop()
        slot = len(nodes)
        if parent is not None:
            parent[side] = slot
        labels = y[idx]
        pure = bool((labels == labels[0]).all())
        if pure or len(idx) < 2 or (max_depth is not None and depth >= max_depth):
            nodes.append({"c": _leaf_class(y, w, idx, n_classes)})
            continue
        feats = rng.choice(d, size=min(max_features, d), replace=False)
        split = _best_split(X, y, w, idx, feats, n_classes)
        if split is None:
            nodes.append({"c": _leaf_class(y, w, idx, n_classes)})
            continue
        feature, threshold, left_mask = split
        node = {"f": feature, "t": threshold, "l": -1, "r": -1}
        nodes.append(node)
        # Right pushed first so the left child is materialized first.
        stack.append((idx[~left_mask], depth + 1, node, "r"))
        stack.append((idx[left_mask], depth + 1, node, "l"))
    return nodes


def _tree_predict(nodes: list[dict], x: np.ndarray) -> int:
    pos = 0
    while True:
        node = nodes[pos]
        if "c" in node:
            return node["c"]
        pos = node["l"] if x[node["f"]] < node["t"] else node["r"]


@dataclass
class TrainedBaseline:
    """A fitted forest or SVM bound to one TF-IDF feature space."""

    config: BaselineConfig
    labels: list[str]
    dim: int
    feature_space: str | None = None  # audit fingerprint of the TF-IDF model
    trees: list[list[dict]] | None = None
    weights: np.ndarray | None = None  # (k, d) for LINEAR_SVM
    biases: np.ndarray | None = None  # (k,)

    def _as_row(self, x) -> np.ndarray:
        if isinstance(x, SparseVector):
            if x.nnz and x.indices[-1] >= self.dim:
                raise DimensionMismatch(
                    f"vector index {x.indices[-1]} outside dimension {self.dim}"
                )
            return x.to_dense(self.dim)
        arr = np.asarray(x, dtype=float)
        if arr.shape != (self.dim,):
            raise DimensionMismatch(f"expected shape ({self.dim},), got {arr.shape}")
        return arr


def train(config: BaselineConfig, X, y: list[str], dim: int | None = None,
          feature_space: str | None = None,
          label_order: list[str] | None = None) -> TrainedBaseline:
    """Fit the configured model; deterministic for a fixed seed.

    label_order fixes the model's label list (and thereby its tie-break
    order); labels absent from y are dropped. Default: sorted(set(y))."""
    if isinstance(X, np.ndarray):
        dense = np.asarray(X, dtype=float)
        dim = dense.shape[1]
    else:
        if dim is None:
            raise ValueError("dim is required when X is a list of sparse vectors")
        dense = vectors_to_dense(list(X), dim)
    if len(dense) != len(y):
        raise ValueError(f"|X|={len(dense)} != |y|={len(y)}")
    seen = set(y)
    if label_order is not None:
        missing = seen - set(label_order)
        if missing:
            raise ValueError(f"label_order misses observed labels: {sorted(missing)}")
        labels = [lab for lab in label_order if lab in seen]
    else:
        labels = sorted(seen)
    if len(set(labels)) < 2:
        raise DegenerateTraining("training data contains a single class")
    if len(dense) < len(labels):
        raise ValueError("need at least as many examples as classes")
    label_index = {lab: i for i, lab in enumerate(labels)}
    yi = np.array([label_index[lab] for lab in y])
    k = len(labels)
    cw = class_weights(yi, k, config.class_weighting)
    sample_w = cw[yi]

    model = TrainedBaseline(config=config, labels=labels, dim=dim, feature_space=feature_space)
    if config.model_kind == RANDOM_FOREST:
        max_features = config.max_features or math.ceil(math.sqrt(dim))
        trees = []
        for i in range(config.n_trees):
            rng = np.random.default_rng(stable_seed(config.seed, "tree", i))
            boot = rng.integers(0, len(dense), len(dense))
            trees.append(
                _grow_tree(dense, yi, sample_w, boot, k, max_features, config.max_depth, rng)
            )
        model.trees = trees
    else:
        model.weights, model.biases = _train_svm(dense, yi, k, sample_w, config)
    return model


def _train_svm(X, yi, k, sample_w, config: BaselineConfig):
    n, d = X.shape
    lam = config.svm_regularization
    W = np.zeros((k, d))
    B = np.zeros(k)
    ysign = np.where(yi[:, None] == np.arange(k), 1.0, -1.0)  # (n, k)
    rng = np.random.default_rng(stable_seed(config.seed, "svm"))
    t = 0
    for _ in range(config.svm_epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            x = X[i]
            margins = ysign[i] * (W @ x + B)
            W *= 1.0 - eta * lam
            active = margins < 1.0
            if active.any():
                coef = eta * sample_w[i] * ysign[i, active]
                W[active] += coef[:, None] * x
                B[active] += coef
    return W, B


def predict_votes(model: TrainedBaseline, x) -> dict[str, int]:
    """Raw per-label tree votes (forest only); votes sum to n_trees exactly."""
    if model.trees is None:
        raise ValueError("vote counts only exist for forest models")
    row = model._as_row(x)
    votes = [0] * len(model.labels)
    for nodes in model.trees:
        votes[_tree_predict(nodes, row)] += 1
    return dict(zip(model.labels, votes))


def predict_proba(model: TrainedBaseline, x) -> dict[str, float]:
    """Forest: vote fractions. SVM: softmax over margins (a confidence score,
    not a calibrated probability)."""
    if model.trees is not None:
        votes = predict_votes(model, x)
        n = model.config.n_trees
        return {lab: votes[lab] / n for lab in model.labels}
    row = model._as_row(x)
    margins = model.weights @ row + model.biases
    shifted = np.exp(margins - margins.max())
    probs = shifted / shifted.sum()
    return dict(zip(model.labels, (float(p) for p in probs)))


def predict(model: TrainedBaseline, x) -> str:
    """argmax of predict_proba; ties go to the lowest label index."""
    proba = predict_proba(model, x)
    best = model.labels[0]
    for lab in model.labels[1:]:
        if proba[lab] > proba[best]:
            best = lab
    return best


# --------------------------------------------------------------------------
# 5-fold cross-validation with per-fold TF-IDF refit (no leakage).
# --------------------------------------------------------------------------


@dataclass
class CVResult:
    model_kind: str
    folds: int
    per_fold_macro_f1: list[float]
    mean_macro_f1: float
    labels: list[str]
    seed: int


def stratified_fold_assignment(labels: list[str], folds: int, seed: int) -> list[int]:
    """Per-class seeded shuffle dealt round-robin into folds."""
    by_label: dict[str, list[int]] = {}
    for pos, lab in enumerate(labels):
        by_label.setdefault(lab, []).append(pos)
    for lab, positions in by_label.items():
        if len(positions) < folds:
            raise StratificationImpossible(
                f"label {lab!r} has {len(positions)} examples, need >= {folds}"
            )
    assignment = [0] * len(labels)
    for lab in sorted(by_label):
        positions = list(by_label[lab])
        rng = np.random.default_rng(stable_seed(seed, "fold", lab))
        rng.shuffle(positions)
        for i, pos in enumerate(positions):
            assignment[pos] = i % folds
    return assignment


def cross_validate(
    config: BaselineConfig,
    examples: list[LinkExample],
    folds: int = 5,
    tfidf_params: TfidfParams = TfidfParams(),
) -> CVResult:
    """Mean and per-fold macro F1; TF-IDF is refit inside each training fold."""
    y = [ex.label for ex in examples]
    universe = sorted(set(y))
    assignment = stratified_fold_assignment(y, folds, config.seed)
    per_fold = []
    for fold in range(folds):
        train_idx = [i for i, f in enumerate(assignment) if f != fold]
        test_idx = [i for i, f in enumerate(assignment) if f == fold]
        docs = []
        for i in train_idx:
            ex = examples[i]
            docs.append(issue_text(ex.issue_a.title, ex.issue_a.description))
            docs.append(issue_text(ex.issue_b.title, ex.issue_b.description))
        tfidf = tfidf_fit(docs, tfidf_params)
        Xtr = [featurize_pair(tfidf, examples[i]) for i in train_idx]
        model = train(config, Xtr, [y[i] for i in train_idx], dim=2 * tfidf.dim)
        records = []
        for i in test_idx:
            vec = featurize_pair(tfidf, examples[i])
            records.append(Prediction(examples[i].example_id, y[i], predict(model, vec)))
        report = classification_report(PredictionSet(records, universe))
        per_fold.append(report.macro_f1)
    return CVResult(
        model_kind=config.model_kind,
        folds=folds,
        per_fold_macro_f1=per_fold,
        mean_macro_f1=sum(per_fold) / folds,
        labels=universe,
        seed=config.seed,
    )


# --------------------------------------------------------------------------
# Model artifact: versioned JSON, stable across runs.
# --------------------------------------------------------------------------

ARTIFACT_VERSION = 1


def model_to_json(model: TrainedBaseline, extra_meta: dict | None = None) -> str:
    payload = {
        "version": ARTIFACT_VERSION,
        "config": model.config.to_dict(),
        "labels": model.labels,
        "dim": model.dim,
        "feature_space": model.feature_space,
    }
    if extra_meta:
        payload["meta"] = extra_meta
    if model.trees is not None:
        payload["trees"] = model.trees
    else:
        payload["weights"] = [[float(v) for v in row] for row in model.weights]
        payload["biases"] = [float(v) for v in model.biases]
    return json.dumps(payload, sort_keys=True)


def model_from_json(payload: str) -> TrainedBaseline:
    data = json.loads(payload)
    if data.get("version") != ARTIFACT_VERSION:
        raise ValueError(f"unsupported model artifact version {data.get('version')!r}")
    config = BaselineConfig(**data["config"])
    model = TrainedBaseline(
        config=config,
        labels=list(data["labels"]),
        dim=int(data["dim"]),
        feature_space=data.get("feature_space"),
    )
    if "trees" in data:
        model.trees = data["trees"]
    else:
        model.weights = np.asarray(data["weights"], dtype=float)
        model.biases = np.asarray(data["biases"], dtype=float)
    return model
