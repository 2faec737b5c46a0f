"""Deterministic random forest with probability output, JSON serialization,
and stratified cross-validation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin


def _tree_rng(seed: int, index: int) -> np.random.Generator:
    # Per-tree seed rule: spawn key (index,) off the master seed.
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _gini_best_split(
    X: np.ndarray, y: np.ndarray, features: np.ndarray, min_leaf: int
) -> Optional[tuple[int, float, float]]:
    """Best (feature, threshold, impurity_sum) over the candidate features.

    Split condition is x <= threshold with threshold the midpoint of each
    distinct-value boundary. Ties break to the lowest feature index, then the
    lowest threshold.
    """
    n = len(y)
    sub = X[:, features]
    order = np.argsort(sub, axis=0, kind="stable")
    sorted_vals = np.take_along_axis(sub, order, axis=0)
    sorted_pos = y[order].astype(float)  # (n, m) positives per column order
    prefix_pos = np.cumsum(sorted_pos, axis=0)
    total_pos = prefix_pos[-1]
    left_n = np.arange(1, n, dtype=float)[:, None]
    right_n = n - left_n
    left_pos = prefix_pos[:-1]
    right_pos = total_pos - left_pos
    # Weighted Gini numerator: sum over sides of n_side * gini_side.
    with np.errstate(invalid="ignore", divide="ignore"):
        gini_left = 1.0 - (left_pos / left_n) ** 2 - (1 - left_pos / left_n) ** 2
        gini_right = 1.0 - (right_pos / right_n) ** 2 - (1 - right_pos / right_n) ** 2
    score = left_n * gini_left + right_n * gini_right
    # Invalid boundaries: equal adjacent values, or a side below min_leaf.
    boundary_ok = sorted_vals[:-1] < sorted_vals[1:]
    size_ok = (left_n >= min_leaf) & (right_n >= min_leaf)
    score = np.where(boundary_ok & size_ok, score, np.inf)
    best: Optional[tuple[int, float, float]] = None
    for j in range(len(features)):
        col = score[:, j]
        i = int(np.argmin(col))
        if not np.isfinite(col[i]):
            continue
        midpoint = 0.5 * (sorted_vals[i, j] + sorted_vals[i + 1, j])
        candidate = (float(col[i]), int(features[j]), float(midpoint))
        if best is None or candidate < best:
            best = candidate
    if best is None:
        return None
    impurity, feature, threshold = best
    return feature, threshold, impurity


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    rng: np.random.Generator,
    max_depth: Optional[int],
    min_samples_leaf: int,
    n_candidate_features: int,
    depth: int = 0,
) -> dict[str, Any]:
    n = len(y)
    positives = int(y.sum())
    # Majority vote, ties to class 0 for determinism.
    vote = 1 if positives * 2 > n else 0
    if (
        positives in (0, n)
        or n < 2 * min_samples_leaf
        or (max_depth is not None and depth >= max_depth)
    ):
        return {"leaf": vote}
    features = np.sort(
        rng.choice(X.shape[1], size=min(n_candidate_features, X.shape[1]), replace=False)
    )
    split = _gini_best_split(X, y, features, min_samples_leaf)
    if split is None:
        return {"leaf": vote}
    feature, threshold, _ = split
    mask = X[:, feature] <= threshold
    return {
        "feature": feature,
        "threshold": threshold,
        "left": _grow_tree(
            X[mask], y[mask], rng, max_depth, min_samples_leaf, n_candidate_features, depth + 1
        ),
        "right": _grow_tree(
            X[~mask], y[~mask], rng, max_depth, min_samples_leaf, n_candidate_features, depth + 1
        ),
    }


def _tree_votes(node: dict[str, Any], X: np.ndarray, out: np.ndarray, idx: np.ndarray) -> None:
    if "leaf" in node:
        out[idx] = node["leaf"]
        return
    mask = X[idx, node["feature"]] <= node["threshold"]
    _tree_votes(node["left"], X, out, idx[mask])
    _tree_votes(node["right"], X, out, idx[~mask])


class OnsetForest(BaseEstimator, ClassifierMixin):
    """Random forest of axis-aligned Gini trees, fully determined by its seed.

    Globally constant feature columns are dropped before training (they are
    unsplittable anyway), so adding a constant column never changes
    predictions; the per-split candidate count is ceil(sqrt(d)) over the
    informative columns.
    """

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: Optional[int] = None,
        min_samples_leaf: int = 1,
        seed: int = 0,
        n_jobs: int = 1,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X: np.ndarray, y: np.ndarray) -> "OnsetForest":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if X.ndim != 2 or len(X) != len(y):
            raise ValueError("X must be 2-D with one label per row")
        if len(X) < 2:
            raise ValueError("need at least 2 rows to train")
        if set(np.unique(y)) != {0, 1}:
            raise ValueError("training data must contain both classes (labels 0 and 1)")
        self.n_features_in_ = X.shape[1]
        informative = np.flatnonzero(X.min(axis=0) < X.max(axis=0))
        if len(informative) == 0:
            raise ValueError("all feature columns are constant")
        self.active_features_ = informative
        m = math.ceil(math.sqrt(len(informative)))
        Xa = X[:, informative]

        def grow(i: int) -> dict[str, Any]:
            rng = _tree_rng(self.seed, i)
            sample = rng.integers(0, len(Xa), size=len(Xa))
            return _grow_tree(
                Xa[sample], y[sample], rng, self.max_depth, self.min_samples_leaf, m
            )

        if self.n_jobs and self.n_jobs != 1:
            from joblib import Parallel, delayed

            self.trees_ = list(
                Parallel(n_jobs=self.n_jobs)(delayed(grow)(i) for i in range(self.n_trees))
            )
        else:
            self.trees_ = [grow(i) for i in range(self.n_trees)]
        return self

    def onset_probability(self, X: np.ndarray) -> np.ndarray:
        """Fraction of trees voting onset, per row."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1] if X.ndim == 2 else 'non-matrix'}"
            )
        Xa = X[:, self.active_features_]
        votes = np.zeros(len(Xa))
        out = np.zeros(len(Xa))
        idx = np.arange(len(Xa))
        for tree in self.trees_:
            _tree_votes(tree, Xa, out, idx)
            votes += out
        return votes / self.n_trees

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        p = self.onset_probability(X)
        return np.column_stack([1 - p, p])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.onset_probability(X) >= 0.5).astype(int)

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": {
                "n_trees": self.n_trees,
                "max_depth": self.max_depth,
                "min_samples_leaf": self.min_samples_leaf,
                "seed": self.seed,
            },
            "n_features_in": int(self.n_features_in_),
            "active_features": [int(i) for i in self.active_features_],
            "trees": self.trees_,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "OnsetForest":
        forest = cls(**data["params"])
        forest.n_features_in_ = data["n_features_in"]
        forest.active_features_ = np.array(data["active_features"], dtype=int)
        forest.trees_ = data["trees"]
        return forest


@dataclass
class ForestModel:
    """A trained forest plus the feature schema and extractor state it needs.

    The JSON file layout is documented in the README (format version 1).
    """

    variant: str
    feature_names: tuple[str, ...]
    forest: OnsetForest
    alpha_days: float
    extractor_state: dict[str, Any] = field(default_factory=dict)
    format_version: int = 1

    def save(self, path: str | Path) -> None:
        payload = {
            "format_version": self.format_version,
            "variant": self.variant,
            "feature_names": list(self.feature_names),
            "alpha_days": self.alpha_days,
            "extractor_state": self.extractor_state,
            "forest": self.forest.to_dict(),
        }
        Path(path).write_text(
            json.dumps(payload, sort_keys=True, separators=(",", ":")), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "ForestModel":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format_version") != 1:
            raise ValueError(f"unsupported model format: {payload.get('format_version')}")
        return cls(
            variant=payload["variant"],
            feature_names=tuple(payload["feature_names"]),
            forest=OnsetForest.from_dict(payload["forest"]),
            alpha_days=payload["alpha_days"],
            extractor_state=payload["extractor_state"],
        )


def stratified_folds(y: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """k folds preserving class proportions to within one row, seeded shuffle."""
    y = np.asarray(y, dtype=int)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x5F,)))
    folds: list[list[int]] = [[] for _ in range(k)]
    # One fold pointer shared across classes keeps total fold sizes within 1.
    cursor = 0
    for label in (0, 1):
        idx = np.flatnonzero(y == label)
        if len(idx) < k:
            raise ValueError(
                f"class {label} has only {len(idx)} rows; use k <= {len(idx)}"
            )
        idx = idx[rng.permutation(len(idx))]
        for row in idx:
            folds[cursor % k].append(int(row))
            cursor += 1
    return [np.array(sorted(f), dtype=int) for f in folds]


@dataclass
class CVResult:
    fold_precision: tuple[float, ...]
    fold_recall: tuple[float, ...]

    @property
    def mean_precision(self) -> float:
        return float(np.mean(self.fold_precision))

    @property
    def mean_recall(self) -> float:
        return float(np.mean(self.fold_recall))


def cross_validate(
    X: np.ndarray,
    y: np.ndarray,
    k: int = 10,
    seed: int = 0,
    n_trees: int = 100,
    max_depth: Optional[int] = None,
    min_samples_leaf: int = 1,
    n_jobs: int = 1,
) -> CVResult:
    """Stratified k-fold precision/recall for the onset class at threshold 0.5."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    folds = stratified_folds(y, k, seed)
    precisions = []
    recalls = []
    for i, test_idx in enumerate(folds):
        train_mask = np.ones(len(y), dtype=bool)
        train_mask[test_idx] = False
        forest = OnsetForest(
            n_trees=n_trees,
            max_depth=max_depth,
            min_samples_leaf=min_samples_leaf,
            seed=seed + 1 + i,
            n_jobs=n_jobs,
        )
        forest.fit(X[train_mask], y[train_mask])
        pred = forest.predict(X[test_idx])
        truth = y[test_idx]
        tp = int(((pred == 1) & (truth == 1)).sum())
        fp = int(((pred == 1) & (truth == 0)).sum())
        fn = int(((pred == 0) & (truth == 1)).sum())
        precisions.append(tp / (tp + fp) if tp + fp else 0.0)
        recalls.append(tp / (tp + fn) if tp + fn else 0.0)
    return CVResult(fold_precision=tuple(precisions), fold_recall=tuple(recalls))
