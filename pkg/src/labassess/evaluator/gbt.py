"""Gradient-boosted regression trees, built from scratch on numpy.

Squared-error boosting: start from the target mean, then stage-wise fit
depth-limited regression trees to the current residuals. Splits are exact
greedy variance-reduction searches over midpoints of sorted unique feature
values, with ties broken by lowest feature index then lowest threshold,
so training is fully deterministic for a fixed (row order, config, seed).
Row and feature subsampling per round use a seeded generator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .features import FEATURE_NAMES, FEATURE_SCHEMA_VERSION, FeatureVector

MODEL_FORMAT = "gbt-regressor"
MODEL_FORMAT_VERSION = 1

_MIN_GAIN = 1e-12


class TooFewRowsError(ValueError):
    pass


class NonFiniteFeatureError(ValueError):
    pass


class SchemaMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class GbtConfig:
    n_trees: int = 500
    max_depth: int = 6
    learning_rate: float = 0.05
    subsample: float = 0.8
    colsample: float = 0.8
    min_rows_per_leaf: int = 2

    def __post_init__(self):
        if self.n_trees < 0:
            raise ValueError("n_trees must be nonnegative")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not (0.0 < self.learning_rate <= 1.0):
            raise ValueError("learning_rate must lie in (0,1]")
        for name in ("subsample", "colsample"):
            value = getattr(self, name)
            if not (0.0 < value <= 1.0):
                raise ValueError(f"{name} must lie in (0,1]")


@dataclass(frozen=True)
class TreeNode:
    """Internal split (feature/threshold/children) or leaf (value)."""

    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"leaf": self.value}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "TreeNode":
        if "leaf" in obj:
            return cls(value=float(obj["leaf"]))
        return cls(
            feature=int(obj["feature"]),
            threshold=float(obj["threshold"]),
            left=cls.from_dict(obj["left"]),
            right=cls.from_dict(obj["right"]),
        )

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())


@dataclass(frozen=True)
class GbtModel:
    trees: tuple[TreeNode, ...]
    base_prediction: float
    learning_rate: float
    n_trees: int
    max_depth: int
    subsample: float
    colsample: float
    seed: int
    feature_schema_version: int = FEATURE_SCHEMA_VERSION


def _find_best_split(
    X: np.ndarray,
    residuals: np.ndarray,
    features: Sequence[int],
    min_leaf: int,
) -> tuple[float, int, float] | None:
    """Exact greedy search; returns (gain, feature, threshold) or None.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values. Strictly-better gain wins, so earlier features and smaller
    thresholds take precedence on ties.
    """
    n = len(residuals)
    if n < 2 * min_leaf:
        return None
    total = float(residuals.sum())
    total_sq = float((residuals * residuals).sum())
    parent_sse = total_sq - total * total / n

    best: tuple[float, int, float] | None = None
    for feature in features:
        values = X[:, feature]
        order = np.argsort(values, kind="stable")
        sv = values[order]
        if sv[0] == sv[-1]:
            continue
        sr = residuals[order]
        csum = np.cumsum(sr)
        csq = np.cumsum(sr * sr)

        positions = np.arange(1, n)
        valid = (sv[1:] != sv[:-1]) & (positions >= min_leaf) & ((n - positions) >= min_leaf)
        if not valid.any():
            continue
        left_n = positions[valid].astype(np.float64)
        left_sum = csum[:-1][valid]
        left_sq = csq[:-1][valid]
        right_n = n - left_n
        left_sse = left_sq - left_sum * left_sum / left_n
        right_sse = (total_sq - left_sq) - (total - left_sum) ** 2 / right_n
        gains = parent_sse - (left_sse + right_sse)

        pick = int(np.argmax(gains))  # first occurrence == lowest threshold
        gain = float(gains[pick])
        if gain > _MIN_GAIN and (best is None or gain > best[0]):
            split_at = int(positions[valid][pick])
            threshold = float((sv[split_at - 1] + sv[split_at]) / 2.0)
            best = (gain, int(feature), threshold)
    return best


def _build_tree(
    X: np.ndarray,
    residuals: np.ndarray,
    features: Sequence[int],
    depth_left: int,
    min_leaf: int,
) -> TreeNode:
    if depth_left == 0:
        return TreeNode(value=float(residuals.mean()))
    split = _find_best_split(X, residuals, features, min_leaf)
    if split is None:
        return TreeNode(value=float(residuals.mean()))
    _, feature, threshold = split
    mask = X[:, feature] < threshold
    return TreeNode(
        feature=feature,
        threshold=threshold,
        left=_build_tree(X[mask], residuals[mask], features, depth_left - 1, min_leaf),
        right=_build_tree(X[~mask], residuals[~mask], features, depth_left - 1, min_leaf),
    )


def _apply_tree(node: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0], dtype=np.float64)
    stack = [(node, np.arange(X.shape[0]))]
    while stack:
        current, idx = stack.pop()
        if current.is_leaf:
            out[idx] = current.value
            continue
        mask = X[idx, current.feature] < current.threshold
        stack.append((current.left, idx[mask]))
        stack.append((current.right, idx[~mask]))
    return out


def _rows_to_arrays(rows: Sequence[tuple[FeatureVector, float]]) -> tuple[np.ndarray, np.ndarray]:
    X = np.array([fv.to_array() for fv, _ in rows], dtype=np.float64)
    y = np.array([target for _, target in rows], dtype=np.float64)
    if X.size and not np.isfinite(X).all():
        raise NonFiniteFeatureError("feature matrix contains non-finite values")
    if y.size and (not np.isfinite(y).all() or y.min() < 0 or y.max() > 100):
        raise ValueError("targets must be finite and lie in [0,100]")
    return X, y


def train_gbt(
    rows: Sequence[tuple[FeatureVector, float]],
    config: GbtConfig | None = None,
    seed: int = 42,
) -> GbtModel:
    """Fit the boosted ensemble; deterministic for fixed rows/config/seed."""
    config = config or GbtConfig()
    if len(rows) < 2:
        raise TooFewRowsError(f"need at least 2 rows, got {len(rows)}")
    X, y = _rows_to_arrays(rows)
    n, d = X.shape
    rng = np.random.default_rng(seed)

    base = float(y.mean())
    predictions = np.full(n, base, dtype=np.float64)
    trees: list[TreeNode] = []
    for _ in range(config.n_trees):
        if config.subsample < 1.0:
            m = max(2, int(n * config.subsample))
            row_idx = np.sort(rng.choice(n, size=m, replace=False))
        else:
            row_idx = np.arange(n)
        if config.colsample < 1.0:
            k = max(1, int(d * config.colsample))
            features = np.sort(rng.choice(d, size=k, replace=False))
        else:
            features = np.arange(d)

        residuals = y - predictions
        tree = _build_tree(
            X[row_idx], residuals[row_idx], features, config.max_depth, config.min_rows_per_leaf
        )
        predictions += config.learning_rate * _apply_tree(tree, X)
        trees.append(tree)

    return GbtModel(
        trees=tuple(trees),
        base_prediction=base,
        learning_rate=config.learning_rate,
        n_trees=config.n_trees,
        max_depth=config.max_depth,
        subsample=config.subsample,
        colsample=config.colsample,
        seed=seed,
    )


def predict_matrix(model: GbtModel, X: np.ndarray) -> np.ndarray:
    """Unclamped ensemble output for a feature matrix."""
    out = np.full(X.shape[0], model.base_prediction, dtype=np.float64)
    for tree in model.trees:
        out += model.learning_rate * _apply_tree(tree, X)
    return out


def predict(model: GbtModel, fv: FeatureVector) -> float:
    """base + lr * sum of routed leaves, clamped to [0,100]."""
    if fv.schema_version != model.feature_schema_version:
        raise SchemaMismatchError(
            f"feature schema {fv.schema_version} != model schema {model.feature_schema_version}"
        )
    raw = float(predict_matrix(model, fv.to_array().reshape(1, -1))[0])
    return min(100.0, max(0.0, raw))


@dataclass(frozen=True)
class CvReport:
    fold_rmse: tuple[float, ...]
    mean_rmse: float
    pooled_rmse: float
    r_squared: float
    errors: tuple[float, ...]  # predicted - actual, aligned to input row order
    predictions: tuple[float, ...]


def cross_validate(
    rows: Sequence[tuple[FeatureVector, float]],
    config: GbtConfig | None = None,
    k: int = 5,
    seed: int = 42,
) -> CvReport:
    """Seeded shuffle + contiguous fold split; every row predicted exactly once."""
    config = config or GbtConfig()
    if k < 2:
        raise ValueError("k must be >= 2")
    if len(rows) < k:
        raise TooFewRowsError(f"need at least {k} rows for {k} folds, got {len(rows)}")
    n = len(rows)
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    folds = np.array_split(order, k)

    predictions = np.zeros(n, dtype=np.float64)
    actuals = np.array([target for _, target in rows], dtype=np.float64)
    fold_rmse: list[float] = []
    for fold in folds:
        held_out = set(int(i) for i in fold)
        train_rows = [rows[int(i)] for i in order if int(i) not in held_out]
        model = train_gbt(train_rows, config, seed)
        fold_sq = []
        for i in fold:
            predicted = predict(model, rows[int(i)][0])
            predictions[int(i)] = predicted
            fold_sq.append((predicted - actuals[int(i)]) ** 2)
        fold_rmse.append(math.sqrt(sum(fold_sq) / len(fold_sq)))

    errors = predictions - actuals
    sse = float((errors**2).sum())
    sst = float(((actuals - actuals.mean()) ** 2).sum())
    r_squared = 1.0 - sse / sst if sst > 0 else 0.0
    return CvReport(
        fold_rmse=tuple(fold_rmse),
        mean_rmse=sum(fold_rmse) / len(fold_rmse),
        pooled_rmse=math.sqrt(sse / n),
        r_squared=r_squared,
        errors=tuple(float(e) for e in errors),
        predictions=tuple(float(p) for p in predictions),
    )


def model_to_json(model: GbtModel) -> str:
    """Canonical (byte-stable) JSON dump of the trained ensemble."""
    document = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "feature_schema_version": model.feature_schema_version,
        "feature_names": list(FEATURE_NAMES),
        "base_prediction": model.base_prediction,
        "learning_rate": model.learning_rate,
        "n_trees": model.n_trees,
        "max_depth": model.max_depth,
        "subsample": model.subsample,
        "colsample": model.colsample,
        "seed": model.seed,
        "trees": [tree.to_dict() for tree in model.trees],
    }
    return json.dumps(document, sort_keys=True, separators=(",", ":"))


def model_from_json(text: str) -> GbtModel:
    obj = json.loads(text)
    if obj.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a {MODEL_FORMAT} document")
    return GbtModel(
        trees=tuple(TreeNode.from_dict(t) for t in obj["trees"]),
        base_prediction=float(obj["base_prediction"]),
        learning_rate=float(obj["learning_rate"]),
        n_trees=int(obj["n_trees"]),
        max_depth=int(obj["max_depth"]),
        subsample=float(obj["subsample"]),
        colsample=float(obj["colsample"]),
        seed=int(obj["seed"]),
        feature_schema_version=int(obj["feature_schema_version"]),
    )


def save_model(model: GbtModel, path: str | Path) -> None:
    Path(path).write_text(model_to_json(model), encoding="utf-8")


def load_model(path: str | Path) -> GbtModel:
    return model_from_json(Path(path).read_text(encoding="utf-8"))
