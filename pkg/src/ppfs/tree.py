"""CART decision trees and per-sample loss functions.

The learner is the pluggable model behind the permutation independence test.
Fitting is fully deterministic: greedy gini (classification) or variance
reduction (regression) splits, with score ties broken by the lowest column
index and then the lowest threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import apply_tree, grow_classifier, grow_regressor
from .dataset import Dataset, TaskKind

# Predicted probabilities are clipped into [EPS_CLIP, 1 - EPS_CLIP] before
# taking log-loss, so pure leaves never produce infinite loss.
EPS_CLIP = 1e-15

_UNLIMITED_DEPTH = 2**31


class ModelError(ValueError):
    """Raised for invalid learner configuration or prediction inputs."""


@dataclass(frozen=True)
class LearnerSpec:
    """Hyperparameters of the built-in CART learner.

    ``seed`` is carried for interface uniformity with stochastic learners;
    the CART implementation itself is deterministic and does not consume it.
    """

    kind: str = "cart"
    max_depth: int | None = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind != "cart":
            raise ModelError(f"unknown learner kind {self.kind!r}")
        if self.max_depth is not None and self.max_depth < 1:
            raise ModelError("max_depth must be >= 1 or None for unlimited")
        if self.min_samples_split < 2:
            raise ModelError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ModelError("min_samples_leaf must be >= 1")
        if self.seed < 0:
            raise ModelError("seed must be non-negative")


@dataclass(frozen=True)
class FittedModel:
    """Flat-array tree: internal nodes test ``x[feature] <= threshold``.

    ``leaf_value`` holds a class-probability row per node for classification
    or a mean response per node for regression; ``feature[i] == -1`` marks a
    leaf.
    """

    task: TaskKind
    n_train: int
    n_features: int
    n_classes: int
    children_left: np.ndarray
    children_right: np.ndarray
    feature: np.ndarray
    threshold: np.ndarray
    leaf_value: np.ndarray
    node_samples: np.ndarray
    spec: LearnerSpec

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        best = 0
        for node in range(self.n_nodes):
            if self.feature[node] >= 0:
                for child in (self.children_left[node], self.children_right[node]):
                    depths[child] = depths[node] + 1
                    if depths[child] > best:
                        best = int(depths[child])
        return best


def fit(spec: LearnerSpec, train: Dataset) -> FittedModel:
    """Grow a CART tree on the full training dataset."""
    if train.n == 0:
        raise ModelError("cannot fit on an empty training set")
    X = np.ascontiguousarray(train.values)
    max_depth = spec.max_depth if spec.max_depth is not None else _UNLIMITED_DEPTH
    if train.task is TaskKind.CLASSIFICATION:
        n_classes = train.n_classes
        left, right, feat, thr, counts, node_n, _ = grow_classifier(
            X,
            np.ascontiguousarray(train.target),
            n_classes,
            max_depth,
            spec.min_samples_split,
            spec.min_samples_leaf,
        )
        leaf_value = counts / counts.sum(axis=1, keepdims=True)
    else:
        n_classes = 0
        left, right, feat, thr, leaf_value, node_n, _ = grow_regressor(
            X,
            np.ascontiguousarray(train.target),
            max_depth,
            spec.min_samples_split,
            spec.min_samples_leaf,
        )
    for arr in (left, right, feat, thr, leaf_value, node_n):
        arr.setflags(write=False)
    return FittedModel(
        task=train.task,
        n_train=train.n,
        n_features=train.d,
        n_classes=n_classes,
        children_left=left,
        children_right=right,
        feature=feat,
        threshold=thr,
        leaf_value=leaf_value,
        node_samples=node_n,
        spec=spec,
    )


def predict(model: FittedModel, X: Dataset | np.ndarray) -> np.ndarray:
    """One prediction per row: probability rows for classification, reals otherwise."""
    A = X.values if isinstance(X, Dataset) else np.ascontiguousarray(X, dtype=np.float64)
    if A.ndim != 2 or A.shape[1] != model.n_features:
        raise ModelError(
            f"prediction input has {A.shape[1] if A.ndim == 2 else '?'} columns, "
            f"model was trained on {model.n_features}"
        )
    A = np.ascontiguousarray(A)
    leaves = apply_tree(model.children_left, model.children_right, model.feature, model.threshold, A)
    return model.leaf_value[leaves]


def per_sample_loss(task: TaskKind, predictions, actual) -> np.ndarray:
    """Log-loss per row for classification, squared error for regression."""
    task = TaskKind(task)
    if task is TaskKind.CLASSIFICATION:
        probs = np.asarray(predictions, dtype=np.float64)
        labels = np.asarray(actual)
        if probs.ndim != 2 or probs.shape[0] != labels.shape[0]:
            raise ModelError("predictions and actual targets differ in length")
        if probs.size:
            sums = probs.sum(axis=1)
            if np.any(np.abs(sums - 1.0) > 1e-9):
                raise ModelError("probability rows must sum to 1 within 1e-9")
        labels = labels.astype(np.int64)
        if probs.size and (labels.min() < 0 or labels.max() >= probs.shape[1]):
            raise ModelError("class label outside the prediction row width")
        p_true = probs[np.arange(probs.shape[0]), labels] if probs.size else np.empty(0)
        return -np.log(np.clip(p_true, EPS_CLIP, 1.0 - EPS_CLIP))
    preds = np.asarray(predictions, dtype=np.float64).ravel()
    actual = np.asarray(actual, dtype=np.float64).ravel()
    if preds.shape != actual.shape:
        raise ModelError("predictions and actual targets differ in length")
    diff = preds - actual
    return diff * diff


def empirical_risk(loss: np.ndarray) -> float:
    """Mean per-sample loss over a held-out partition."""
    loss = np.asarray(loss, dtype=np.float64)
    if loss.size == 0:
        raise ModelError("empirical risk of an empty loss vector is undefined")
    return float(np.mean(loss))


def render_tree(model: FittedModel, names: tuple[str, ...] | None = None) -> str:
    """Indented text dump of a fitted tree, for debugging."""
    lines: list[str] = []

    def descend(node: int, indent: int) -> None:
        pad = "  " * indent
        if model.feature[node] < 0:
            if model.task is TaskKind.CLASSIFICATION:
                payload = "p=[" + ", ".join(f"{v:.4g}" for v in model.leaf_value[node]) + "]"
            else:
                payload = f"value={model.leaf_value[node]:.6g}"
            lines.append(f"{pad}leaf {payload} n={model.node_samples[node]}")
            return
        col = int(model.feature[node])
        label = names[col] if names is not None else f"x{col}"
        lines.append(f"{pad}{label} <= {model.threshold[node]:.6g} n={model.node_samples[node]}")
        descend(int(model.children_left[node]), indent + 1)
        descend(int(model.children_right[node]), indent + 1)

    descend(0, 0)
    return "\n".join(lines)
