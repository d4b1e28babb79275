"""Greedy CART-style decision tree and the majority baseline.

Split candidates are the midpoints of consecutive distinct sorted values
per feature. Minimising the weighted Gini impurity of a split equals
maximising, over the two children, the sum of squared class counts
divided by the child size. That score is a small-integer rational, so
near-optimal candidates are re-compared with exact integer arithmetic:
ties always resolve to the lowest feature index, then the lowest
threshold, which keeps training fully deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError

# float pre-filter window; exact integer comparison decides inside it
_NEAR_RTOL = 1e-7


@dataclass
class _Node:
    counts: np.ndarray
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


def _split_candidates(
    X: np.ndarray,
    codes: np.ndarray,
    n_classes: int,
    feature_ids: np.ndarray,
    min_samples_leaf: int,
):
    """Yield per-feature candidate stats: (feature, thresholds, num, den).

    ``num / den`` is the exact split score (higher is better); both are
    int64 arrays aligned with ``thresholds``.
    """
    n = X.shape[0]
    rows = np.arange(n)
    for f in feature_ids:
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        ys = codes[order]
        cut = np.nonzero(xs[:-1] < xs[1:])[0]
        if cut.size == 0:
            continue
        left_n = cut + 1
        right_n = n - left_n
        if min_samples_leaf > 1:
            ok = (left_n >= min_samples_leaf) & (right_n >= min_samples_leaf)
            cut, left_n, right_n = cut[ok], left_n[ok], right_n[ok]
            if cut.size == 0:
                continue
        onehot = np.zeros((n, n_classes), dtype=np.int64)
        onehot[rows, ys] = 1
        cum = np.cumsum(onehot, axis=0)
        left_counts = cum[cut]
        right_counts = cum[-1] - left_counts
        sq_left = np.einsum("ij,ij->i", left_counts, left_counts)
        sq_right = np.einsum("ij,ij->i", right_counts, right_counts)
        num = sq_left * right_n + sq_right * left_n
        den = left_n * right_n
        thresholds = (xs[cut] + xs[cut + 1]) / 2.0
        # midpoint can round up to the right value for adjacent floats
        bad = thresholds >= xs[cut + 1]
        thresholds[bad] = xs[cut][bad]
        yield int(f), thresholds, num, den


def _best_split(
    X: np.ndarray,
    codes: np.ndarray,
    n_classes: int,
    feature_ids: np.ndarray,
    min_samples_leaf: int,
) -> tuple[int, float] | None:
    best: tuple[int, float] | None = None
    best_num = best_den = 0  # exact python ints
    for f, thresholds, num, den in _split_candidates(
        X, codes, n_classes, feature_ids, min_samples_leaf
    ):
        score = num / den
        top = score.max()
        near = np.nonzero(score >= top - abs(top) * _NEAR_RTOL)[0]
        for i in near:  # ascending threshold order within the feature
            num_i, den_i = int(num[i]), int(den[i])
            if best is None or num_i * best_den > best_num * den_i:
                best = (f, float(thresholds[i]))
                best_num, best_den = num_i, den_i
    return best


class DecisionTree:
    """CART classifier with optional per-node feature subsampling."""

    def __init__(
        self,
        max_depth: int | None = None,
        min_samples_split: int = 2,
        min_samples_leaf: int = 1,
        max_features: int | None = None,
        seed: int = 0,
    ):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.seed = seed
        self.classes_: np.ndarray | None = None
        self._root: _Node | None = None

    def fit(self, X, y) -> "DecisionTree":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValidationError("training data must be a non-empty 2-D matrix")
        if X.shape[0] != y.shape[0]:
            raise ValidationError("X and y must have equal length")
        self.classes_ = np.unique(y)
        codes = np.searchsorted(self.classes_, y)
        rng = np.random.default_rng(self.seed)
        self._root = self._grow(X, codes, depth=0, rng=rng)
        return self

    def _grow(self, X: np.ndarray, codes: np.ndarray, depth: int, rng) -> _Node:
        counts = np.bincount(codes, minlength=len(self.classes_))
        node = _Node(counts=counts)
        n = X.shape[0]
        if (
            (self.max_depth is not None and depth >= self.max_depth)
            or n < self.min_samples_split
            or np.count_nonzero(counts) <= 1
        ):
            return node
        n_features = X.shape[1]
        if self.max_features is not None and self.max_features < n_features:
            feature_ids = np.sort(
                rng.choice(n_features, size=self.max_features, replace=False)
            )
        else:
            feature_ids = np.arange(n_features)
        split = _best_split(
            X, codes, len(self.classes_), feature_ids, self.min_samples_leaf
        )
        if split is None:
            return node
        node.feature, node.threshold = split
        mask = X[:, node.feature] <= node.threshold
        node.left = self._grow(X[mask], codes[mask], depth + 1, rng)
        node.right = self._grow(X[~mask], codes[~mask], depth + 1, rng)
        return node

    def predict(self, X) -> np.ndarray:
        if self._root is None:
            raise ValidationError("model is not fitted")
        X = np.asarray(X, dtype=float)
        out = np.empty(X.shape[0], dtype=np.int64)
        self._assign(self._root, X, np.arange(X.shape[0]), out)
        return self.classes_[out]

    def _assign(self, node: _Node, X: np.ndarray, idx: np.ndarray, out: np.ndarray) -> None:
        if node.is_leaf:
            out[idx] = int(np.argmax(node.counts))  # first max = lowest class id
            return
        mask = X[idx, node.feature] <= node.threshold
        self._assign(node.left, X, idx[mask], out)
        self._assign(node.right, X, idx[~mask], out)

    def root_split(self) -> tuple[int, float] | None:
        """The fitted root's (feature, threshold), or None for a leaf root."""
        if self._root is None:
            raise ValidationError("model is not fitted")
        if self._root.is_leaf:
            return None
        return self._root.feature, self._root.threshold

    def to_dict(self) -> dict:
        return {
            "kind": "tree",
            "seed": self.seed,
            "params": {
                "max_depth": self.max_depth,
                "min_samples_split": self.min_samples_split,
                "min_samples_leaf": self.min_samples_leaf,
                "max_features": self.max_features,
            },
            "classes": [int(c) for c in self.classes_],
            "root": _node_to_dict(self._root),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "DecisionTree":
        model = cls(seed=payload["seed"], **payload["params"])
        model.classes_ = np.array(payload["classes"], dtype=np.int64)
        model._root = _node_from_dict(payload["root"])
        return model


def _node_to_dict(node: _Node) -> dict:
    if node.is_leaf:
        return {"counts": [int(c) for c in node.counts]}
    return {
        "counts": [int(c) for c in node.counts],
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(payload: dict) -> _Node:
    node = _Node(counts=np.array(payload["counts"], dtype=np.int64))
    if "feature" in payload:
        node.feature = payload["feature"]
        node.threshold = payload["threshold"]
        node.left = _node_from_dict(payload["left"])
        node.right = _node_from_dict(payload["right"])
    return node


class MajorityClassifier:
    """Always predicts the most frequent training label.

    Frequency ties resolve to the lowest label id, which is the
    lexicographically smallest decoded activity because the label
    encoder assigns ids in lexicographic order.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.classes_: np.ndarray | None = None
        self.label_: int | None = None

    def fit(self, X, y) -> "MajorityClassifier":
        y = np.asarray(y)
        if y.shape[0] == 0:
            raise ValidationError("targets must be non-empty")
        self.classes_, counts = np.unique(y, return_counts=True)
        self.label_ = int(self.classes_[counts == counts.max()].min())
        return self

    def predict(self, X) -> np.ndarray:
        if self.label_ is None:
            raise ValidationError("model is not fitted")
        return np.full(np.asarray(X).shape[0], self.label_, dtype=np.int64)

    def to_dict(self) -> dict:
        return {
            "kind": "majority",
            "seed": self.seed,
            "classes": [int(c) for c in self.classes_],
            "label": self.label_,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MajorityClassifier":
        model = cls(seed=payload["seed"])
        model.classes_ = np.array(payload["classes"], dtype=np.int64)
        model.label_ = payload["label"]
        return model
