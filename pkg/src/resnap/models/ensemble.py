"""Random forest over the CART base learner."""
from __future__ import annotations

import math

import numpy as np

from ..errors import ValidationError
from ..seeding import derive_seed
from .tree import DecisionTree


class RandomForest:
    """Bagged CART trees with per-node feature subsampling.

    Prediction is a plurality vote over the trees; vote ties resolve to
    the lowest class id. With ``bootstrap=False``, ``n_estimators=1`` and
    ``max_features=None`` the forest reduces exactly to a single tree.
    """

    def __init__(
        self,
        n_estimators: int = 100,
        max_depth: int | None = None,
        min_samples_split: int = 2,
        min_samples_leaf: int = 1,
        bootstrap: bool = True,
        max_features: int | str | None = "sqrt",
        seed: int = 0,
    ):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.bootstrap = bootstrap
        self.max_features = max_features
        self.seed = seed
        self.classes_: np.ndarray | None = None
        self.trees_: list[DecisionTree] = []

    def _features_per_node(self, n_features: int) -> int | None:
        if self.max_features == "sqrt":
            return max(1, round(math.sqrt(n_features)))
        return self.max_features

    def fit(self, X, y) -> "RandomForest":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        if X.shape[0] == 0:
            raise ValidationError("training data must be non-empty")
        self.classes_ = np.unique(y)
        n = X.shape[0]
        per_node = self._features_per_node(X.shape[1])
        self.trees_ = []
        for i in range(self.n_estimators):
            if self.bootstrap:
                rng = np.random.default_rng(derive_seed(self.seed, "bootstrap", i))
                idx = rng.integers(0, n, size=n)
                Xi, yi = X[idx], y[idx]
            else:
                Xi, yi = X, y
            tree = DecisionTree(
                max_depth=self.max_depth,
                min_samples_split=self.min_samples_split,
                min_samples_leaf=self.min_samples_leaf,
                max_features=per_node,
                seed=derive_seed(self.seed, "features", i),
            )
            self.trees_.append(tree.fit(Xi, yi))
        return self

    def predict(self, X) -> np.ndarray:
        if not self.trees_:
            raise ValidationError("model is not fitted")
        X = np.asarray(X, dtype=float)
        votes = np.zeros((X.shape[0], len(self.classes_)), dtype=np.int64)
        for tree in self.trees_:
            preds = tree.predict(X)
            votes[np.arange(X.shape[0]), np.searchsorted(self.classes_, preds)] += 1
        return self.classes_[np.argmax(votes, axis=1)]

    def to_dict(self) -> dict:
        return {
            "kind": "forest",
            "seed": self.seed,
            "params": {
                "n_estimators": self.n_estimators,
                "max_depth": self.max_depth,
                "min_samples_split": self.min_samples_split,
                "min_samples_leaf": self.min_samples_leaf,
                "bootstrap": self.bootstrap,
                "max_features": self.max_features,
            },
            "classes": [int(c) for c in self.classes_],
            "trees": [tree.to_dict() for tree in self.trees_],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RandomForest":
        model = cls(seed=payload["seed"], **payload["params"])
        model.classes_ = np.array(payload["classes"], dtype=np.int64)
        model.trees_ = [DecisionTree.from_dict(t) for t in payload["trees"]]
        return model
