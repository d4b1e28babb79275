from __future__ import annotations

import json

import numpy as np
import pytest

from resnap import ValidationError
from resnap.models import (
    DecisionTree,
    GradientBoostedTrees,
    MajorityClassifier,
    RandomForest,
)

from oracles import brute_force_root_split


# --- majority baseline ------------------------------------------------------


def test_majority_predicts_most_frequent():
    model = MajorityClassifier().fit(np.zeros((3, 1)), [0, 0, 1])
    assert model.predict(np.zeros((4, 1))).tolist() == [0, 0, 0, 0]


def test_majority_all_equal():
    model = MajorityClassifier().fit(np.zeros((2, 1)), [7, 7])
    assert model.predict(np.zeros((1, 1))).tolist() == [7]


def test_majority_tie_takes_lowest_id():
    # ids are assigned lexicographically, so the lowest id decodes to "A"
    model = MajorityClassifier().fit(np.zeros((2, 1)), [1, 0])
    assert model.predict(np.zeros((1, 1))).tolist() == [0]


def test_majority_empty_raises():
    with pytest.raises(ValidationError):
        MajorityClassifier().fit(np.zeros((0, 1)), [])


# --- decision tree -----------------------------------------------------------


def test_tree_single_midpoint_split():
    X = np.array([[0.0], [1.0]])
    tree = DecisionTree().fit(X, [0, 1])
    assert tree.root_split() == (0, 0.5)
    assert tree.predict(X).tolist() == [0, 1]


def test_tree_pure_labels_single_leaf():
    X = np.array([[0.0], [1.0], [2.0]])
    tree = DecisionTree().fit(X, [3, 3, 3])
    assert tree.root_split() is None
    assert tree.predict(X).tolist() == [3, 3, 3]


def test_tree_matches_brute_force_on_small_instance():
    X = np.array([[0.0, 3.0], [1.0, 2.0], [2.0, 1.0], [3.0, 0.0]])
    y = np.array([0, 0, 1, 1])
    tree = DecisionTree().fit(X, y)
    assert tree.root_split() == brute_force_root_split(X, y)


def test_tree_tie_breaks_to_lowest_feature_and_threshold():
    # both features separate the labels equally well
    X = np.array([[0.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1])
    tree = DecisionTree().fit(X, y)
    assert tree.root_split() == (0, 0.5)


def test_tree_respects_max_depth():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 1, 0, 1])
    tree = DecisionTree(max_depth=0).fit(X, y)
    assert tree.root_split() is None


def test_tree_min_samples_leaf_blocks_unbalanced_split():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 1, 1, 1])
    tree = DecisionTree(min_samples_leaf=2).fit(X, y)
    split = tree.root_split()
    assert split is not None
    mask = X[:, split[0]] <= split[1]
    assert mask.sum() >= 2 and (~mask).sum() >= 2


def test_tree_empty_data_raises():
    with pytest.raises(ValidationError):
        DecisionTree().fit(np.zeros((0, 2)), [])


def test_tree_predictions_stay_in_label_space():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(40, 3))
    y = rng.integers(5, 8, size=40)
    tree = DecisionTree(max_depth=3).fit(X, y)
    assert set(tree.predict(rng.normal(size=(200, 3)))) <= set(y.tolist())


def test_tree_json_round_trip():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(30, 2))
    y = rng.integers(0, 3, size=30)
    tree = DecisionTree(max_depth=4).fit(X, y)
    clone = DecisionTree.from_dict(json.loads(json.dumps(tree.to_dict())))
    probe = rng.normal(size=(50, 2))
    assert clone.predict(probe).tolist() == tree.predict(probe).tolist()


# --- random forest -------------------------------------------------------------


def test_forest_degenerate_case_equals_tree():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(25, 3))
    y = rng.integers(0, 3, size=25)
    forest = RandomForest(
        n_estimators=1, bootstrap=False, max_features=None, seed=9
    ).fit(X, y)
    tree = DecisionTree().fit(X, y)
    probe = rng.normal(size=(100, 3))
    assert forest.predict(probe).tolist() == tree.predict(probe).tolist()


def test_forest_same_seed_same_predictions():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(30, 4))
    y = rng.integers(0, 2, size=30)
    probe = rng.normal(size=(60, 4))
    first = RandomForest(n_estimators=5, seed=42).fit(X, y).predict(probe)
    second = RandomForest(n_estimators=5, seed=42).fit(X, y).predict(probe)
    assert first.tolist() == second.tolist()


def test_forest_separable_blobs_reach_training_accuracy():
    rng = np.random.default_rng(8)
    X = np.vstack(
        [rng.normal(loc=-3.0, size=(100, 2)), rng.normal(loc=3.0, size=(100, 2))]
    )
    y = np.array([0] * 100 + [1] * 100)
    # brute-force oracle confirms a single split already separates the blobs
    split = brute_force_root_split(X, y)
    mask = X[:, split[0]] <= split[1]
    majority_acc = max(
        np.mean(np.where(mask, 0, 1) == y), np.mean(np.where(mask, 1, 0) == y)
    )
    assert majority_acc >= 0.95
    forest = RandomForest(n_estimators=10, seed=1).fit(X, y)
    assert np.mean(forest.predict(X) == y) >= 0.95


def test_forest_json_round_trip():
    rng = np.random.default_rng(13)
    X = rng.normal(size=(30, 3))
    y = rng.integers(0, 3, size=30)
    forest = RandomForest(n_estimators=3, max_depth=3, seed=2).fit(X, y)
    clone = RandomForest.from_dict(json.loads(json.dumps(forest.to_dict())))
    probe = rng.normal(size=(40, 3))
    assert clone.predict(probe).tolist() == forest.predict(probe).tolist()


# --- gradient boosting -----------------------------------------------------------


def test_boosting_single_class_constant_prediction():
    X = np.arange(6, dtype=float).reshape(-1, 1)
    model = GradientBoostedTrees(n_estimators=5).fit(X, [4] * 6)
    assert model.predict(X).tolist() == [4] * 6


def test_boosting_learns_1d_threshold():
    rng = np.random.default_rng(17)
    X = np.concatenate([rng.uniform(-2, -0.1, 60), rng.uniform(0.1, 2, 60)]).reshape(-1, 1)
    y = np.array([0] * 60 + [1] * 60)
    model = GradientBoostedTrees(n_estimators=50, max_depth=2, learning_rate=0.1, seed=3)
    model.fit(X, y)
    assert np.mean(model.predict(X) == y) >= 0.95


def test_boosting_zero_learning_rate_predicts_prior_argmax():
    X = np.arange(6, dtype=float).reshape(-1, 1)
    y = np.array([0, 1, 1, 1, 2, 2])
    model = GradientBoostedTrees(n_estimators=5, learning_rate=0.0).fit(X, y)
    assert model.predict(X).tolist() == [1] * 6


def test_boosting_log_loss_non_increasing_on_separable_data():
    rng = np.random.default_rng(23)
    X = np.vstack(
        [rng.normal(loc=-4.0, size=(40, 2)), rng.normal(loc=4.0, size=(40, 2))]
    )
    y = np.array([0] * 40 + [1] * 40)
    model = GradientBoostedTrees(n_estimators=30, max_depth=3, learning_rate=0.1, seed=7)
    model.fit(X, y)
    losses = model.train_log_loss_
    assert len(losses) == 31
    for before, after in zip(losses, losses[1:]):
        assert after <= before + 1e-9


def test_boosting_subsampling_stays_deterministic():
    rng = np.random.default_rng(29)
    X = rng.normal(size=(50, 4))
    y = rng.integers(0, 3, size=50)
    kwargs = dict(n_estimators=8, max_depth=3, subsample=0.8, colsample=0.8, seed=11)
    probe = rng.normal(size=(80, 4))
    first = GradientBoostedTrees(**kwargs).fit(X, y).predict(probe)
    second = GradientBoostedTrees(**kwargs).fit(X, y).predict(probe)
    assert first.tolist() == second.tolist()


def test_boosting_predictions_stay_in_label_space():
    rng = np.random.default_rng(31)
    X = rng.normal(size=(40, 2))
    y = rng.integers(2, 5, size=40)
    model = GradientBoostedTrees(n_estimators=5, max_depth=2, seed=1).fit(X, y)
    assert set(model.predict(rng.normal(size=(100, 2)))) <= set(y.tolist())


def test_boosting_json_round_trip():
    rng = np.random.default_rng(37)
    X = rng.normal(size=(40, 3))
    y = rng.integers(0, 3, size=40)
    model = GradientBoostedTrees(n_estimators=4, max_depth=2, seed=5).fit(X, y)
    clone = GradientBoostedTrees.from_dict(json.loads(json.dumps(model.to_dict())))
    probe = rng.normal(size=(60, 3))
    assert clone.predict(probe).tolist() == model.predict(probe).tolist()
