"""Native classifiers and the grid-search harness."""
from .boosting import GradientBoostedTrees
from .ensemble import RandomForest
from .search import (
    CVOutcome,
    DEFAULT_GRIDS,
    GRADIENT_BOOSTING_GRID,
    MODEL_KINDS,
    RANDOM_FOREST_GRID,
    expand_grid,
    grid_search_cv,
    make_classifier,
    normalize_depth,
    stratified_kfold,
)
from .tree import DecisionTree, MajorityClassifier

__all__ = [
    "CVOutcome",
    "DEFAULT_GRIDS",
    "DecisionTree",
    "GradientBoostedTrees",
    "GRADIENT_BOOSTING_GRID",
    "MajorityClassifier",
    "MODEL_KINDS",
    "RandomForest",
    "RANDOM_FOREST_GRID",
    "expand_grid",
    "grid_search_cv",
    "make_classifier",
    "normalize_depth",
    "stratified_kfold",
]
