"""Native classifiers behind a uniform fit/predict contract."""

from __future__ import annotations

from ..errors import ConfigError
from .forest import DecisionTree, RandomForest, build_tree, gini_impurity
from .knn import KNearestNeighbors, knn_predict, knn_vote_fractions
from .logreg import LogisticRegression, logistic_gradient, logistic_loss, sigmoid
from .serialize import load_model, save_model

__all__ = [
    "DecisionTree",
    "KNearestNeighbors",
    "LogisticRegression",
    "RandomForest",
    "build_tree",
    "gini_impurity",
    "knn_predict",
    "knn_vote_fractions",
    "load_model",
    "logistic_gradient",
    "logistic_loss",
    "make_classifier",
    "save_model",
    "sigmoid",
]

_KINDS = ("logreg", "knn", "random_forest")


def make_classifier(kind: str, **params):
    """Instantiate a classifier by kind name with keyword parameters."""
    factories = {
        "logreg": LogisticRegression,
        "knn": KNearestNeighbors,
        "random_forest": RandomForest,
    }
    if kind not in factories:
        raise ConfigError(f"unknown classifier kind {kind!r}, expected one of {_KINDS}")
    try:
        return factories[kind](**params)
    except TypeError as exc:
        raise ConfigError(f"bad {kind} parameters: {exc}") from None
