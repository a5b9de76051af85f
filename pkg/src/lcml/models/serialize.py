"""Trained-model persistence.

Format ``lcml-model/1``: one NumPy ``.npz`` archive per model. Common
keys are ``format``, ``variant`` and ``n_features``; per variant:

* ``logreg``  — ``weights`` (float64, width), ``bias``, ``converged``,
  ``iters_used``.
* ``knn``     — ``k``, ``train_X`` (float64 matrix), ``train_y``.
* ``forest``  — ``n_trees``, ``tree_offsets`` (n_trees + 1 node offsets)
  and the per-node arrays ``feature``, ``threshold``, ``left``,
  ``right``, ``n0``, ``n1`` concatenated over trees, child links local
  to each tree.

Arrays are stored in native float64/int64 binary, so a load/save round
trip is bit-exact and reloaded models predict identically.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import SchemaError
from .forest import DecisionTree, RandomForest
from .knn import KNearestNeighbors
from .logreg import LogisticRegression

__all__ = ["FORMAT", "load_model", "save_model"]

FORMAT = "lcml-model/1"


def save_model(model, path: str | Path) -> None:
    """Write a fitted model to ``path`` (npz archive)."""
    path = Path(path)
    if isinstance(model, LogisticRegression):
        if model.weights is None:
            raise SchemaError("cannot save an unfitted model")
        np.savez(
            path,
            format=FORMAT,
            variant="logreg",
            n_features=np.int64(model.weights.shape[0]),
            weights=model.weights,
            bias=np.float64(model.bias),
            converged=np.bool_(model.converged),
            iters_used=np.int64(model.iters_used),
        )
    elif isinstance(model, KNearestNeighbors):
        if model.train_X is None:
            raise SchemaError("cannot save an unfitted model")
        np.savez(
            path,
            format=FORMAT,
            variant="knn",
            n_features=np.int64(model.train_X.shape[1]),
            k=np.int64(model.k),
            train_X=model.train_X,
            train_y=model.train_y,
        )
    elif isinstance(model, RandomForest):
        if not model.trees:
            raise SchemaError("cannot save an unfitted model")
        offsets = np.zeros(len(model.trees) + 1, dtype=np.int64)
        for i, tree in enumerate(model.trees):
            offsets[i + 1] = offsets[i] + tree.n_nodes
        np.savez(
            path,
            format=FORMAT,
            variant="forest",
            n_features=np.int64(model.n_features),
            n_trees=np.int64(model.n_trees),
            tree_offsets=offsets,
            feature=np.concatenate([t.feature for t in model.trees]),
            threshold=np.concatenate([t.threshold for t in model.trees]),
            left=np.concatenate([t.left for t in model.trees]),
            right=np.concatenate([t.right for t in model.trees]),
            n0=np.concatenate([t.n0 for t in model.trees]),
            n1=np.concatenate([t.n1 for t in model.trees]),
        )
    else:
        raise SchemaError(f"cannot serialize {type(model).__name__}")


def load_model(path: str | Path):
    """Reconstruct a fitted model saved by `save_model`."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"model file not found: {path}")
    with np.load(path) as data:
        keys = set(data.files)
        if "format" not in keys or str(data["format"]) != FORMAT:
            raise SchemaError(f"{path}: not a {FORMAT} file")
        variant = str(data["variant"])
        if variant == "logreg":
            model = LogisticRegression()
            model.weights = data["weights"]
            model.bias = float(data["bias"])
            model.converged = bool(data["converged"])
            model.iters_used = int(data["iters_used"])
            return model
        if variant == "knn":
            model = KNearestNeighbors(k=int(data["k"]))
            model.train_X = data["train_X"]
            model.train_y = data["train_y"]
            return model
        if variant == "forest":
            offsets = data["tree_offsets"]
            n_trees = int(data["n_trees"])
            model = RandomForest(n_trees=n_trees)
            model.n_features = int(data["n_features"])
            model.trees = []
            for i in range(n_trees):
                s = slice(int(offsets[i]), int(offsets[i + 1]))
                model.trees.append(
                    DecisionTree(
                        feature=data["feature"][s],
                        threshold=data["threshold"][s],
                        left=data["left"][s],
                        right=data["right"][s],
                        n0=data["n0"][s],
                        n1=data["n1"][s],
                    )
                )
            return model
        raise SchemaError(f"{path}: unknown model variant {variant!r}")
