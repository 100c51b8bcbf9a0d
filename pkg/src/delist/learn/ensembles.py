"""Tree ensembles: bagged forests and gradient-boosted trees.

Both are built from the CART primitive in trees.py and are deterministic
given their seed: the forest derives one child seed per tree from a
SeedSequence, and boosting uses no randomness at all.
"""

from __future__ import annotations

from typing import Optional, Union

import numpy as np

from ..errors import EmptyDataset, SingleClass
from .models import (
    FOREST,
    GBDT,
    Model,
    apply_scaler,
    as_xy,
    fit_scaler,
    scaler_payload,
    sigmoid,
)
from .trees import (
    DEFAULT_MIN_LEAF,
    GINI,
    VARIANCE,
    apply_tree,
    fit_tree,
    leaf_assignments,
    sqrt_feature_count,
)

DEFAULT_FOREST_TREES = 100
DEFAULT_FOREST_DEPTH = 8

DEFAULT_GBDT_ROUNDS = 200
DEFAULT_GBDT_LR = 0.1
DEFAULT_GBDT_DEPTH = 3

# Newton leaf steps: L2 on the hessian keeps tiny-curvature leaves tame,
# and the clip bounds any single tree's raw contribution.
LEAF_HESSIAN_L2 = 1.0
LEAF_VALUE_CLIP = 4.0


def train_random_forest(
    dataset,
    n_trees: int = DEFAULT_FOREST_TREES,
    max_depth: int = DEFAULT_FOREST_DEPTH,
    min_leaf: int = DEFAULT_MIN_LEAF,
    bootstrap: bool = True,
    feature_subsample: Union[str, int, None] = "sqrt",
    seed: int = 0,
) -> Model:
    """Bagged Gini trees with per-node feature subsampling.

    feature_subsample: "sqrt" (default), an explicit count, or None for all
    features. n_trees=1 with bootstrap off and subsampling None reduces to
    a single decision tree.
    """
    X, y, names = as_xy(dataset)
    n, d = X.shape
    if n == 0:
        raise EmptyDataset("empty training set")
    if feature_subsample == "sqrt":
        n_sub: Optional[int] = sqrt_feature_count(d)
    elif feature_subsample is None or feature_subsample == "all":
        n_sub = None
    else:
        n_sub = int(feature_subsample)
    children = np.random.SeedSequence(seed).spawn(n_trees)
    mean, scale = fit_scaler(X)
    Z = apply_scaler(X, mean, scale)
    trees = []
    for ss in children:
        rng = np.random.default_rng(ss)
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        trees.append(
            fit_tree(
                Z[rows],
                y[rows],
                max_depth=max_depth,
                min_leaf=min_leaf,
                mode=GINI,
                rng=rng,
                n_feature_subsample=n_sub,
            )
        )
    payload = {"trees": trees, **scaler_payload(mean, scale)}
    config = {
        "n_trees": n_trees,
        "max_depth": max_depth,
        "min_leaf": min_leaf,
        "bootstrap": bootstrap,
        "feature_subsample": feature_subsample,
    }
    return Model(FOREST, payload, names, config, seed)


def forest_scores(payload: dict, Z: np.ndarray) -> np.ndarray:
    trees = payload["trees"]
    total = np.zeros(Z.shape[0])
    for tree in trees:
        total += apply_tree(tree, Z)
    return total / len(trees)


def gbdt_loss(F: np.ndarray, y: np.ndarray) -> float:
    """Mean logistic loss of raw scores F against 0/1 labels."""
    return float(np.mean(np.logaddexp(0.0, F) - y * F))


def train_gbdt(
    dataset,
    n_rounds: int = DEFAULT_GBDT_ROUNDS,
    learning_rate: float = DEFAULT_GBDT_LR,
    max_depth: int = DEFAULT_GBDT_DEPTH,
    min_leaf: int = DEFAULT_MIN_LEAF,
    seed: int = 0,
) -> Model:
    """Boosted regression trees on the logistic loss.

    Round t fits a variance-mode tree to the residuals y - p, then rewrites
    each leaf with a damped Newton step sum(g)/(sum(h)+1). The payload
    records the training loss at the prior and after every round; with the
    default rate the sequence is non-increasing.
    """
    X, y, names = as_xy(dataset)
    if np.unique(y).size < 2:
        raise SingleClass("training needs both label classes")
    mean, scale = fit_scaler(X)
    Z = apply_scaler(X, mean, scale)
    yf = y.astype(np.float64)
    p0 = yf.mean()
    base = float(np.log(p0 / (1.0 - p0)))
    F = np.full(Z.shape[0], base)
    losses = [gbdt_loss(F, yf)]
    trees = []
    for _ in range(n_rounds):
        p = sigmoid(F)
        g = yf - p
        h = p * (1.0 - p)
        tree = fit_tree(Z, g, max_depth=max_depth, min_leaf=min_leaf, mode=VARIANCE)
        for leaf, idx in leaf_assignments(tree, Z):
            step = g[idx].sum() / (h[idx].sum() + LEAF_HESSIAN_L2)
            leaf["value"] = float(np.clip(step, -LEAF_VALUE_CLIP, LEAF_VALUE_CLIP))
            F[idx] += learning_rate * leaf["value"]
        trees.append(tree)
        losses.append(gbdt_loss(F, yf))
    payload = {
        "base": base,
        "learning_rate": learning_rate,
        "trees": trees,
        "train_loss": losses,
        **scaler_payload(mean, scale),
    }
    config = {
        "n_rounds": n_rounds,
        "learning_rate": learning_rate,
        "max_depth": max_depth,
        "min_leaf": min_leaf,
    }
    return Model(GBDT, payload, names, config, seed)


def gbdt_scores(payload: dict, Z: np.ndarray) -> np.ndarray:
    F = np.full(Z.shape[0], float(payload["base"]))
    lr = float(payload["learning_rate"])
    for tree in payload["trees"]:
        F += lr * apply_tree(tree, Z)
    return sigmoid(F)
