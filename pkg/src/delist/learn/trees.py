"""Binary CART trees: Gini for classification, variance for regression.

Trees are plain nested dicts (JSON-serializable as-is). x <= threshold goes
left; thresholds are midpoints between adjacent distinct sorted values,
nudged down when rounding would swallow the right neighbor. Split
tie-breaking is lowest feature index, then lowest threshold -- determinism
over elegance.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..errors import EmptyDataset
from .models import TREE, Model, apply_scaler, as_xy, fit_scaler, scaler_payload

GAIN_TOL = 1e-12

DEFAULT_TREE_DEPTH = 8
DEFAULT_MIN_LEAF = 1

GINI = "gini"
VARIANCE = "variance"


def _impurity(y: np.ndarray, mode: str) -> float:
    if mode == GINI:
        p = y.mean()
        return float(2.0 * p * (1.0 - p))
    return float(np.maximum(y.var(), 0.0))


def _best_split(X, y, idx, features, min_leaf, mode):
    """Best (gain, feature, threshold) at this node, or None.

    Vectorized over split positions: one stable sort per feature, then
    prefix sums give every candidate's child impurity at once.
    """
    n = idx.size
    ysub = y[idx].astype(np.float64)
    parent = _impurity(ysub, mode)
    if parent <= GAIN_TOL:
        return None
    best = None
    for j in features:
        xs = X[idx, j]
        order = np.argsort(xs, kind="stable")
        xs = xs[order]
        ys = ysub[order]
        cuts = np.nonzero(xs[1:] > xs[:-1])[0] + 1
        cuts = cuts[(cuts >= min_leaf) & (n - cuts >= min_leaf)]
        if cuts.size == 0:
            continue
        left_n = cuts.astype(np.float64)
        right_n = n - left_n
        if mode == GINI:
            prefix = np.cumsum(ys)
            pl = prefix[cuts - 1] / left_n
            pr = (prefix[-1] - prefix[cuts - 1]) / right_n
            child = (left_n * 2 * pl * (1 - pl) + right_n * 2 * pr * (1 - pr)) / n
        else:
            prefix = np.cumsum(ys)
            prefix_sq = np.cumsum(ys * ys)
            s_l = prefix[cuts - 1]
            q_l = prefix_sq[cuts - 1]
            s_r = prefix[-1] - s_l
            q_r = prefix_sq[-1] - q_l
            var_l = np.maximum(q_l / left_n - (s_l / left_n) ** 2, 0.0)
            var_r = np.maximum(q_r / right_n - (s_r / right_n) ** 2, 0.0)
            child = (left_n * var_l + right_n * var_r) / n
        gains = parent - child
        k = int(np.argmax(gains))  # first max = lowest threshold
        if best is None or gains[k] > best[0]:
            lo, hi = xs[cuts[k] - 1], xs[cuts[k]]
            thr = (lo + hi) / 2.0
            if thr >= hi:  # midpoint rounded up to the right value
                thr = lo
            best = (float(gains[k]), int(j), float(thr))
    if best is None or best[0] <= GAIN_TOL:
        return None
    return best


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    min_leaf: int = DEFAULT_MIN_LEAF,
    mode: str = GINI,
    rng: Optional[np.random.Generator] = None,
    n_feature_subsample: Optional[int] = None,
) -> dict:
    """Grow one tree on (X, y); y is 0/1 for gini mode, real for variance.

    n_feature_subsample draws that many features (without replacement, via
    rng) fresh at every node; None considers all features.
    """
    if X.shape[0] == 0:
        raise EmptyDataset("cannot fit a tree on zero rows")
    if mode not in (GINI, VARIANCE):
        raise ValueError(f"unknown mode {mode!r}")
    d = X.shape[1]
    yf = np.asarray(y, dtype=np.float64)

    def grow(idx: np.ndarray, depth: int) -> dict:
        node_n = int(idx.size)
        value = float(yf[idx].mean())
        if depth >= max_depth or node_n < 2 * min_leaf:
            return {"value": value, "n": node_n}
        if n_feature_subsample is not None and n_feature_subsample < d:
            features = np.sort(rng.choice(d, n_feature_subsample, replace=False))
        else:
            features = np.arange(d)
        best = _best_split(X, yf, idx, features, min_leaf, mode)
        if best is None:
            return {"value": value, "n": node_n}
        gain, j, thr = best
        mask = X[idx, j] <= thr
        return {
            "feature": j,
            "threshold": thr,
            "gain": gain,
            "n": node_n,
            "value": value,
            "left": grow(idx[mask], depth + 1),
            "right": grow(idx[~mask], depth + 1),
        }

    return grow(np.arange(X.shape[0]), 0)


def apply_tree(tree: dict, Z: np.ndarray) -> np.ndarray:
    """Leaf value per row, batch traversal with index masks."""
    out = np.empty(Z.shape[0], dtype=np.float64)
    stack = [(tree, np.arange(Z.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if "feature" not in node:
            out[idx] = node["value"]
            continue
        mask = Z[idx, node["feature"]] <= node["threshold"]
        stack.append((node["left"], idx[mask]))
        stack.append((node["right"], idx[~mask]))
    return out


def leaf_assignments(tree: dict, Z: np.ndarray) -> list:
    """(leaf_node, row_indices) pairs covering every row; the node dicts are
    the tree's own, so callers may rewrite leaf values in place."""
    pairs = []
    stack = [(tree, np.arange(Z.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if "feature" not in node:
            pairs.append((node, idx))
            continue
        mask = Z[idx, node["feature"]] <= node["threshold"]
        stack.append((node["left"], idx[mask]))
        stack.append((node["right"], idx[~mask]))
    return pairs


def tree_gain_sums(tree: dict, d: int) -> np.ndarray:
    """Split-gain totals per feature for one tree."""
    sums = np.zeros(d)
    stack = [tree]
    while stack:
        node = stack.pop()
        if "feature" in node:
            sums[node["feature"]] += node["gain"]
            stack.append(node["left"])
            stack.append(node["right"])
    return sums


def train_decision_tree(
    dataset,
    max_depth: int = DEFAULT_TREE_DEPTH,
    min_leaf: int = DEFAULT_MIN_LEAF,
    seed: int = 0,
) -> Model:
    """Single classification tree; leaves emit their positive fraction."""
    X, y, names = as_xy(dataset)
    if X.shape[0] == 0:
        raise EmptyDataset("empty training set")
    mean, scale = fit_scaler(X)
    Z = apply_scaler(X, mean, scale)
    tree = fit_tree(Z, y, max_depth=max_depth, min_leaf=min_leaf, mode=GINI)
    payload = {"tree": tree, **scaler_payload(mean, scale)}
    config = {"max_depth": max_depth, "min_leaf": min_leaf}
    return Model(TREE, payload, names, config, seed)


def tree_scores(payload: dict, Z: np.ndarray) -> np.ndarray:
    return apply_tree(payload["tree"], Z)


def sqrt_feature_count(d: int) -> int:
    return max(1, math.ceil(math.sqrt(d)))
