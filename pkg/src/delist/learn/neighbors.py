"""K-nearest-neighbors scoring (lazy: the model stores its training set)."""

from __future__ import annotations

import numpy as np

from ..errors import TooFewSamples
from .models import KNN, Model, apply_scaler, as_xy, fit_scaler, scaler_payload

DEFAULT_KNN_K = 5


def train_knn(dataset, k: int = DEFAULT_KNN_K, seed: int = 0) -> Model:
    """Store the standardized training set; all work happens at query time."""
    X, y, names = as_xy(dataset)
    n = X.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise TooFewSamples(f"k={k} exceeds {n} training points")
    mean, scale = fit_scaler(X)
    Z = apply_scaler(X, mean, scale)
    payload = {
        "matrix": [[float(v) for v in row] for row in Z],
        "labels": [int(v) for v in y],
        "k": k,
        **scaler_payload(mean, scale),
    }
    return Model(KNN, payload, names, {"k": k}, seed)


def knn_scores(payload: dict, Z: np.ndarray) -> np.ndarray:
    """Fraction of positive labels among the k nearest training points.

    Euclidean distance in standardized space; distance ties break toward
    the lower training-row index (stable sort order).
    """
    train = np.asarray(payload["matrix"], dtype=np.float64)
    labels = np.asarray(payload["labels"], dtype=np.float64)
    k = int(payload["k"])
    scores = np.empty(Z.shape[0])
    for i, z in enumerate(Z):
        dist = np.sqrt(((train - z) ** 2).sum(axis=1))
        nearest = np.argsort(dist, kind="stable")[:k]
        scores[i] = labels[nearest].mean()
    return scores
