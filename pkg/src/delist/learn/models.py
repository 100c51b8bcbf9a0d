"""Model container, feature scaling, score dispatch, serialization.

Every trained model is a Model: a kind tag plus a JSON-serializable payload
that includes the feature scaler fitted on its training data. Scores are
always in [0, 1]. Serialization uses plain JSON; floats survive exactly
(shortest-repr round-trip), so a saved and reloaded model scores
bit-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import DimensionMismatch, NonFiniteFeature, UnknownModelKind

MODEL_FILE_VERSION = 1

LOGISTIC = "LogisticRegression"
SVM = "LinearSVM"
KNN = "KNN"
TREE = "DecisionTree"
FOREST = "RandomForest"
GBDT = "GBDT"

KINDS = (LOGISTIC, SVM, KNN, TREE, FOREST, GBDT)

# short names accepted on the command line
ALIASES = {
    "logistic": LOGISTIC,
    "svm": SVM,
    "knn": KNN,
    "tree": TREE,
    "forest": FOREST,
    "gbdt": GBDT,
}


def canonical_kind(name: str) -> str:
    if name in KINDS:
        return name
    try:
        return ALIASES[name.lower()]
    except KeyError:
        raise UnknownModelKind(f"unknown model kind {name!r}") from None


@dataclass(frozen=True)
class Model:
    kind: str
    payload: dict
    feature_names: tuple
    config: dict
    seed: Optional[int]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnknownModelKind(f"unknown model kind {self.kind!r}")


@dataclass(frozen=True)
class ArrayDataset:
    """Minimal training view: any object with matrix/labels/feature_names
    works as a trainer input; this one wraps plain arrays."""

    matrix: np.ndarray
    labels: np.ndarray
    feature_names: tuple

    @classmethod
    def from_arrays(cls, X, y, feature_names=None) -> "ArrayDataset":
        X = np.asarray(X, dtype=np.float64)
        names = (
            tuple(feature_names)
            if feature_names is not None
            else tuple(f"f{i}" for i in range(X.shape[1]))
        )
        return cls(X, np.asarray(y, dtype=np.int64), names)


def take_rows(dataset, indices) -> ArrayDataset:
    """Row-subset view of any dataset-like object."""
    idx = np.asarray(indices, dtype=np.int64)
    return ArrayDataset(
        dataset.matrix[idx], dataset.labels[idx], tuple(dataset.feature_names)
    )


def as_xy(dataset) -> tuple:
    """(X, y, feature_names) with shape and finiteness checks."""
    X = check_matrix(dataset.matrix)
    y = np.asarray(dataset.labels, dtype=np.int64)
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} rows vs {y.shape[0]} labels")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be binary 0/1")
    return X, y, tuple(dataset.feature_names)


def check_matrix(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected 2-d matrix, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise NonFiniteFeature("matrix contains nan or inf")
    return X


def fit_scaler(X: np.ndarray) -> tuple:
    """Per-feature mean and population stddev; constant features scale by 1
    so standardization never divides by zero."""
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    return mean, scale


def apply_scaler(X: np.ndarray, mean, scale) -> np.ndarray:
    return (X - np.asarray(mean)) / np.asarray(scale)


def scaler_payload(mean, scale) -> dict:
    return {"mean": [float(v) for v in mean], "scale": [float(v) for v in scale]}


def _standardized_input(model: Model, X) -> np.ndarray:
    X = check_matrix(np.atleast_2d(X))
    d = len(model.feature_names)
    if X.shape[1] != d:
        raise DimensionMismatch(
            f"model expects {d} features, got {X.shape[1]}"
        )
    return apply_scaler(X, model.payload["mean"], model.payload["scale"])


def sigmoid(z: np.ndarray) -> np.ndarray:
    # piecewise form avoids overflow for large |z|
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def predict_scores(model: Model, X) -> np.ndarray:
    """Scores in [0,1] for a batch of rows (vectorized dispatch)."""
    from . import ensembles, linear, neighbors, trees

    Z = _standardized_input(model, X)
    if model.kind == LOGISTIC:
        return linear.logistic_scores(model.payload, Z)
    if model.kind == SVM:
        return linear.svm_scores(model.payload, Z)
    if model.kind == KNN:
        return neighbors.knn_scores(model.payload, Z)
    if model.kind == TREE:
        return trees.tree_scores(model.payload, Z)
    if model.kind == FOREST:
        return ensembles.forest_scores(model.payload, Z)
    if model.kind == GBDT:
        return ensembles.gbdt_scores(model.payload, Z)
    raise UnknownModelKind(f"unknown model kind {model.kind!r}")


def predict_score(model: Model, x) -> float:
    """Score one feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch(f"expected 1-d vector, got shape {x.shape}")
    return float(predict_scores(model, x[None, :])[0])


def train_model(dataset, kind: str, hparams: Optional[dict] = None, seed: int = 0) -> Model:
    """Train by kind name (canonical or alias); hparams override defaults."""
    from . import ensembles, linear, neighbors, trees

    kind = canonical_kind(kind)
    hparams = dict(hparams or {})
    trainers = {
        LOGISTIC: linear.train_logistic,
        SVM: linear.train_linear_svm,
        KNN: neighbors.train_knn,
        TREE: trees.train_decision_tree,
        FOREST: ensembles.train_random_forest,
        GBDT: ensembles.train_gbdt,
    }
    return trainers[kind](dataset, seed=seed, **hparams)


# ---------------------------------------------------------------------------
# serialization


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def model_to_json(model: Model) -> str:
    doc = {
        "version": MODEL_FILE_VERSION,
        "kind": model.kind,
        "payload": _jsonable(model.payload),
        "feature_names": list(model.feature_names),
        "config": _jsonable(model.config),
        "seed": model.seed,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def model_from_json(text: str) -> Model:
    doc = json.loads(text)
    if doc.get("version") != MODEL_FILE_VERSION:
        raise UnknownModelKind(f"unsupported model file version {doc.get('version')!r}")
    return Model(
        kind=doc["kind"],
        payload=doc["payload"],
        feature_names=tuple(doc["feature_names"]),
        config=doc["config"],
        seed=doc["seed"],
    )


def save_model(model: Model, path) -> None:
    Path(path).write_text(model_to_json(model), encoding="utf-8")


def load_model(path) -> Model:
    return model_from_json(Path(path).read_text(encoding="utf-8"))
