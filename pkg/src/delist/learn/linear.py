"""Linear classifiers: logistic regression and a linear SVM.

Both standardize features internally and keep the bias unregularized. The
loss/gradient functions are exposed as pure functions of (w, b, X, y) so
they can be checked against finite differences directly.
"""

from __future__ import annotations

import numpy as np

from ..errors import SingleClass
from .models import (
    LOGISTIC,
    SVM,
    Model,
    apply_scaler,
    as_xy,
    fit_scaler,
    scaler_payload,
    sigmoid,
)

DEFAULT_LOGISTIC_LR = 0.1
DEFAULT_LOGISTIC_L2 = 1e-3
DEFAULT_LOGISTIC_EPOCHS = 500

DEFAULT_SVM_LAMBDA = 1e-3
DEFAULT_SVM_EPOCHS = 20


def _require_two_classes(y: np.ndarray) -> None:
    if np.unique(y).size < 2:
        raise SingleClass("training needs both label classes")


def logistic_loss_and_grad(w, b, X, y, l2: float) -> tuple:
    """Mean cross-entropy + (l2/2)||w||^2 (bias excluded) and its gradient.

    Returns (loss, grad_w, grad_b).
    """
    w = np.asarray(w, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    z = X @ w + b
    # log(1 + e^z) - y*z, computed without overflow
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))
    p = sigmoid(z)
    grad_w = X.T @ (p - y) / n + l2 * w
    grad_b = float(np.mean(p - y))
    return loss, grad_w, grad_b


def train_logistic(
    dataset,
    learning_rate: float = DEFAULT_LOGISTIC_LR,
    l2: float = DEFAULT_LOGISTIC_L2,
    epochs: int = DEFAULT_LOGISTIC_EPOCHS,
    seed: int = 0,
) -> Model:
    """Full-batch gradient descent from zero weights.

    The per-epoch training loss is recorded in the payload; at the default
    rate on standardized features it is non-increasing.
    """
    X, y, names = as_xy(dataset)
    _require_two_classes(y)
    mean, scale = fit_scaler(X)
    Z = apply_scaler(X, mean, scale)
    w = np.zeros(Z.shape[1])
    b = 0.0
    losses = []
    for _ in range(epochs):
        loss, grad_w, grad_b = logistic_loss_and_grad(w, b, Z, y, l2)
        losses.append(loss)
        w = w - learning_rate * grad_w
        b = b - learning_rate * grad_b
    payload = {
        "weights": [float(v) for v in w],
        "bias": float(b),
        "train_loss": losses,
        **scaler_payload(mean, scale),
    }
    config = {"learning_rate": learning_rate, "l2": l2, "epochs": epochs}
    return Model(LOGISTIC, payload, names, config, seed)


def logistic_scores(payload: dict, Z: np.ndarray) -> np.ndarray:
    w = np.asarray(payload["weights"], dtype=np.float64)
    return sigmoid(Z @ w + float(payload["bias"]))


# ---------------------------------------------------------------------------
# linear SVM


def svm_objective_and_subgrad(w, b, X, y, lam: float) -> tuple:
    """(lam/2)||w||^2 + mean hinge loss, with a subgradient.

    y is 0/1; internally mapped to -1/+1. At hinge kinks the subgradient
    takes the margin-violated branch. Returns (objective, sub_w, sub_b).
    """
    w = np.asarray(w, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    s = np.where(np.asarray(y) == 1, 1.0, -1.0)
    n = X.shape[0]
    margins = s * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    objective = float(0.5 * lam * (w @ w) + np.mean(hinge))
    active = hinge > 0.0
    sub_w = lam * w - X[active].T @ s[active] / n
    sub_b = float(-np.sum(s[active]) / n)
    return objective, sub_w, sub_b


def train_linear_svm(
    dataset,
    lam: float = DEFAULT_SVM_LAMBDA,
    epochs: int = DEFAULT_SVM_EPOCHS,
    seed: int = 0,
) -> Model:
    """Stochastic subgradient descent with step 1/(lam*t), reshuffled every
    epoch.

    Scores map the signed margin through a sigmoid so every model kind
    shares the [0,1] score scale; ranking (hence AUC) is margin-monotone.
    """
    X, y, names = as_xy(dataset)
    _require_two_classes(y)
    mean, scale = fit_scaler(X)
    Z = apply_scaler(X, mean, scale)
    s = np.where(y == 1, 1.0, -1.0)
    n, d = Z.shape
    rng = np.random.default_rng(seed)
    w = np.zeros(d)
    b = 0.0
    t = 0
    objectives = []
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            if s[i] * (Z[i] @ w + b) < 1.0:
                w = (1.0 - eta * lam) * w + eta * s[i] * Z[i]
                b = b + eta * s[i]
            else:
                w = (1.0 - eta * lam) * w
        objectives.append(svm_objective_and_subgrad(w, b, Z, y, lam)[0])
    payload = {
        "weights": [float(v) for v in w],
        "bias": float(b),
        "objective": objectives,
        **scaler_payload(mean, scale),
    }
    config = {"lam": lam, "epochs": epochs}
    return Model(SVM, payload, names, config, seed)


def svm_scores(payload: dict, Z: np.ndarray) -> np.ndarray:
    w = np.asarray(payload["weights"], dtype=np.float64)
    return sigmoid(Z @ w + float(payload["bias"]))
