"""Ranking and threshold metrics for binary scores.

AUC is the Mann-Whitney statistic: the probability that a random positive
outscores a random negative, ties counting one half. Threshold metrics call
a row positive when its score reaches the threshold (default 0.5).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import DegenerateLabels, DimensionMismatch

DEFAULT_THRESHOLD = 0.5


def _midranks(s: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their rank range."""
    order = np.argsort(s, kind="stable")
    ss = s[order]
    change = np.nonzero(np.diff(ss))[0] + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [s.size]))
    mid = (starts + ends + 1) / 2.0  # mean of ranks starts+1 .. ends
    ranks = np.empty(s.size, dtype=np.float64)
    ranks[order] = np.repeat(mid, ends - starts)
    return ranks


def auc_score(labels, scores) -> float:
    """Mann-Whitney AUC with the tie-counts-half convention.

    Raises DegenerateLabels unless both classes are present.
    """
    y = np.asarray(labels, dtype=np.int64)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape:
        raise DimensionMismatch(f"{y.shape} labels vs {s.shape} scores")
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels(f"need both classes, got {n_pos} pos / {n_neg} neg")
    ranks = _midranks(s)
    rank_sum = float(ranks[y == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass(frozen=True)
class EvalMetrics:
    """auc is None when the labels were single-class (AUC undefined); the
    threshold metrics are always present."""

    auc: Optional[float]
    precision: float
    recall: float
    f1: float
    accuracy: float


def evaluate_metrics(labels, scores, threshold: float = DEFAULT_THRESHOLD) -> EvalMetrics:
    y = np.asarray(labels, dtype=np.int64)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape:
        raise DimensionMismatch(f"{y.shape} labels vs {s.shape} scores")
    pred = s >= threshold
    tp = int(np.sum(pred & (y == 1)))
    fp = int(np.sum(pred & (y == 0)))
    fn = int(np.sum(~pred & (y == 1)))
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    accuracy = float(np.mean(pred == (y == 1))) if y.size else 0.0
    try:
        auc: Optional[float] = auc_score(y, s)
    except DegenerateLabels:
        auc = None
    return EvalMetrics(auc, precision, recall, f1, accuracy)


def mean_metrics(metrics: Sequence[EvalMetrics]) -> EvalMetrics:
    """Unweighted means; AUC averages over the folds where it was defined."""
    if not metrics:
        raise ValueError("no metrics to average")
    aucs = [m.auc for m in metrics if m.auc is not None]
    return EvalMetrics(
        auc=sum(aucs) / len(aucs) if aucs else None,
        precision=sum(m.precision for m in metrics) / len(metrics),
        recall=sum(m.recall for m in metrics) / len(metrics),
        f1=sum(m.f1 for m in metrics) / len(metrics),
        accuracy=sum(m.accuracy for m in metrics) / len(metrics),
    )
