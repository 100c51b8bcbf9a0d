"""Cross-validation, the advance-prediction sweep, and importances.

Fold training gets its own seed derived from the master SeedSequence, so a
parallel fold schedule could not change results; everything here is a pure
function of (data, model kind, seed).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ..errors import TooFewSamples
from .metrics import EvalMetrics, evaluate_metrics, mean_metrics
from .models import (
    FOREST,
    GBDT,
    KNN,
    LOGISTIC,
    SVM,
    TREE,
    Model,
    canonical_kind,
    predict_scores,
    take_rows,
    train_model,
)
from .trees import tree_gain_sums

DEFAULT_CV_FOLDS = 10


def stratified_kfold(labels, k: int = DEFAULT_CV_FOLDS, seed: int = 0) -> list:
    """Partition [0, n) into k folds with per-class counts within 1.

    If any present class has fewer than k members, stratification is
    impossible; degrade to a plain shuffled split with a warning.
    """
    y = np.asarray(labels, dtype=np.int64)
    n = y.size
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if n < k:
        raise TooFewSamples(f"{n} samples cannot fill {k} folds")
    rng = np.random.default_rng(seed)
    classes = np.unique(y)
    if min(int((y == c).sum()) for c in classes) < k:
        warnings.warn(
            f"a class has fewer than {k} members; falling back to unstratified folds",
            stacklevel=2,
        )
        perm = rng.permutation(n)
        return [np.sort(chunk) for chunk in np.array_split(perm, k)]
    folds: list = [[] for _ in range(k)]
    for c in classes:
        idx = np.nonzero(y == c)[0]
        for pos, i in enumerate(idx[rng.permutation(idx.size)]):
            folds[pos % k].append(int(i))
    return [np.sort(np.array(f, dtype=np.int64)) for f in folds]


@dataclass(frozen=True)
class CvResult:
    mean: EvalMetrics
    folds: tuple


def cross_validate(
    dataset,
    kind: str,
    hparams: Optional[Mapping] = None,
    k: int = DEFAULT_CV_FOLDS,
    seed: int = 0,
) -> CvResult:
    """k-fold CV: train on k-1 folds, score the held-out fold.

    Standardization happens inside each train call, so it is fitted on the
    training folds only. Reported metrics are the unweighted fold mean.
    """
    kind = canonical_kind(kind)
    folds = stratified_kfold(dataset.labels, k=k, seed=seed)
    fold_seeds = [
        int(ss.generate_state(1)[0]) for ss in np.random.SeedSequence(seed).spawn(len(folds))
    ]
    per_fold = []
    for i, test_idx in enumerate(folds):
        train_idx = np.sort(
            np.concatenate([f for j, f in enumerate(folds) if j != i])
        )
        model = train_model(
            take_rows(dataset, train_idx), kind, dict(hparams or {}), seed=fold_seeds[i]
        )
        scores = predict_scores(model, dataset.matrix[test_idx])
        per_fold.append(evaluate_metrics(dataset.labels[test_idx], scores))
    return CvResult(mean=mean_metrics(per_fold), folds=tuple(per_fold))


def advance_sweep(
    bundles: Sequence,
    config,
    k_range: Iterable[int] = range(0, 7),
    kinds: Iterable[str] = ("gbdt",),
    hparams_by_kind: Optional[Mapping] = None,
    cv_folds: int = DEFAULT_CV_FOLDS,
    seed: int = 0,
) -> dict:
    """Cross-validated metrics per (model kind, advance days).

    Rebuilds the dataset at each truncation depth k, then runs the same
    seeded CV per model. The k=0 cell therefore equals a plain
    cross_validate on the untruncated dataset.
    """
    from ..features import build_dataset

    hparams_by_kind = dict(hparams_by_kind or {})
    kinds = [canonical_kind(kname) for kname in kinds]
    table: dict = {}
    for k in k_range:
        dataset = build_dataset(bundles, config, advance_days=k)
        for kind in kinds:
            table[(kind, k)] = cross_validate(
                dataset,
                kind,
                hparams=hparams_by_kind.get(kind),
                k=cv_folds,
                seed=seed,
            )
    return table


def feature_importances(model: Model) -> Optional[dict]:
    """Importance per feature name, normalized to sum to 1.

    Linear models use |weight| (standardized space); trees and ensembles
    sum split gains. KNN has no usable notion -> None.
    """
    d = len(model.feature_names)
    if model.kind in (LOGISTIC, SVM):
        raw = np.abs(np.asarray(model.payload["weights"], dtype=np.float64))
    elif model.kind == TREE:
        raw = tree_gain_sums(model.payload["tree"], d)
    elif model.kind in (FOREST, GBDT):
        raw = np.zeros(d)
        for tree in model.payload["trees"]:
            raw += tree_gain_sums(tree, d)
    elif model.kind == KNN:
        return None
    else:
        return None
    total = float(raw.sum())
    weights = raw / total if total > 0 else raw
    return {name: float(w) for name, w in zip(model.feature_names, weights)}
