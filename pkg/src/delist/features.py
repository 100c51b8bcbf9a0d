"""Per-app feature assembly for removal prediction.

Each app contributes one 13-slot numeric vector computed from its reviews
and keyword observations over windows ending at its reference date: the
first removal date for removed apps, the last date observed on the market
for the rest. Advance prediction truncates every input stream to
reference_date - k days first; nothing dated after the cutoff can reach a
feature, which is what the no-leakage tests pin down.
"""

from __future__ import annotations

import dataclasses
import json
import warnings
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .daily import Window
from .errors import EmptyInput, NonFiniteFeature
from .keywords import (
    DEFAULT_KEYWORD_WINDOW_DAYS,
    aso_signal_bundle,
)
from .market import AppRecord, KeywordObservation, Review
from .reviews import (
    CONDITION_1,
    DEFAULT_REVIEW_WINDOW_DAYS,
    AbnormalParams,
    abnormal_users,
    review_signal_bundle,
)

DATASET_VERSION = 1


@dataclass(frozen=True)
class AppBundle:
    """Everything known about one app, anchored at a reference date.

    All reviews and keyword observations must be dated <= reference_date;
    label is True for removed apps.
    """

    record: AppRecord
    reviews: tuple
    keyword_observations: tuple
    reference_date: date
    label: bool

    def __post_init__(self):
        for r in self.reviews:
            if r.date > self.reference_date:
                raise ValueError(
                    f"{self.record.app_id}: review dated {r.date} after "
                    f"reference {self.reference_date}"
                )
        for o in self.keyword_observations:
            if o.date > self.reference_date:
                raise ValueError(
                    f"{self.record.app_id}: observation dated {o.date} after "
                    f"reference {self.reference_date}"
                )

    @property
    def app_id(self) -> str:
        return self.record.app_id


def truncate_bundle(bundle: AppBundle, advance_days: int) -> AppBundle:
    """Drop reviews/observations dated after reference_date - advance_days.

    The reference date and label stay put; only the data streams shrink.
    advance_days=0 is the identity.
    """
    if advance_days < 0:
        raise ValueError(f"advance_days must be >= 0, got {advance_days}")
    if advance_days == 0:
        return bundle
    cutoff = bundle.reference_date - timedelta(days=advance_days)
    return replace(
        bundle,
        reviews=tuple(r for r in bundle.reviews if r.date <= cutoff),
        keyword_observations=tuple(
            o for o in bundle.keyword_observations if o.date <= cutoff
        ),
    )


@dataclass(frozen=True)
class FeatureConfig:
    review_window_days: int = DEFAULT_REVIEW_WINDOW_DAYS
    keyword_window_days: int = DEFAULT_KEYWORD_WINDOW_DAYS
    abnormal_params: AbnormalParams = CONDITION_1

    def to_dict(self) -> dict:
        return {
            "review_window_days": self.review_window_days,
            "keyword_window_days": self.keyword_window_days,
            "min_words": self.abnormal_params.min_words,
            "min_occurrences": self.abnormal_params.min_occurrences,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "FeatureConfig":
        return cls(
            review_window_days=int(d["review_window_days"]),
            keyword_window_days=int(d["keyword_window_days"]),
            abnormal_params=AbnormalParams(
                int(d["min_words"]), int(d["min_occurrences"])
            ),
        )


@dataclass(frozen=True)
class FeatureVector:
    review_count_mean: float
    review_count_stddev: float
    star1_fraction: float
    star2_fraction: float
    star3_fraction: float
    star4_fraction: float
    star5_fraction: float
    duplicate_review_fraction: float
    abnormal_user_count: float
    keyword_count_mean: float
    keyword_count_stddev: float
    keyword_coverage_count: float
    keyword_coverage_fraction: float
    sparsity: tuple = ()

    def to_tuple(self) -> tuple:
        return tuple(getattr(self, name) for name in FEATURE_NAMES)

    def to_array(self) -> np.ndarray:
        return np.array(self.to_tuple(), dtype=np.float64)


FEATURE_NAMES = tuple(
    f.name for f in dataclasses.fields(FeatureVector) if f.name != "sparsity"
)

NO_REVIEWS = "no_reviews"
NO_KEYWORDS = "no_keywords"


def build_feature_vector(
    bundle: AppBundle,
    config: FeatureConfig = FeatureConfig(),
    abnormal_user_set: Optional[frozenset] = None,
) -> FeatureVector:
    """One app's feature vector over windows ending at its reference date.

    abnormal_user_set is the corpus-global abnormal user set; when None the
    bundle's own reviews stand in for the corpus (single-app use). Empty
    windows yield zero slots and a sparsity flag rather than an error.
    """
    if abnormal_user_set is None:
        abnormal_user_set = abnormal_users(
            list(bundle.reviews), config.abnormal_params
        ).users
    review_window = Window.trailing(bundle.reference_date, config.review_window_days)
    keyword_window = Window.trailing(bundle.reference_date, config.keyword_window_days)
    rev = review_signal_bundle(
        bundle.app_id, bundle.reviews, review_window, abnormal_user_set
    )
    aso = aso_signal_bundle(
        bundle.app_id,
        bundle.keyword_observations,
        bundle.record.description,
        keyword_window,
    )
    sparsity = []
    if not any(rev.daily_counts.values):
        sparsity.append(NO_REVIEWS)
    if not any(aso.daily_keyword_counts.values):
        sparsity.append(NO_KEYWORDS)
    n_reviews = sum(rev.daily_counts.values)
    vector = FeatureVector(
        review_count_mean=n_reviews / review_window.n_days,
        review_count_stddev=rev.daily_stddev,
        star1_fraction=rev.star_fractions[0],
        star2_fraction=rev.star_fractions[1],
        star3_fraction=rev.star_fractions[2],
        star4_fraction=rev.star_fractions[3],
        star5_fraction=rev.star_fractions[4],
        duplicate_review_fraction=rev.duplicate_fraction,
        abnormal_user_count=float(rev.abnormal_user_count),
        keyword_count_mean=aso.avg_keyword_count,
        keyword_count_stddev=aso.keyword_stddev,
        keyword_coverage_count=float(aso.coverage_count),
        keyword_coverage_fraction=aso.coverage_fraction,
        sparsity=tuple(sparsity),
    )
    for name in FEATURE_NAMES:
        if not np.isfinite(getattr(vector, name)):
            raise NonFiniteFeature(f"{bundle.app_id}: {name} is not finite")
    return vector


@dataclass(frozen=True)
class LabeledDataset:
    matrix: np.ndarray
    labels: np.ndarray
    feature_names: tuple
    app_ids: tuple
    config: FeatureConfig
    advance_days: int
    sparsity_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.matrix.shape[0] != self.labels.shape[0]:
            raise ValueError(
                f"{self.matrix.shape[0]} rows vs {self.labels.shape[0]} labels"
            )

    def __len__(self) -> int:
        return int(self.matrix.shape[0])


def build_dataset(
    bundles: Sequence[AppBundle],
    config: FeatureConfig = FeatureConfig(),
    advance_days: int = 0,
) -> LabeledDataset:
    """Assemble the labeled feature matrix, rows in bundle order.

    Every bundle is truncated to advance_days first; the abnormal-review
    user set is computed once over the union of all truncated reviews, so
    cross-app duplicate texts are caught and nothing dated past any cutoff
    leaks in. A single-class corpus is a warning, not an error: the dataset
    may still be scored, just not trained on.
    """
    if not bundles:
        raise EmptyInput("no bundles")
    truncated = [truncate_bundle(b, advance_days) for b in bundles]
    corpus = [r for b in truncated for r in b.reviews]
    global_users = abnormal_users(corpus, config.abnormal_params).users
    vectors = [
        build_feature_vector(b, config, abnormal_user_set=global_users)
        for b in truncated
    ]
    labels = np.array([1 if b.label else 0 for b in bundles], dtype=np.int64)
    if len(set(labels.tolist())) < 2:
        warnings.warn("dataset has a single label class", stacklevel=2)
    sparsity_counts: dict = {}
    for v in vectors:
        for flag in v.sparsity:
            sparsity_counts[flag] = sparsity_counts.get(flag, 0) + 1
    return LabeledDataset(
        matrix=np.array([v.to_tuple() for v in vectors], dtype=np.float64),
        labels=labels,
        feature_names=FEATURE_NAMES,
        app_ids=tuple(b.app_id for b in bundles),
        config=config,
        advance_days=advance_days,
        sparsity_counts=sparsity_counts,
    )


def assemble_bundles(
    timelines: Mapping,
    records: Mapping,
    reviews: Iterable[Review],
    observations: Iterable[KeywordObservation],
    last_snapshot_date: date,
) -> list:
    """Bundle per-app data from market-wide streams.

    Removed apps (any Removed event) are positives anchored at their first
    removal date; the rest are negatives anchored at last_snapshot_date.
    Reviews/observations dated after an app's reference date are dropped at
    assembly. Apps without a timeline or record are skipped. Output is
    app_id-sorted.
    """
    reviews_by_app: dict = {}
    for r in reviews:
        reviews_by_app.setdefault(r.app_id, []).append(r)
    obs_by_app: dict = {}
    for o in observations:
        obs_by_app.setdefault(o.app_id, []).append(o)
    bundles = []
    for app_id in sorted(timelines):
        if app_id not in records:
            continue
        tl = timelines[app_id]
        first_removal = tl.first_removal()
        label = first_removal is not None
        ref = first_removal if label else last_snapshot_date
        bundles.append(
            AppBundle(
                record=records[app_id],
                reviews=tuple(
                    r for r in reviews_by_app.get(app_id, []) if r.date <= ref
                ),
                keyword_observations=tuple(
                    o for o in obs_by_app.get(app_id, []) if o.date <= ref
                ),
                reference_date=ref,
                label=label,
            )
        )
    return bundles


# ---------------------------------------------------------------------------
# dataset serialization


def save_dataset(dataset: LabeledDataset, csv_path, sidecar_path=None) -> None:
    """Write the matrix as CSV (header = feature names + label) plus a JSON
    sidecar holding config, advance window, and row metadata. Floats are
    written with repr so load_dataset round-trips bit-exactly."""
    csv_path = Path(csv_path)
    lines = [",".join(list(dataset.feature_names) + ["label"])]
    for row, label in zip(dataset.matrix, dataset.labels):
        lines.append(",".join(repr(float(x)) for x in row) + f",{int(label)}")
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    sidecar = {
        "version": DATASET_VERSION,
        "advance_days": dataset.advance_days,
        "feature_names": list(dataset.feature_names),
        "app_ids": list(dataset.app_ids),
        "sparsity_counts": dict(sorted(dataset.sparsity_counts.items())),
        **dataset.config.to_dict(),
    }
    path = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".meta.json")
    path.write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_dataset(csv_path, sidecar_path=None) -> LabeledDataset:
    csv_path = Path(csv_path)
    path = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".meta.json")
    sidecar = json.loads(path.read_text(encoding="utf-8"))
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    names = tuple(lines[0].split(",")[:-1])
    rows = []
    labels = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append([float(x) for x in parts[:-1]])
        labels.append(int(parts[-1]))
    return LabeledDataset(
        matrix=np.array(rows, dtype=np.float64).reshape(len(rows), len(names)),
        labels=np.array(labels, dtype=np.int64),
        feature_names=names,
        app_ids=tuple(sidecar["app_ids"]),
        config=FeatureConfig.from_dict(sidecar),
        advance_days=int(sidecar["advance_days"]),
        sparsity_counts=dict(sidecar["sparsity_counts"]),
    )
