"""Review-behavior signals: duplication, star skew, abnormal users.

Text identity for duplication is exact match after Unicode NFC, trimming,
and whitespace collapse; case is preserved. A "word" is a maximal run of
non-whitespace. Abnormal-review status is dataset-global: the frequency
table spans every app, and only then are users and per-app counts derived
(two-phase, so the per-app pass can fan out in parallel).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .daily import DailySeries, Window, series_mean, series_stddev
from .market import Review, normalize_review_text

DEFAULT_REVIEW_WINDOW_DAYS = 30


def word_count(text: str) -> int:
    return len(text.split())


def duplicate_stats(reviews: Sequence[Review]) -> tuple:
    """(duplicate_count, duplicate_fraction) for one app's reviews.

    A review is duplicated iff at least one other review of the same app has
    identical normalized text; every member of an identical group of size
    >= 2 counts. Empty input -> (0, 0.0).
    """
    app_ids = {r.app_id for r in reviews}
    if len(app_ids) > 1:
        raise ValueError(f"reviews from multiple apps: {sorted(app_ids)}")
    counts = Counter(normalize_review_text(r.text) for r in reviews)
    dup = sum(c for c in counts.values() if c >= 2)
    return dup, (dup / len(reviews) if reviews else 0.0)


def star_distribution(reviews: Iterable[Review]) -> tuple:
    """(fractions for stars 1..5, five_star_fraction); all zeros if empty."""
    counts = [0] * 5
    total = 0
    for r in reviews:
        counts[r.stars - 1] += 1
        total += 1
    if total == 0:
        return (0.0,) * 5, 0.0
    fractions = tuple(c / total for c in counts)
    return fractions, fractions[4]


@dataclass(frozen=True)
class AbnormalParams:
    """A review is abnormal iff it has more than min_words words and its
    text occurs at least min_occurrences times across the whole dataset."""

    min_words: int
    min_occurrences: int

    def __post_init__(self):
        if self.min_words < 1:
            raise ValueError(f"min_words must be >= 1, got {self.min_words}")
        if self.min_occurrences < 2:
            raise ValueError(
                f"min_occurrences must be >= 2, got {self.min_occurrences}"
            )


CONDITION_1 = AbnormalParams(min_words=5, min_occurrences=10)
CONDITION_2 = AbnormalParams(min_words=10, min_occurrences=20)


@dataclass(frozen=True)
class AbnormalReport:
    """Dataset-global abnormal-review analysis.

    review_ids are indices into the input sequence (reviews carry no id of
    their own). per_app_user_count counts, per app, the distinct globally
    abnormal users among that app's reviewers.
    """

    params: AbnormalParams
    review_ids: frozenset
    users: frozenset
    per_app_user_count: dict


def abnormal_users(
    all_reviews: Sequence[Review], params: AbnormalParams
) -> AbnormalReport:
    freq = Counter(normalize_review_text(r.text) for r in all_reviews)
    ids = frozenset(
        i
        for i, r in enumerate(all_reviews)
        if word_count(r.text) > params.min_words
        and freq[normalize_review_text(r.text)] >= params.min_occurrences
    )
    users = frozenset(all_reviews[i].user_id for i in ids)
    per_app: dict = {}
    for r in all_reviews:
        if r.user_id in users:
            per_app.setdefault(r.app_id, set()).add(r.user_id)
    return AbnormalReport(
        params=params,
        review_ids=ids,
        users=users,
        per_app_user_count={app: len(u) for app, u in per_app.items()},
    )


def daily_review_stats(reviews: Iterable[Review], window: Window) -> tuple:
    """(daily_counts, mean, population_stddev) over the window's days.

    Reviews dated outside the window are ignored; windowed days with no
    reviews count 0.
    """
    counts = {d: 0 for d in window.days()}
    for r in reviews:
        if window.contains(r.date):
            counts[r.date] += 1
    series = DailySeries(window.first_day, tuple(counts[d] for d in window.days()))
    return series, series_mean(series), series_stddev(series)


@dataclass(frozen=True)
class ReviewSignalBundle:
    app_id: str
    window: Window
    duplicate_count: int
    duplicate_fraction: float
    star_fractions: tuple
    abnormal_user_count: int
    daily_counts: DailySeries
    daily_stddev: float

    @property
    def five_star_fraction(self) -> float:
        return self.star_fractions[4]


def review_signal_bundle(
    app_id: str,
    reviews: Sequence[Review],
    window: Window,
    abnormal_user_set: frozenset = frozenset(),
) -> ReviewSignalBundle:
    """Compose the per-app review signals over one window.

    abnormal_user_set is the dataset-global abnormal user set (from
    abnormal_users over the whole corpus); the bundle counts the distinct
    abnormal users among this app's windowed reviewers.
    """
    in_window = [r for r in reviews if window.contains(r.date)]
    dup_count, dup_frac = duplicate_stats(in_window)
    fractions, _ = star_distribution(in_window)
    series, _, stddev = daily_review_stats(in_window, window)
    count = len({r.user_id for r in in_window} & set(abnormal_user_set))
    return ReviewSignalBundle(
        app_id=app_id,
        window=window,
        duplicate_count=dup_count,
        duplicate_fraction=dup_frac,
        star_fractions=fractions,
        abnormal_user_count=count,
        daily_counts=series,
        daily_stddev=stddev,
    )
