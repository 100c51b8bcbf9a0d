"""Search-keyword signals: daily counts, volatility, surges, coverage.

Keyword observations are sparse (a crawl may skip days), so the daily count
series carries the last observed count forward inside the window; a missed
crawl is not a keyword drop. Days before the first in-window observation
are 0. Coverage asks whether each keyword, after normalization, occurs as a
contiguous substring of the normalized app description.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .daily import DailySeries, Window, series_mean, series_stddev
from .market import KeywordObservation, normalize_keyword

DEFAULT_KEYWORD_WINDOW_DAYS = 7
DEFAULT_SURGE_WINDOW_DAYS = 7
DEFAULT_SURGE_THRESHOLD = 1000
DEFAULT_MIN_AVG_KEYWORDS = 100


def _sets_by_day(observations: Iterable[KeywordObservation], window: Window) -> dict:
    """Union same-day observations; drop observations outside the window."""
    by_day: dict = {}
    for o in observations:
        if window.contains(o.date):
            by_day[o.date] = by_day.get(o.date, frozenset()) | o.keywords
    return by_day


def keyword_daily_series(
    observations: Iterable[KeywordObservation], window: Window
) -> DailySeries:
    """Keyword-set size per day over the window, carrying counts forward
    across observation gaps (0 before the first in-window observation)."""
    by_day = _sets_by_day(observations, window)
    values = []
    carry = 0
    for d in window.days():
        if d in by_day:
            carry = len(by_day[d])
        values.append(carry)
    return DailySeries(window.first_day, tuple(values))


def keyword_universe(
    observations: Iterable[KeywordObservation], window: Window
) -> frozenset:
    """Distinct keywords observed anywhere in the window."""
    universe: frozenset = frozenset()
    for s in _sets_by_day(observations, window).values():
        universe |= s
    return universe


def weekly_surge(
    series: DailySeries,
    window_days: int = DEFAULT_SURGE_WINDOW_DAYS,
    threshold: int = DEFAULT_SURGE_THRESHOLD,
) -> bool:
    """Did the count rise by >= threshold within window_days of the series
    end? Compares the final value against each of the window_days values
    before it (as many as exist)."""
    v = series.values
    last = v[-1]
    lookback = min(window_days, len(v) - 1)
    return any(last - v[-1 - j] >= threshold for j in range(1, lookback + 1))


def description_coverage(
    description: str,
    observations: Iterable[KeywordObservation],
    window: Window,
    min_avg_keywords: float = DEFAULT_MIN_AVG_KEYWORDS,
) -> tuple:
    """(coverage_count, coverage_fraction, eligible) for one app.

    A keyword is covered iff it appears as a contiguous substring of the
    normalized description. eligible means the window's mean daily keyword
    count reaches min_avg_keywords; apps below that are excluded from
    coverage analytics (their tiny keyword sets make fractions noisy).
    """
    universe = keyword_universe(observations, window)
    desc = normalize_keyword(description)
    covered = sum(1 for k in universe if k in desc) if desc else 0
    fraction = covered / len(universe) if universe else 0.0
    avg = series_mean(keyword_daily_series(observations, window))
    return covered, fraction, avg >= min_avg_keywords


@dataclass(frozen=True)
class AsoSignalBundle:
    app_id: str
    window: Window
    daily_keyword_counts: DailySeries
    keyword_stddev: float
    weekly_surge: bool
    coverage_count: int
    coverage_fraction: float
    avg_keyword_count: float
    eligible: bool


def aso_signal_bundle(
    app_id: str,
    observations: Sequence[KeywordObservation],
    description: str,
    window: Window,
    surge_window_days: int = DEFAULT_SURGE_WINDOW_DAYS,
    surge_threshold: int = DEFAULT_SURGE_THRESHOLD,
    min_avg_keywords: float = DEFAULT_MIN_AVG_KEYWORDS,
) -> AsoSignalBundle:
    """Compose the per-app keyword signals over one window."""
    for o in observations:
        if o.app_id != app_id:
            raise ValueError(f"observation for {o.app_id!r} passed to {app_id!r}")
    series = keyword_daily_series(observations, window)
    count, fraction, eligible = description_coverage(
        description, observations, window, min_avg_keywords
    )
    return AsoSignalBundle(
        app_id=app_id,
        window=window,
        daily_keyword_counts=series,
        keyword_stddev=series_stddev(series),
        weekly_surge=weekly_surge(series, surge_window_days, surge_threshold),
        coverage_count=count,
        coverage_fraction=fraction,
        avg_keyword_count=series_mean(series),
        eligible=eligible,
    )
