"""Aggregate statistics over lifecycle events and app metadata.

Everything here is a pure function over immutable inputs: daily removal
series, peak periodicity, category and popularity breakdowns, developer
concentration, and interval distributions (ECDFs). No I/O, no mutation.
"""

from __future__ import annotations

import math
import statistics
from bisect import bisect_left
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Mapping, Optional, Union

from .daily import DailySeries
from .diffing import REMOVED, RELAUNCHED, LifecycleEvent
from .errors import EmptyInput, EmptyRange, NoRemovals
from .market import RankingObservation, Snapshot

DEFAULT_POPULAR_RANK = 1500
DEFAULT_MIN_SEPARATION = 7
UNKNOWN_CATEGORY = "unknown"


def daily_removal_series(
    events: Iterable[LifecycleEvent], start: date, end: date
) -> DailySeries:
    """Removed-event counts per day over the inclusive range [start, end].

    Days with no removals are zero; events outside the range are ignored.
    """
    if end < start:
        raise EmptyRange(f"empty date range: {start}..{end}")
    n_days = (end - start).days + 1
    counts = [0] * n_days
    for e in events:
        if e.kind == REMOVED and start <= e.date <= end:
            counts[(e.date - start).days] += 1
    return DailySeries(start, tuple(counts))


# ---------------------------------------------------------------------------
# peak detection


@dataclass(frozen=True)
class PeakReport:
    peak_dates: tuple
    interpeak_days: tuple
    median_interpeak: Optional[float]


def series_mad(values) -> float:
    """Median absolute deviation (no scale factor)."""
    med = statistics.median(values)
    return statistics.median([abs(v - med) for v in values])


def detect_peaks(
    series: DailySeries,
    min_prominence: Optional[float] = None,
    min_separation: int = DEFAULT_MIN_SEPARATION,
) -> PeakReport:
    """Find periodic spikes in a daily series.

    A peak is a strict local maximum (endpoints compare against their single
    neighbor) exceeding the series median by at least min_prominence, then
    greedily thinned so kept peaks are >= min_separation days apart, larger
    first. min_prominence defaults to twice the series MAD, which makes the
    result invariant under adding a constant to the whole series.
    """
    if min_separation < 1:
        raise ValueError(f"min_separation must be >= 1, got {min_separation}")
    v = series.values
    n = len(v)
    if min_prominence is None:
        min_prominence = 2.0 * series_mad(v)
    med = statistics.median(v)
    candidates = []
    for i in range(n):
        left_ok = i == 0 or v[i] > v[i - 1]
        right_ok = i == n - 1 or v[i] > v[i + 1]
        if n > 1 and left_ok and right_ok and v[i] - med >= min_prominence:
            candidates.append(i)
    kept: list = []
    for i in sorted(candidates, key=lambda i: (-v[i], i)):
        if all(abs(i - j) >= min_separation for j in kept):
            kept.append(i)
    kept.sort()
    gaps = tuple(b - a for a, b in zip(kept, kept[1:]))
    median_gap = float(statistics.median(gaps)) if gaps else None
    return PeakReport(
        peak_dates=tuple(series.date_at(i) for i in kept),
        interpeak_days=gaps,
        median_interpeak=median_gap,
    )


# ---------------------------------------------------------------------------
# category breakdown


@dataclass(frozen=True)
class CategoryBreakdown:
    """Removal shares by category: per removal-day rows plus the overall
    event-weighted column."""

    per_day: dict
    overall: dict
    counts: dict
    total_removals: int


def _category_lookup(source: Union[Mapping, Iterable[Snapshot]]) -> Mapping:
    if isinstance(source, Mapping):
        return source
    lookup: dict = {}
    for snap in source:
        for rec in snap.records.values():
            lookup[rec.app_id] = rec.category
    return lookup


def category_breakdown(
    events: Iterable[LifecycleEvent],
    snapshots: Union[Mapping, Iterable[Snapshot]],
) -> CategoryBreakdown:
    """Share of removals per category, per day and overall.

    snapshots may be an ascending snapshot run (category = the app's
    last-seen record) or a prebuilt app_id -> category mapping. Apps with no
    resolvable category land in the reserved "unknown" bucket.
    """
    lookup = _category_lookup(snapshots)
    day_counts: dict = {}
    counts: dict = {}
    total = 0
    for e in events:
        if e.kind != REMOVED:
            continue
        cat = lookup.get(e.app_id, UNKNOWN_CATEGORY)
        day_counts.setdefault(e.date, {}).setdefault(cat, 0)
        day_counts[e.date][cat] += 1
        counts[cat] = counts.get(cat, 0) + 1
        total += 1
    per_day = {
        d: {cat: c / sum(cats.values()) for cat, c in cats.items()}
        for d, cats in day_counts.items()
    }
    overall = {cat: c / total for cat, c in counts.items()} if total else {}
    return CategoryBreakdown(per_day, overall, counts, total)


# ---------------------------------------------------------------------------
# popularity


@dataclass(frozen=True)
class PopularityFlag:
    app_id: str
    ever_top_k: bool
    best_rank: Optional[int]
    observations: tuple  # (date, rank), date-ascending, input order within a date

    def last_rank_before(self, d: date) -> Optional[int]:
        """Rank of the latest observation dated strictly before d."""
        dates = [obs_date for obs_date, _ in self.observations]
        i = bisect_left(dates, d)
        return self.observations[i - 1][1] if i else None


def popularity_flag(
    app_id: str,
    rankings: Iterable[RankingObservation],
    threshold_rank: int = DEFAULT_POPULAR_RANK,
) -> PopularityFlag:
    """Was this app ever ranked at or above threshold_rank?"""
    obs = []
    for r in rankings:
        if r.app_id != app_id:
            raise ValueError(f"ranking for {r.app_id!r} passed to {app_id!r}")
        obs.append((r.date, r.rank))
    obs.sort(key=lambda t: t[0])
    best = min((rank for _, rank in obs), default=None)
    return PopularityFlag(
        app_id=app_id,
        ever_top_k=best is not None and best <= threshold_rank,
        best_rank=best,
        observations=tuple(obs),
    )


# ---------------------------------------------------------------------------
# ECDF and interval distributions


def ecdf(samples) -> list:
    """Empirical CDF as sorted (value, cumulative_fraction) pairs.

    Right-continuous: the pair for value v carries (#samples <= v)/n.
    """
    values = sorted(samples)
    if not values:
        raise EmptyInput("ecdf of no samples")
    n = len(values)
    points = []
    for i, v in enumerate(values, start=1):
        if i == n or values[i] != v:
            points.append((v, i / n))
    return points


def ecdf_at(points: list, v) -> float:
    """Evaluate an ecdf() result at v."""
    frac = 0.0
    for value, cum in points:
        if value <= v:
            frac = cum
        else:
            break
    return frac


def interval_samples(timelines: Mapping) -> dict:
    """Day-count samples for the three lifecycle intervals.

    release_to_removal and update_to_removal are measured at the app's first
    removal against its last-seen record fields; negative samples (metadata
    refreshed after a relaunch) are dropped. removal_to_relaunch pairs each
    Relaunched event with the nearest preceding Removed event.
    """
    out = {
        "release_to_removal": [],
        "update_to_removal": [],
        "removal_to_relaunch": [],
    }
    for tl in timelines.values():
        first = tl.first_removal()
        if first is not None:
            if tl.release_date is not None:
                gap = (first - tl.release_date).days
                if gap >= 0:
                    out["release_to_removal"].append(gap)
            if tl.last_update_date is not None:
                gap = (first - tl.last_update_date).days
                if gap >= 0:
                    out["update_to_removal"].append(gap)
        last_removal = None
        for e in tl.events:
            if e.kind == REMOVED:
                last_removal = e.date
            elif e.kind == RELAUNCHED and last_removal is not None:
                out["removal_to_relaunch"].append((e.date - last_removal).days)
                last_removal = None
    return out


def relaunch_within(timelines: Mapping, days: int = 2) -> float:
    """Fraction of removed apps that came back within the given number of
    days of a removal. Zero removed apps -> 0.0."""
    removed = 0
    quick = 0
    for tl in timelines.values():
        if not tl.removal_dates():
            continue
        removed += 1
        last_removal = None
        for e in tl.events:
            if e.kind == REMOVED:
                last_removal = e.date
            elif e.kind == RELAUNCHED and last_removal is not None:
                if (e.date - last_removal).days <= days:
                    quick += 1
                    break
                last_removal = None
    return quick / removed if removed else 0.0


# ---------------------------------------------------------------------------
# developers


@dataclass(frozen=True)
class DeveloperStats:
    developer_name: str
    apps_total: int
    apps_removed: int

    def __post_init__(self):
        if not 0 <= self.apps_removed <= self.apps_total:
            raise ValueError(
                f"{self.developer_name}: {self.apps_removed} removed of "
                f"{self.apps_total}"
            )

    @property
    def removed_fraction(self) -> float:
        return self.apps_removed / self.apps_total


def developer_stats(
    timelines: Mapping, apps_by_developer: Optional[Mapping] = None
) -> tuple:
    """Per-developer removal stats plus the all-removed summary.

    Returns (stats, summary) where stats is sorted by (apps_removed desc,
    name) and summary["fraction_developers_all_removed"] counts developers
    whose every app was removed. apps_by_developer (developer -> app_id set)
    defaults to grouping the timelines by developer_name.
    """
    if apps_by_developer is None:
        grouped: dict = {}
        for tl in timelines.values():
            grouped.setdefault(tl.developer_name, set()).add(tl.app_id)
        apps_by_developer = grouped
    stats = []
    for dev in sorted(apps_by_developer):
        app_ids = apps_by_developer[dev]
        removed = sum(
            1
            for a in app_ids
            if a in timelines and timelines[a].removal_dates()
        )
        stats.append(DeveloperStats(dev, len(app_ids), removed))
    stats.sort(key=lambda s: (-s.apps_removed, s.developer_name))
    n_dev = len(stats)
    all_removed = sum(1 for s in stats if s.apps_total and s.removed_fraction == 1.0)
    summary = {
        "developers": n_dev,
        "fraction_developers_all_removed": all_removed / n_dev if n_dev else 0.0,
    }
    return stats, summary


def concentration_curve(stats) -> list:
    """Removal concentration: (top fraction of developers, share of removals).

    stats must be sorted by apps_removed descending (developer_stats output
    order works). Point k is (k/D, removals owned by the top k / total),
    running from (0,0) to (1,1).
    """
    totals = [s.apps_removed for s in stats]
    grand = sum(totals)
    if grand == 0:
        raise NoRemovals("no removed apps; concentration undefined")
    d = len(totals)
    points = [(0.0, 0.0)]
    acc = 0
    for k, t in enumerate(totals, start=1):
        acc += t
        points.append((k / d, acc / grand))
    return points


def concentration_at(points: list, p: float) -> float:
    """Share of removals owned by the top ceil(p*D) developers."""
    d = len(points) - 1
    # the 1e-12 slack keeps exact multiples like 0.2*5 from rounding up
    k = min(d, max(0, math.ceil(p * d - 1e-12)))
    return points[k][1]
