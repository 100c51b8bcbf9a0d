"""Deterministic CSV report tables.

Every writer emits fully sorted rows, repr-formatted floats, and "\n" line
endings, so re-running a pipeline over identical inputs rewrites identical
bytes. Booleans are lowercase true/false. Standard deviations are
population form throughout.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping

from .daily import DailySeries
from .keywords import AsoSignalBundle
from .lifecycle import CategoryBreakdown, PeakReport
from .reviews import ReviewSignalBundle


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, lines: Iterable[str]) -> None:
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def daily_removals_csv(series: DailySeries) -> list:
    lines = ["date,removed"]
    for i, v in enumerate(series.values):
        lines.append(f"{series.date_at(i).isoformat()},{v}")
    return lines


def peaks_csv(report: PeakReport) -> list:
    """One row per kept peak; gap_days is empty on the first row."""
    lines = ["peak_date,gap_days"]
    gaps = ("",) + tuple(str(g) for g in report.interpeak_days)
    for d, gap in zip(report.peak_dates, gaps):
        lines.append(f"{d.isoformat()},{gap}")
    return lines


def category_breakdown_csv(breakdown: CategoryBreakdown) -> list:
    """Tidy rows: per-day category shares plus 'overall' summary rows."""
    lines = ["date,category,fraction"]
    for d in sorted(breakdown.per_day):
        for cat in sorted(breakdown.per_day[d]):
            lines.append(f"{d.isoformat()},{cat},{fmt(breakdown.per_day[d][cat])}")
    for cat in sorted(breakdown.overall):
        lines.append(f"overall,{cat},{fmt(breakdown.overall[cat])}")
    return lines


def developer_stats_csv(stats) -> list:
    lines = ["developer,apps_total,apps_removed,removed_fraction"]
    for s in stats:
        lines.append(
            f"{s.developer_name},{s.apps_total},{s.apps_removed},"
            f"{fmt(s.removed_fraction)}"
        )
    return lines


def concentration_csv(points) -> list:
    lines = ["developer_fraction,removal_share"]
    for p, share in points:
        lines.append(f"{fmt(float(p))},{fmt(float(share))}")
    return lines


def ecdf_csv(points) -> list:
    lines = ["value,cumulative_fraction"]
    for v, frac in points:
        lines.append(f"{fmt(float(v))},{fmt(float(frac))}")
    return lines


def popularity_csv(flags, threshold_rank: int) -> list:
    """flags: PopularityFlag per app, any order; rows sorted by app_id."""
    lines = [f"app_id,ever_top_{threshold_rank},best_rank"]
    for f in sorted(flags, key=lambda f: f.app_id):
        best = "" if f.best_rank is None else str(f.best_rank)
        lines.append(f"{f.app_id},{fmt(f.ever_top_k)},{best}")
    return lines


def review_signals_csv(rows: Iterable[tuple]) -> list:
    """rows: (bundle, abnormal_count_condition2). The bundle's own count is
    condition 1 (M=5, N=10); the second condition is M=10, N=20."""
    header = (
        "app_id,window_start,window_end,dup_count,dup_frac,"
        "star1,star2,star3,star4,star5,"
        "abnormal_users_M5N10,abnormal_users_M10N20,review_stddev"
    )
    lines = [header]
    for bundle, abnormal2 in sorted(rows, key=lambda r: r[0].app_id):
        b: ReviewSignalBundle = bundle
        stars = ",".join(fmt(v) for v in b.star_fractions)
        lines.append(
            f"{b.app_id},{b.window.first_day.isoformat()},"
            f"{b.window.end.isoformat()},{b.duplicate_count},"
            f"{fmt(b.duplicate_fraction)},{stars},"
            f"{b.abnormal_user_count},{abnormal2},{fmt(b.daily_stddev)}"
        )
    return lines


def aso_signals_csv(bundles: Iterable[AsoSignalBundle]) -> list:
    header = (
        "app_id,kw_stddev,weekly_surge,avg_kw_count,"
        "coverage_count,coverage_frac,eligible"
    )
    lines = [header]
    for b in sorted(bundles, key=lambda b: b.app_id):
        lines.append(
            f"{b.app_id},{fmt(b.keyword_stddev)},{fmt(b.weekly_surge)},"
            f"{fmt(b.avg_keyword_count)},{b.coverage_count},"
            f"{fmt(b.coverage_fraction)},{fmt(b.eligible)}"
        )
    return lines


def metrics_csv(rows: Iterable[tuple]) -> list:
    """rows: (model_kind, advance_days, EvalMetrics)."""
    lines = ["model,k,auc,precision,recall,f1,accuracy"]
    for kind, k, m in sorted(rows, key=lambda r: (r[0], r[1])):
        auc = "" if m.auc is None else fmt(m.auc)
        lines.append(
            f"{kind},{k},{auc},{fmt(m.precision)},{fmt(m.recall)},"
            f"{fmt(m.f1)},{fmt(m.accuracy)}"
        )
    return lines


def importances_lines(importances: Mapping) -> list:
    """feature,weight rows sorted by weight desc then name."""
    lines = ["feature,weight"]
    for name, w in sorted(importances.items(), key=lambda kv: (-kv[1], kv[0])):
        lines.append(f"{name},{fmt(float(w))}")
    return lines
