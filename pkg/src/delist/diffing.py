"""Lifecycle events from day-over-day snapshot diffs.

An app's market status is never read off the input; it is derived purely from
set differences between consecutive snapshots:

- present yesterday, absent today  -> Removed (dated today)
- absent yesterday, present today  -> Appeared if never seen before,
                                      Relaunched if it was seen and removed

The first snapshot of a run seeds one Appeared event per app, so replaying
the event stream reconstructs exactly the per-day presence sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Optional

from .errors import EmptyRange, InvalidOrder
from .market import Snapshot

APPEARED = "Appeared"
REMOVED = "Removed"
RELAUNCHED = "Relaunched"

_KIND_ORDER = {APPEARED: 0, REMOVED: 1, RELAUNCHED: 2}


@dataclass(frozen=True)
class LifecycleEvent:
    app_id: str
    date: date
    kind: str

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise ValueError(f"unknown event kind {self.kind!r}")


def diff_snapshots(
    prev: Snapshot, curr: Snapshot, seen_before: Optional[set] = None
) -> list:
    """Events between two consecutive snapshots, dated at curr.date.

    seen_before holds app_ids present in any snapshot strictly before prev;
    it decides Appeared vs Relaunched for ids new relative to prev. Without
    history, every arrival is an Appeared. Events are sorted by
    (date, app_id, kind); here the date is constant, so by app_id.
    """
    if prev.date >= curr.date:
        raise InvalidOrder(f"snapshots out of order: {prev.date} >= {curr.date}")
    seen = seen_before or set()
    prev_ids = prev.app_ids()
    curr_ids = curr.app_ids()
    events = []
    for app_id in prev_ids - curr_ids:
        events.append(LifecycleEvent(app_id, curr.date, REMOVED))
    for app_id in curr_ids - prev_ids:
        kind = RELAUNCHED if app_id in seen else APPEARED
        events.append(LifecycleEvent(app_id, curr.date, kind))
    events.sort(key=lambda e: (e.date, e.app_id, _KIND_ORDER[e.kind]))
    return events


def diff_run(snapshots: Iterable[Snapshot]) -> list:
    """Events over an ascending run of snapshots.

    The first snapshot contributes one Appeared per app (dated at that
    snapshot); later snapshots are diffed pairwise with full history.
    """
    snaps = list(snapshots)
    if not snaps:
        raise EmptyRange("no snapshots to diff")
    for a, b in zip(snaps, snaps[1:]):
        if a.date >= b.date:
            raise InvalidOrder(f"snapshots out of order: {a.date} >= {b.date}")
    events = [
        LifecycleEvent(app_id, snaps[0].date, APPEARED)
        for app_id in sorted(snaps[0].app_ids())
    ]
    seen: set = set()
    for prev, curr in zip(snaps, snaps[1:]):
        events.extend(diff_snapshots(prev, curr, seen_before=seen))
        seen |= prev.app_ids()
    return events


@dataclass
class AppTimeline:
    """One app's full event history plus its latest known record fields."""

    app_id: str
    events: list = field(default_factory=list)
    category: str = "unknown"
    developer_name: str = ""
    release_date: Optional[date] = None
    last_update_date: Optional[date] = None

    def removal_dates(self) -> list:
        return [e.date for e in self.events if e.kind == REMOVED]

    def first_removal(self) -> Optional[date]:
        dates = self.removal_dates()
        return min(dates) if dates else None

    def relaunch_dates(self) -> list:
        return [e.date for e in self.events if e.kind == RELAUNCHED]

    def present_on(self, d: date) -> bool:
        """Replay the event stream: present iff the last event dated <= d is
        an arrival. Days before the first event are absent."""
        state = False
        for e in self.events:
            if e.date > d:
                break
            state = e.kind != REMOVED
        return state


def build_timelines(snapshots: Iterable[Snapshot]) -> dict:
    """Per-app timelines over an ascending run: app_id -> AppTimeline.

    Events within each timeline are date-ascending. Record fields (category,
    developer, dates) come from the app's latest snapshot appearance.
    """
    snaps = list(snapshots)
    events = diff_run(snaps)
    timelines: dict = {}
    for e in events:
        tl = timelines.get(e.app_id)
        if tl is None:
            tl = timelines[e.app_id] = AppTimeline(e.app_id)
        tl.events.append(e)
    for snap in snaps:
        for rec in snap.records.values():
            tl = timelines[rec.app_id]
            tl.category = rec.category
            tl.developer_name = rec.developer_name
            tl.release_date = rec.release_date
            tl.last_update_date = rec.update_date
    return timelines


def events_to_csv_lines(events: Iterable[LifecycleEvent]) -> list:
    """Deterministic CSV rows (header first), sorted by (date, app_id)."""
    rows = sorted(events, key=lambda e: (e.date, e.app_id, _KIND_ORDER[e.kind]))
    lines = ["app_id,date,kind"]
    lines.extend(f"{e.app_id},{e.date.isoformat()},{e.kind}" for e in rows)
    return lines
