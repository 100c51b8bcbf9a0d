from datetime import timedelta

import pytest

from delist.diffing import (
    APPEARED,
    RELAUNCHED,
    REMOVED,
    build_timelines,
    diff_run,
    diff_snapshots,
    events_to_csv_lines,
)
from delist.errors import EmptyRange, InvalidOrder

from conftest import day


def kinds(events):
    return [(e.app_id, e.kind) for e in events]


def test_removed_and_appeared(mk_snapshot):
    prev = mk_snapshot(day(0), "a", "b")
    curr = mk_snapshot(day(1), "b", "c")
    events = diff_snapshots(prev, curr)
    assert kinds(events) == [("a", REMOVED), ("c", APPEARED)]
    assert all(e.date == day(1) for e in events)


def test_relaunch_needs_history(mk_snapshot):
    prev = mk_snapshot(day(5), "b")
    curr = mk_snapshot(day(6), "a", "b")
    assert kinds(diff_snapshots(prev, curr)) == [("a", APPEARED)]
    assert kinds(diff_snapshots(prev, curr, seen_before={"a"})) == [("a", RELAUNCHED)]


def test_out_of_order_rejected(mk_snapshot):
    with pytest.raises(InvalidOrder):
        diff_snapshots(mk_snapshot(day(1), "a"), mk_snapshot(day(1), "a"))
    with pytest.raises(InvalidOrder):
        diff_run([mk_snapshot(day(1), "a"), mk_snapshot(day(0), "a")])


def test_diff_run_seeds_first_snapshot(mk_snapshot):
    snaps = [
        mk_snapshot(day(0), "a", "b"),
        mk_snapshot(day(1), "b"),
        mk_snapshot(day(2), "a", "b"),
    ]
    events = diff_run(snaps)
    assert kinds(events) == [
        ("a", APPEARED),
        ("b", APPEARED),
        ("a", REMOVED),
        ("a", RELAUNCHED),
    ]


def test_diff_run_empty():
    with pytest.raises(EmptyRange):
        diff_run([])


def test_gap_longer_than_one_day_still_relaunches(mk_snapshot):
    snaps = [
        mk_snapshot(day(0), "a"),
        mk_snapshot(day(1)),
        mk_snapshot(day(4), "a"),
    ]
    events = diff_run(snaps)
    assert kinds(events) == [("a", APPEARED), ("a", REMOVED), ("a", RELAUNCHED)]
    assert events[-1].date == day(4)


def test_timeline_replay_matches_presence(mk_snapshot):
    presence = {
        "a": [1, 1, 0, 0, 1, 1],
        "b": [0, 1, 1, 1, 0, 1],
        "c": [1, 0, 1, 0, 1, 0],
    }
    snaps = [
        mk_snapshot(day(i), *[a for a, row in presence.items() if row[i]])
        for i in range(6)
    ]
    timelines = build_timelines(snaps)
    for app, row in presence.items():
        for i, bit in enumerate(row):
            assert timelines[app].present_on(day(i)) == bool(bit), (app, i)


def test_timeline_record_fields_from_latest_appearance(mk_snapshot, mk_record):
    old = mk_record("a", category="games", developer="d1")
    new = mk_record("a", category="tools", developer="d2")
    snaps = [
        mk_snapshot(day(0), records=[old]),
        mk_snapshot(day(1), records=[new]),
    ]
    tl = build_timelines(snaps)["a"]
    assert tl.category == "tools"
    assert tl.developer_name == "d2"


def test_first_removal_and_relaunch_dates(mk_snapshot):
    snaps = [
        mk_snapshot(day(0), "a"),
        mk_snapshot(day(1)),
        mk_snapshot(day(2), "a"),
        mk_snapshot(day(3)),
    ]
    tl = build_timelines(snaps)["a"]
    assert tl.first_removal() == day(1)
    assert tl.removal_dates() == [day(1), day(3)]
    assert tl.relaunch_dates() == [day(2)]


def test_events_csv_sorted_with_header(mk_snapshot):
    events = diff_run([mk_snapshot(day(0), "b", "a"), mk_snapshot(day(1), "a")])
    lines = events_to_csv_lines(events)
    assert lines[0] == "app_id,date,kind"
    assert lines[1:] == [
        "a,2024-01-01,Appeared",
        "b,2024-01-01,Appeared",
        "b,2024-01-02,Removed",
    ]
