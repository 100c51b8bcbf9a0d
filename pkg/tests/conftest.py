import itertools
from datetime import date, timedelta

import pytest

from delist.market import AppRecord, Review, Snapshot

D0 = date(2024, 1, 1)


def day(offset: int) -> date:
    return D0 + timedelta(days=offset)


@pytest.fixture
def mk_record():
    def make(
        app_id,
        developer="dev-a",
        category="tools",
        release=date(2023, 1, 1),
        update=None,
        rating_count=10,
        description="",
        price=0.0,
    ):
        return AppRecord(
            app_id=app_id,
            app_name=app_id.upper(),
            developer_name=developer,
            category=category,
            price=price,
            release_date=release,
            update_date=update or release,
            rating_count=rating_count,
            description=description,
        )

    return make


@pytest.fixture
def mk_snapshot(mk_record):
    def make(d, *app_ids, records=None):
        recs = {r.app_id: r for r in (records or [])}
        for a in app_ids:
            recs.setdefault(a, mk_record(a))
        return Snapshot(d, recs)

    return make


@pytest.fixture
def mk_review():
    counter = itertools.count()

    def make(app_id, d, text="fine", stars=5, user=None):
        return Review(
            app_id=app_id,
            user_id=user if user is not None else f"u{next(counter):05d}",
            date=d,
            stars=stars,
            text=text,
        )

    return make
