"""Day-granular time primitives: observation windows and daily count series.

Everything in this package operates on calendar dates; there are no
timestamps anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterator, Sequence

from .errors import EmptyInput, EmptyWindow


@dataclass(frozen=True)
class Window:
    """Half-open day window (start, end]: `start` is excluded, `end` included.

    ``Window.trailing(ref, 30)`` covers the 30 days ending at (and including)
    ``ref`` -- the "most recent month" convention used by the review and
    keyword signal windows.
    """

    start: date
    end: date

    def __post_init__(self):
        if self.end <= self.start:
            raise EmptyWindow(f"window ({self.start}, {self.end}] has no days")

    @classmethod
    def trailing(cls, end: date, days: int) -> "Window":
        if days < 1:
            raise EmptyWindow(f"trailing window needs days >= 1, got {days}")
        return cls(end - timedelta(days=days), end)

    @property
    def n_days(self) -> int:
        return (self.end - self.start).days

    def contains(self, d: date) -> bool:
        return self.start < d <= self.end

    def days(self) -> Iterator[date]:
        for i in range(1, self.n_days + 1):
            yield self.start + timedelta(days=i)

    @property
    def first_day(self) -> date:
        return self.start + timedelta(days=1)


@dataclass(frozen=True)
class DailySeries:
    """One value per day, starting at start_date."""

    start_date: date
    values: tuple

    def __post_init__(self):
        if len(self.values) < 1:
            raise EmptyInput("daily series needs at least one value")

    def __len__(self) -> int:
        return len(self.values)

    def date_at(self, index: int) -> date:
        return self.start_date + timedelta(days=index)

    @property
    def end_date(self) -> date:
        return self.date_at(len(self.values) - 1)


def make_series(start_date: date, values: Sequence) -> DailySeries:
    return DailySeries(start_date, tuple(values))


def series_mean(series: DailySeries) -> float:
    return math.fsum(series.values) / len(series.values)


def series_stddev(series: DailySeries) -> float:
    """Population standard deviation of the series values."""
    n = len(series.values)
    mu = math.fsum(series.values) / n
    var = math.fsum((v - mu) ** 2 for v in series.values) / n
    return math.sqrt(var)
