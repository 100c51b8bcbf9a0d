"""Domain types and ingestion for daily app-market data.

File formats (all line-delimited JSON, UTF-8, one object per line):

- snapshot line:  app_id, app_name, developer_name, category, price,
                  release_date, update_date, rating_count, description
                  (optional snapshot_date, checked against the expected date)
- review line:    app_id, user_id, date, stars, text
- keyword line:   app_id, date, keywords[]
- ranking line:   app_id, date, category, rank

Dates are ISO-8601 YYYY-MM-DD. Record invariants (stars in 1..5, rank >= 1,
update_date >= release_date, non-negative price/rating_count) are enforced
here at parse time, never downstream.

Store layout: <root>/snapshots/<YYYY-MM-DD>.jsonl plus <root>/index.json.
The store is single-writer, multi-reader; writing a date that already exists
is an error unless overwrite is requested explicitly.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import IO, Iterable, Optional, Union

from .errors import (
    DateMismatch,
    DuplicateAppId,
    IoFailure,
    MalformedLine,
    NonPositiveRank,
    ParseError,
    SnapshotNotFound,
    StarsOutOfRange,
)

_WS = re.compile(r"\s+")


def normalize_keyword(raw: str) -> str:
    """Keyword identity: case-fold, trim, collapse internal whitespace."""
    return _WS.sub(" ", raw.strip()).casefold()


def normalize_review_text(raw: str) -> str:
    """Review-text identity: NFC, trim, collapse whitespace. Case is kept --
    review casing is meaningful, unlike search keywords."""
    return _WS.sub(" ", unicodedata.normalize("NFC", raw).strip())


@dataclass(frozen=True)
class AppRecord:
    app_id: str
    app_name: str
    developer_name: str
    category: str
    price: float
    release_date: date
    update_date: date
    rating_count: int
    description: str = ""

    def __post_init__(self):
        if not self.app_id:
            raise ValueError("app_id must be non-empty")
        if self.update_date < self.release_date:
            raise ValueError(
                f"{self.app_id}: update_date {self.update_date} before "
                f"release_date {self.release_date}"
            )
        if self.rating_count < 0:
            raise ValueError(f"{self.app_id}: rating_count < 0")
        if self.price < 0:
            raise ValueError(f"{self.app_id}: price < 0")


@dataclass(frozen=True)
class Snapshot:
    """The market state on one day: app_id -> record."""

    date: date
    records: dict = field(default_factory=dict)

    def __post_init__(self):
        for rec in self.records.values():
            if rec.release_date > self.date:
                raise ValueError(
                    f"{rec.app_id}: release_date {rec.release_date} after "
                    f"snapshot date {self.date}"
                )

    def app_ids(self) -> set:
        return set(self.records)

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class Review:
    app_id: str
    user_id: str
    date: date
    stars: int
    text: str

    def __post_init__(self):
        if self.stars not in (1, 2, 3, 4, 5):
            raise ValueError(f"stars must be in 1..5, got {self.stars}")


@dataclass(frozen=True)
class KeywordObservation:
    app_id: str
    date: date
    keywords: frozenset

    @classmethod
    def from_raw(cls, app_id: str, d: date, raw_keywords: Iterable[str]) -> "KeywordObservation":
        kws = frozenset(
            k for k in (normalize_keyword(r) for r in raw_keywords) if k
        )
        return cls(app_id, d, kws)


@dataclass(frozen=True)
class RankingObservation:
    app_id: str
    date: date
    category: str
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")


# ---------------------------------------------------------------------------
# line parsing


def _parse_date(value, line_no: int, what: str) -> date:
    try:
        return date.fromisoformat(value)
    except (TypeError, ValueError):
        raise MalformedLine(line_no, f"bad {what}: {value!r}") from None


def _parse_obj(line: str, line_no: int) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedLine(line_no, f"invalid JSON: {e.msg}") from None
    if not isinstance(obj, dict):
        raise MalformedLine(line_no, "record is not a JSON object")
    return obj


_SNAPSHOT_FIELDS = (
    "app_id",
    "app_name",
    "developer_name",
    "category",
    "price",
    "release_date",
    "update_date",
    "rating_count",
    "description",
)


def _record_from_obj(obj: dict, line_no: int) -> AppRecord:
    for f in _SNAPSHOT_FIELDS:
        if f not in obj:
            raise MalformedLine(line_no, f"missing field {f!r}")
    try:
        return AppRecord(
            app_id=str(obj["app_id"]),
            app_name=str(obj["app_name"]),
            developer_name=str(obj["developer_name"]),
            category=str(obj["category"]),
            price=float(obj["price"]),
            release_date=_parse_date(obj["release_date"], line_no, "release_date"),
            update_date=_parse_date(obj["update_date"], line_no, "update_date"),
            rating_count=int(obj["rating_count"]),
            description=str(obj["description"]),
        )
    except MalformedLine:
        raise
    except (TypeError, ValueError) as e:
        raise MalformedLine(line_no, str(e)) from None


def _iter_lines(stream: Union[IO, Iterable[str]]):
    for line_no, line in enumerate(stream, start=1):
        stripped = line.strip()
        if stripped:
            yield line_no, stripped


def parse_snapshot_file(stream: Union[IO, Iterable[str]], expected_date: date) -> Snapshot:
    """Parse one snapshot file. Strict: the first bad line raises.

    A daily snapshot with duplicate ids or malformed records is corrupt as a
    whole, so unlike the auxiliary parsers this one does not collect errors.
    Records may carry a snapshot_date field; if present it must equal
    expected_date. Any status-like fields in the input are ignored -- status
    is derived from diffs only.
    """
    records: dict = {}
    for line_no, line in _iter_lines(stream):
        obj = _parse_obj(line, line_no)
        if "snapshot_date" in obj:
            d = _parse_date(obj["snapshot_date"], line_no, "snapshot_date")
            if d != expected_date:
                raise DateMismatch(
                    line_no, f"record snapshot_date {d} != expected {expected_date}"
                )
        rec = _record_from_obj(obj, line_no)
        if rec.app_id in records:
            raise DuplicateAppId(line_no, rec.app_id)
        records[rec.app_id] = rec
    return Snapshot(expected_date, records)


def _review_from_obj(obj: dict, line_no: int) -> Review:
    for f in ("app_id", "user_id", "date", "stars", "text"):
        if f not in obj:
            raise MalformedLine(line_no, f"missing field {f!r}")
    try:
        stars = int(obj["stars"])
    except (TypeError, ValueError):
        raise MalformedLine(line_no, f"bad stars: {obj['stars']!r}") from None
    if stars not in (1, 2, 3, 4, 5):
        raise StarsOutOfRange(line_no, f"stars {stars} outside 1..5")
    return Review(
        app_id=str(obj["app_id"]),
        user_id=str(obj["user_id"]),
        date=_parse_date(obj["date"], line_no, "date"),
        stars=stars,
        text=str(obj["text"]),
    )


def _keywords_from_obj(obj: dict, line_no: int) -> KeywordObservation:
    for f in ("app_id", "date", "keywords"):
        if f not in obj:
            raise MalformedLine(line_no, f"missing field {f!r}")
    if not isinstance(obj["keywords"], list):
        raise MalformedLine(line_no, "keywords must be a list")
    return KeywordObservation.from_raw(
        str(obj["app_id"]),
        _parse_date(obj["date"], line_no, "date"),
        (str(k) for k in obj["keywords"]),
    )


def _ranking_from_obj(obj: dict, line_no: int) -> RankingObservation:
    for f in ("app_id", "date", "category", "rank"):
        if f not in obj:
            raise MalformedLine(line_no, f"missing field {f!r}")
    try:
        rank = int(obj["rank"])
    except (TypeError, ValueError):
        raise MalformedLine(line_no, f"bad rank: {obj['rank']!r}") from None
    if rank < 1:
        raise NonPositiveRank(line_no, f"rank {rank} < 1")
    return RankingObservation(
        app_id=str(obj["app_id"]),
        date=_parse_date(obj["date"], line_no, "date"),
        category=str(obj["category"]),
        rank=rank,
    )


def _parse_stream(stream, build, errors: list, tag: str) -> list:
    out = []
    if stream is None:
        return out
    for line_no, line in _iter_lines(stream):
        try:
            out.append(build(_parse_obj(line, line_no), line_no))
        except ParseError as e:
            e.reason = f"{tag}: {e.reason}"
            errors.append(e)
    return out


def parse_auxiliary_streams(
    reviews_stream=None, keywords_stream=None, rankings_stream=None
) -> tuple:
    """Parse the review/keyword/ranking streams, collecting per-line errors.

    Returns (reviews, keyword_observations, rankings, errors). Output order
    preserves input order, and every input line ends up either in one of the
    output lists or in errors -- nothing is dropped silently.
    """
    errors: list = []
    reviews = _parse_stream(reviews_stream, _review_from_obj, errors, "reviews")
    keywords = _parse_stream(keywords_stream, _keywords_from_obj, errors, "keywords")
    rankings = _parse_stream(rankings_stream, _ranking_from_obj, errors, "rankings")
    return reviews, keywords, rankings, errors


# ---------------------------------------------------------------------------
# canonical serialization + store


def record_to_line(rec: AppRecord, snapshot_date: Optional[date] = None) -> str:
    obj = {
        "app_id": rec.app_id,
        "app_name": rec.app_name,
        "developer_name": rec.developer_name,
        "category": rec.category,
        "price": rec.price,
        "release_date": rec.release_date.isoformat(),
        "update_date": rec.update_date.isoformat(),
        "rating_count": rec.rating_count,
        "description": rec.description,
    }
    if snapshot_date is not None:
        obj["snapshot_date"] = snapshot_date.isoformat()
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def review_to_line(r: Review) -> str:
    obj = {
        "app_id": r.app_id,
        "user_id": r.user_id,
        "date": r.date.isoformat(),
        "stars": r.stars,
        "text": r.text,
    }
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def keywords_to_line(o: KeywordObservation) -> str:
    obj = {
        "app_id": o.app_id,
        "date": o.date.isoformat(),
        "keywords": sorted(o.keywords),
    }
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def ranking_to_line(o: RankingObservation) -> str:
    obj = {
        "app_id": o.app_id,
        "date": o.date.isoformat(),
        "category": o.category,
        "rank": o.rank,
    }
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def snapshot_to_text(snapshot: Snapshot) -> str:
    """Canonical serialization: records sorted by app_id, one per line."""
    lines = [
        record_to_line(snapshot.records[app_id], snapshot.date)
        for app_id in sorted(snapshot.records)
    ]
    return "".join(line + "\n" for line in lines)


class SnapshotStore:
    """Directory-backed snapshot store.

    <root>/snapshots/<YYYY-MM-DD>.jsonl  one canonical file per date
    <root>/index.json                    sorted list of stored dates
    """

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.snapshot_dir = self.root / "snapshots"
        self.index_path = self.root / "index.json"

    def _read_index(self) -> list:
        if not self.index_path.exists():
            return []
        try:
            obj = json.loads(self.index_path.read_text(encoding="utf-8"))
            return [date.fromisoformat(d) for d in obj["dates"]]
        except (OSError, ValueError, KeyError) as e:
            raise IoFailure(f"corrupt index at {self.index_path}: {e}") from None

    def _write_index(self, dates: list) -> None:
        payload = {"version": 1, "dates": [d.isoformat() for d in sorted(dates)]}
        self.index_path.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def _path_for(self, d: date) -> Path:
        return self.snapshot_dir / f"{d.isoformat()}.jsonl"

    def persist(self, snapshot: Snapshot, overwrite: bool = False) -> str:
        """Write one snapshot; returns the stored key (the ISO date).

        overwrite=False enforces the single-writer contract: a second write
        to the same date is an error, not a silent replace.
        """
        path = self._path_for(snapshot.date)
        if path.exists() and not overwrite:
            raise IoFailure(f"snapshot for {snapshot.date} already stored at {path}")
        try:
            self.snapshot_dir.mkdir(parents=True, exist_ok=True)
            path.write_text(snapshot_to_text(snapshot), encoding="utf-8")
        except OSError as e:
            raise IoFailure(f"cannot write {path}: {e}") from None
        dates = set(self._read_index())
        dates.add(snapshot.date)
        self._write_index(sorted(dates))
        return snapshot.date.isoformat()

    def load(self, d: date) -> Snapshot:
        path = self._path_for(d)
        if not path.exists():
            raise SnapshotNotFound(d)
        try:
            with path.open(encoding="utf-8") as f:
                return parse_snapshot_file(f, d)
        except OSError as e:
            raise IoFailure(f"cannot read {path}: {e}") from None

    def dates(self) -> list:
        """Stored dates, ascending."""
        return sorted(self._read_index())

    def load_range(self, start: Optional[date] = None, end: Optional[date] = None) -> list:
        """Snapshots for stored dates within [start, end], ascending."""
        out = []
        for d in self.dates():
            if start is not None and d < start:
                continue
            if end is not None and d > end:
                continue
            out.append(self.load(d))
        return out
