"""Deterministic synthetic app market with planted ground truth.

The generator plants every signal the pipeline is supposed to find, so each
stage can be checked against known parameters instead of real-world data:

- removals cluster on a fixed day-cycle grid (plus a little near-grid
  jitter), so peak detection has a known period to recover;
- fraud apps get a high duplicate-review rate, a near-1 five-star share,
  reviews drawn from a shared abnormal-text pool, a keyword-count spike
  shortly before removal, and low description coverage;
- normal apps get calm versions of everything and are never removed;
- fraud apps live under developers who own only fraud apps, and the number
  of clean developers is derived so the all-removed developer share lands
  on the configured fraction.

Generation is single-threaded and draws from one seeded Generator in a
fixed order: the same config yields byte-identical output files.

Token shapes matter: keyword tokens are fixed-width ("kw00042"), filler
description words use a disjoint prefix, and synthetic review texts embed
app ids and serial numbers. This guarantees substring-based coverage
checks and text-equality duplicate checks measure exactly the planted
rates, with no accidental collisions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigInvalid
from .market import (
    AppRecord,
    KeywordObservation,
    RankingObservation,
    Review,
    Snapshot,
    keywords_to_line,
    ranking_to_line,
    review_to_line,
)

BASE_DATE = date(2024, 1, 1)

CATEGORIES = (
    "Games",
    "Business",
    "Lifestyle",
    "Utilities",
    "Education",
    "Finance",
    "Travel",
    "Music",
)

GROUND_TRUTH_VERSION = 1

REVIEW_HISTORY_DAYS = 30
KEYWORD_HISTORY_DAYS = 14


def _check_rate(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigInvalid(f"{name} must be in [0,1], got {value}")


@dataclass(frozen=True)
class FraudProfile:
    dup_rate: float = 0.6
    five_star_rate: float = 0.95
    abnormal_text_pool_size: int = 12
    kw_spike_magnitude: int = 1500
    kw_spike_probability: float = 0.8
    coverage_low: float = 0.05
    reviews_per_day: float = 12.0
    abnormal_review_rate: float = 0.05

    def validate(self) -> None:
        for name in ("dup_rate", "five_star_rate", "kw_spike_probability",
                     "coverage_low", "abnormal_review_rate"):
            _check_rate(f"fraud.{name}", getattr(self, name))
        if self.abnormal_text_pool_size < 1:
            raise ConfigInvalid("fraud.abnormal_text_pool_size must be >= 1")
        if self.kw_spike_magnitude < 0:
            raise ConfigInvalid("fraud.kw_spike_magnitude must be >= 0")


@dataclass(frozen=True)
class NormalProfile:
    dup_rate: float = 0.05
    five_star_rate: float = 0.6
    kw_stddev_low: int = 3
    coverage_high: float = 0.5
    reviews_per_day: float = 4.0

    def validate(self) -> None:
        for name in ("dup_rate", "five_star_rate", "coverage_high"):
            _check_rate(f"normal.{name}", getattr(self, name))
        if self.kw_stddev_low < 0:
            raise ConfigInvalid("normal.kw_stddev_low must be >= 0")


@dataclass(frozen=True)
class DeveloperMix:
    all_removed_dev_fraction: float = 0.7
    apps_per_dev: tuple = (1, 4)

    def validate(self) -> None:
        _check_rate("developers.all_removed_dev_fraction", self.all_removed_dev_fraction)
        lo, hi = self.apps_per_dev
        if not 1 <= lo <= hi:
            raise ConfigInvalid(f"apps_per_dev range invalid: {self.apps_per_dev}")


@dataclass(frozen=True)
class MarketConfig:
    n_apps: int = 800
    fraud_fraction: float = 0.5
    days: int = 150
    removal_cycle_days: int = 30
    fraud: FraudProfile = field(default_factory=FraudProfile)
    normal: NormalProfile = field(default_factory=NormalProfile)
    developers: DeveloperMix = field(default_factory=DeveloperMix)
    relaunch_fraction: float = 0.1
    off_cycle_probability: float = 0.2
    seed: int = 0

    def validate(self) -> None:
        if self.n_apps < 20:
            raise ConfigInvalid(f"n_apps must be >= 20, got {self.n_apps}")
        if self.days < 14:
            raise ConfigInvalid(f"days must be >= 14, got {self.days}")
        _check_rate("fraud_fraction", self.fraud_fraction)
        _check_rate("relaunch_fraction", self.relaunch_fraction)
        _check_rate("off_cycle_probability", self.off_cycle_probability)
        if self.removal_cycle_days < 2:
            raise ConfigInvalid(
                f"removal_cycle_days must be >= 2, got {self.removal_cycle_days}"
            )
        if self.removal_cycle_days // 2 + self.removal_cycle_days >= self.days:
            raise ConfigInvalid(
                f"days={self.days} too short for two removal waves of cycle "
                f"{self.removal_cycle_days}"
            )
        self.fraud.validate()
        self.normal.validate()
        self.developers.validate()

    def to_dict(self) -> dict:
        return {
            "n_apps": self.n_apps,
            "fraud_fraction": self.fraud_fraction,
            "days": self.days,
            "removal_cycle_days": self.removal_cycle_days,
            "fraud": dict(vars(self.fraud)),
            "normal": dict(vars(self.normal)),
            "developers": {
                "all_removed_dev_fraction": self.developers.all_removed_dev_fraction,
                "apps_per_dev": list(self.developers.apps_per_dev),
            },
            "relaunch_fraction": self.relaunch_fraction,
            "off_cycle_probability": self.off_cycle_probability,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class PlantedApp:
    """Ground truth for one generated app."""

    app_id: str
    fraud: bool
    developer: str
    category: str
    reference_date: date
    removal_date: Optional[date]
    relaunch_date: Optional[date]
    spike_date: Optional[date]
    spike_magnitude: Optional[int]
    dup_rate: float
    five_star_rate: float
    coverage: float


@dataclass(frozen=True)
class GeneratedMarket:
    config: MarketConfig
    snapshots: tuple
    reviews: tuple
    keyword_observations: tuple
    rankings: tuple
    planted: dict  # app_id -> PlantedApp
    wave_days: tuple

    def labels(self) -> dict:
        return {app_id: p.fraud for app_id, p in self.planted.items()}


def _keyword_token(i: int) -> str:
    return f"kw{i:05d}"


def _filler_token(i: int) -> str:
    return f"w{i:04d}"


_ABNORMAL_FILLER = "please install this top rated bonus offer now"  # 8 words


def _abnormal_texts(pool_size: int) -> list:
    # 12 words each: > 10, so both default conditions can fire
    return [
        f"promo blast {i:03d} wave {_ABNORMAL_FILLER}" for i in range(pool_size)
    ]


def _wave_days(config: MarketConfig) -> list:
    first = config.removal_cycle_days // 2
    return list(range(first, config.days - 1, config.removal_cycle_days))


def generate_market(config: MarketConfig = MarketConfig()) -> GeneratedMarket:
    """Build one synthetic market; see the module docstring for what gets
    planted where."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    n_fraud = round(config.n_apps * config.fraud_fraction)
    last_day = config.days - 1
    waves = _wave_days(config)

    universe_size = max(2048, config.fraud.kw_spike_magnitude + 512)
    tokens = [_keyword_token(i) for i in range(universe_size)]
    abnormal_pool = _abnormal_texts(config.fraud.abnormal_text_pool_size)

    # --- developers: fraud apps live under "toxic" devs that own nothing
    # else; the clean-dev count is derived so toxic/(toxic+clean) hits the
    # configured all-removed fraction.
    lo, hi = config.developers.apps_per_dev
    fraud_devs: list = []
    remaining = n_fraud
    while remaining > 0:
        take = min(int(rng.integers(lo, hi + 1)), remaining)
        fraud_devs.append(take)
        remaining -= take
    n_toxic = len(fraud_devs)
    n_normal = config.n_apps - n_fraud
    f = config.developers.all_removed_dev_fraction
    if n_normal == 0:
        n_clean = 0
    elif n_toxic == 0 or f >= 1.0:
        n_clean = 1
    elif f <= 0.0:
        n_clean = n_normal  # one app per dev; fraction stays at its minimum
    else:
        n_clean = max(1, round(n_toxic * (1.0 - f) / f))
    n_clean = min(n_clean, n_normal) if n_normal else 0

    dev_names = [f"dev{j:04d}" for j in range(n_toxic + n_clean)]
    dev_of_fraud: list = []
    for j, size in enumerate(fraud_devs):
        dev_of_fraud.extend([dev_names[j]] * size)
    dev_of_normal = [
        dev_names[n_toxic + (i % n_clean)] if n_clean else "dev_none"
        for i in range(n_normal)
    ]

    records: dict = {}
    planted: dict = {}
    reviews: list = []
    observations: list = []
    rankings: list = []
    presence: dict = {}
    user_serial = 0
    review_serial = 0

    def make_reviews(app_id, ref_day, n_days, rate, dup_rate, five_rate,
                     dup_pool, abnormal_rate):
        nonlocal user_serial, review_serial
        out = []
        # days ref-n+1 .. ref-1: inside the trailing review window at ref
        first = max(0, ref_day - n_days + 1)
        counts = rng.poisson(rate, size=ref_day - first)
        for offset, n_today in zip(range(first, ref_day), counts):
            d = BASE_DATE + timedelta(days=int(offset))
            for _ in range(int(n_today)):
                roll = rng.random()
                if roll < dup_rate:
                    text = dup_pool[int(rng.integers(0, len(dup_pool)))]
                elif abnormal_rate and roll < dup_rate + abnormal_rate:
                    text = abnormal_pool[int(rng.integers(0, len(abnormal_pool)))]
                else:
                    text = f"review {review_serial:06d} of {app_id} says fine"
                stars = 5 if rng.random() < five_rate else int(rng.integers(1, 5))
                out.append(
                    Review(app_id, f"u{user_serial:06d}", d, stars, text)
                )
                user_serial += 1
                review_serial += 1
        return out

    def make_description(app_id, home_tokens, floor_count, coverage):
        # anchor coverage to tokens present in EVERY daily set, so an
        # unspiked window measures close to the planted fraction
        n_cover = round(coverage * floor_count)
        filler = [_filler_token(int(v)) for v in rng.integers(0, 10000, size=25)]
        return " ".join([f"{app_id} utility"] + home_tokens[:n_cover] + filler)

    for i in range(config.n_apps):
        app_id = f"app{i:04d}"
        fraud = i < n_fraud
        category = CATEGORIES[int(rng.integers(0, len(CATEGORIES)))]
        developer = dev_of_fraud[i] if fraud else dev_of_normal[i - n_fraud]

        removal_day: Optional[int] = None
        relaunch_day: Optional[int] = None
        spike_day: Optional[int] = None
        spike_magnitude: Optional[int] = None
        if fraud:
            wave = waves[int(rng.integers(0, len(waves)))]
            removal_day = wave
            if rng.random() < config.off_cycle_probability:
                sign = 1 if rng.random() < 0.5 else -1
                removal_day = wave + sign * int(rng.integers(1, 4))
            removal_day = max(1, min(removal_day, last_day))
            if rng.random() < config.relaunch_fraction:
                gap = 1 + min(int(rng.geometric(0.5)) - 1, 3)
                if removal_day + gap < last_day:
                    relaunch_day = removal_day + gap

        ref_day = removal_day if removal_day is not None else last_day
        ref_date = BASE_DATE + timedelta(days=ref_day)

        release = BASE_DATE - timedelta(days=31 + int(rng.integers(0, 300)))
        update = release + timedelta(days=int(rng.integers(0, 31)))
        price = 0.0 if rng.random() < 0.8 else round(float(rng.integers(99, 999)) / 100, 2)

        # --- keywords
        home_tokens = [tokens[t] for t in rng.permutation(universe_size)]
        jitter = config.normal.kw_stddev_low
        if fraud:
            base_count = int(rng.integers(20, 61))
            if rng.random() < config.fraud.kw_spike_probability:
                delay = min(int(rng.geometric(0.6)), 3)
                spike_day = max(1, ref_day - delay)
                spike_magnitude = config.fraud.kw_spike_magnitude
            coverage = config.fraud.coverage_low
        else:
            base_count = int(rng.integers(120, 181))
            coverage = config.normal.coverage_high
        first_obs = max(0, ref_day - (KEYWORD_HISTORY_DAYS - 1))
        for offset in range(first_obs, ref_day + 1):
            count = base_count + (int(rng.integers(-jitter, jitter + 1)) if jitter else 0)
            if spike_day is not None and offset >= spike_day:
                count += spike_magnitude
            count = max(1, min(count, universe_size))
            observations.append(
                KeywordObservation(
                    app_id,
                    BASE_DATE + timedelta(days=offset),
                    frozenset(home_tokens[:count]),
                )
            )

        description = make_description(
            app_id, home_tokens, max(1, base_count - jitter), coverage
        )

        records[app_id] = AppRecord(
            app_id=app_id,
            app_name=f"App {i:04d}",
            developer_name=developer,
            category=category,
            price=price,
            release_date=release,
            update_date=update,
            rating_count=int(rng.integers(50, 50000)),
            description=description,
        )

        # --- reviews over the last month before the reference date
        # (dup-pool texts stay at five words so they can never trip the
        # more-than-five-words abnormal condition)
        if fraud:
            dup_pool = [f"love this {app_id} pick {p}" for p in range(6)]
            reviews.extend(
                make_reviews(
                    app_id, ref_day, REVIEW_HISTORY_DAYS,
                    config.fraud.reviews_per_day, config.fraud.dup_rate,
                    config.fraud.five_star_rate, dup_pool,
                    config.fraud.abnormal_review_rate,
                )
            )
        else:
            dup_pool = [f"solid handy {app_id} choice {p}" for p in range(2)]
            reviews.extend(
                make_reviews(
                    app_id, ref_day, REVIEW_HISTORY_DAYS,
                    config.normal.reviews_per_day, config.normal.dup_rate,
                    config.normal.five_star_rate, dup_pool, 0.0,
                )
            )

        # --- presence and rankings
        days_present = []
        for d in range(0, removal_day if removal_day is not None else config.days):
            days_present.append(d)
        if relaunch_day is not None:
            days_present.extend(range(relaunch_day, config.days))
        presence[app_id] = days_present

        base_rank = int(rng.integers(1, 5001))
        for d in days_present:
            rank = max(1, base_rank + int(rng.integers(-50, 51)))
            rankings.append(
                RankingObservation(
                    app_id, BASE_DATE + timedelta(days=d), category, rank
                )
            )

        planted[app_id] = PlantedApp(
            app_id=app_id,
            fraud=fraud,
            developer=developer,
            category=category,
            reference_date=ref_date,
            removal_date=(
                BASE_DATE + timedelta(days=removal_day)
                if removal_day is not None
                else None
            ),
            relaunch_date=(
                BASE_DATE + timedelta(days=relaunch_day)
                if relaunch_day is not None
                else None
            ),
            spike_date=(
                BASE_DATE + timedelta(days=spike_day)
                if spike_day is not None
                else None
            ),
            spike_magnitude=spike_magnitude,
            dup_rate=config.fraud.dup_rate if fraud else config.normal.dup_rate,
            five_star_rate=(
                config.fraud.five_star_rate if fraud else config.normal.five_star_rate
            ),
            coverage=coverage,
        )

    # --- snapshots from presence sets
    members: list = [set() for _ in range(config.days)]
    for app_id, days_present in presence.items():
        for d in days_present:
            members[d].add(app_id)
    snapshots = tuple(
        Snapshot(
            BASE_DATE + timedelta(days=d),
            {app_id: records[app_id] for app_id in sorted(members[d])},
        )
        for d in range(config.days)
    )

    return GeneratedMarket(
        config=config,
        snapshots=snapshots,
        reviews=tuple(reviews),
        keyword_observations=tuple(observations),
        rankings=tuple(rankings),
        planted=planted,
        wave_days=tuple(BASE_DATE + timedelta(days=w) for w in waves),
    )


def describe_plant(market: GeneratedMarket) -> dict:
    """Ground-truth sidecar: per-app profile plus generator parameters."""
    apps = {}
    for app_id, p in sorted(market.planted.items()):
        apps[app_id] = {
            "fraud": p.fraud,
            "developer": p.developer,
            "category": p.category,
            "reference_date": p.reference_date.isoformat(),
            "removal_date": p.removal_date.isoformat() if p.removal_date else None,
            "relaunch_date": p.relaunch_date.isoformat() if p.relaunch_date else None,
            "spike_date": p.spike_date.isoformat() if p.spike_date else None,
            "spike_magnitude": p.spike_magnitude,
            "dup_rate": p.dup_rate,
            "five_star_rate": p.five_star_rate,
            "coverage": p.coverage,
        }
    return {
        "version": GROUND_TRUTH_VERSION,
        "config": market.config.to_dict(),
        "base_date": BASE_DATE.isoformat(),
        "wave_days": [d.isoformat() for d in market.wave_days],
        "apps": apps,
    }


def write_market(market: GeneratedMarket, root) -> None:
    """Persist a generated market in the standard store layout plus the
    auxiliary streams and the ground-truth sidecar."""
    from .market import SnapshotStore

    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    store = SnapshotStore(root)
    for snap in market.snapshots:
        store.persist(snap, overwrite=True)
    (root / "reviews.jsonl").write_text(
        "".join(review_to_line(r) + "\n" for r in market.reviews), encoding="utf-8"
    )
    (root / "keywords.jsonl").write_text(
        "".join(keywords_to_line(o) + "\n" for o in market.keyword_observations),
        encoding="utf-8",
    )
    (root / "rankings.jsonl").write_text(
        "".join(ranking_to_line(o) + "\n" for o in market.rankings), encoding="utf-8"
    )
    (root / "ground_truth.json").write_text(
        json.dumps(describe_plant(market), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
