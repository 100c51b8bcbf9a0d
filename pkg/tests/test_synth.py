import json
from datetime import timedelta

import pytest

from delist.daily import Window
from delist.errors import ConfigInvalid
from delist.keywords import keyword_daily_series, weekly_surge
from delist.reviews import duplicate_stats
from delist.synth import (
    BASE_DATE,
    GeneratedMarket,
    MarketConfig,
    describe_plant,
    generate_market,
    write_market,
)

SMALL = MarketConfig(n_apps=40, days=80, removal_cycle_days=30, seed=7)


@pytest.fixture(scope="module")
def small_market():
    return generate_market(SMALL)


class TestConfigValidation:
    def test_defaults_are_valid(self):
        MarketConfig().validate()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_apps": 19},
            {"days": 13},
            {"fraud_fraction": -0.1},
            {"fraud_fraction": 1.5},
            {"relaunch_fraction": 2.0},
            {"off_cycle_probability": -1.0},
            {"removal_cycle_days": 1},
            {"days": 40, "removal_cycle_days": 30},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ConfigInvalid):
            MarketConfig(**kwargs).validate()

    def test_generate_validates(self):
        with pytest.raises(ConfigInvalid):
            generate_market(MarketConfig(n_apps=5))


class TestDeterminism:
    def test_same_seed_same_market(self, small_market):
        again = generate_market(SMALL)
        assert isinstance(again, GeneratedMarket)
        assert describe_plant(again) == describe_plant(small_market)
        assert again.snapshots == small_market.snapshots
        assert again.reviews == small_market.reviews
        assert again.keyword_observations == small_market.keyword_observations
        assert again.rankings == small_market.rankings

    def test_different_seed_differs(self, small_market):
        other = generate_market(
            MarketConfig(n_apps=40, days=80, removal_cycle_days=30, seed=8)
        )
        assert describe_plant(other) != describe_plant(small_market)

    def test_write_market_byte_identical(self, tmp_path):
        cfg = MarketConfig(n_apps=25, days=50, removal_cycle_days=20, seed=3)
        for sub in ("a", "b"):
            write_market(generate_market(cfg), tmp_path / sub)
        a_files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
        b_files = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
        assert a_files == b_files and a_files
        for rel in a_files:
            assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes(), rel


class TestPlantedStructure:
    def test_label_balance(self, small_market):
        labels = small_market.labels()
        assert len(labels) == 40
        assert sum(labels.values()) == round(40 * SMALL.fraud_fraction)

    def test_fraud_fraction_zero_all_negative(self):
        market = generate_market(
            MarketConfig(n_apps=24, days=50, removal_cycle_days=20,
                         fraud_fraction=0.0, seed=1)
        )
        assert not any(market.labels().values())
        assert all(p.removal_date is None for p in market.planted.values())

    def test_removals_near_waves(self, small_market):
        wave_offsets = [(d - BASE_DATE).days for d in small_market.wave_days]
        for p in small_market.planted.values():
            if p.removal_date is None:
                continue
            off = (p.removal_date - BASE_DATE).days
            assert min(abs(off - w) for w in wave_offsets) <= 3

    def test_every_fraud_app_removed(self, small_market):
        for p in small_market.planted.values():
            assert (p.removal_date is not None) == p.fraud
            if p.fraud:
                assert p.reference_date == p.removal_date

    def test_relaunch_gaps(self, small_market):
        gaps = [
            (p.relaunch_date - p.removal_date).days
            for p in small_market.planted.values()
            if p.relaunch_date is not None
        ]
        assert all(1 <= g <= 4 for g in gaps)

    def test_spikes_sit_just_before_removal(self, small_market):
        spiked = [p for p in small_market.planted.values() if p.spike_date]
        assert spiked
        for p in spiked:
            assert p.fraud
            delta = (p.removal_date - p.spike_date).days
            assert 1 <= delta <= 3
            assert p.spike_magnitude == SMALL.fraud.kw_spike_magnitude

    def test_presence_matches_plant(self, small_market):
        by_date = {s.date: s for s in small_market.snapshots}
        for p in small_market.planted.values():
            assert p.app_id in by_date[BASE_DATE].records
            if p.removal_date is not None:
                assert p.app_id not in by_date[p.removal_date].records
                day_before = p.removal_date - timedelta(days=1)
                assert p.app_id in by_date[day_before].records
            if p.relaunch_date is not None:
                assert p.app_id in by_date[p.relaunch_date].records

    def test_review_dates_inside_trailing_month(self, small_market):
        refs = {p.app_id: p.reference_date for p in small_market.planted.values()}
        assert small_market.reviews
        for r in small_market.reviews:
            ref = refs[r.app_id]
            assert ref - timedelta(days=29) <= r.date < ref


class TestPlantedSignals:
    def test_dup_fractions_recoverable(self, small_market):
        by_app: dict = {}
        for r in small_market.reviews:
            by_app.setdefault(r.app_id, []).append(r)
        frac_by_class = {True: [], False: []}
        for p in small_market.planted.values():
            revs = by_app.get(p.app_id, [])
            if len(revs) < 20:
                continue
            _, frac = duplicate_stats(revs)
            frac_by_class[p.fraud].append(frac)
        for fraud, planted_rate in ((True, SMALL.fraud.dup_rate), (False, SMALL.normal.dup_rate)):
            vals = frac_by_class[fraud]
            assert vals
            mean = sum(vals) / len(vals)
            assert mean == pytest.approx(planted_rate, abs=0.1)

    def test_spiked_apps_trip_weekly_surge(self, small_market):
        spiked = [p for p in small_market.planted.values() if p.spike_date]
        assert spiked
        for p in spiked:
            obs = [o for o in small_market.keyword_observations if o.app_id == p.app_id]
            window = Window.trailing(p.reference_date, 7)
            series = keyword_daily_series(obs, window)
            assert weekly_surge(series, threshold=1000)

    def test_ground_truth_sidecar(self, tmp_path, small_market):
        write_market(small_market, tmp_path)
        raw = json.loads((tmp_path / "ground_truth.json").read_text(encoding="utf-8"))
        assert raw["config"]["n_apps"] == 40
        assert len(raw["apps"]) == 40
        assert raw["wave_days"] == [d.isoformat() for d in small_market.wave_days]
        for app_id, entry in raw["apps"].items():
            p = small_market.planted[app_id]
            assert entry["fraud"] == p.fraud
            if p.spike_date:
                assert entry["spike_date"] == p.spike_date.isoformat()
                assert entry["spike_magnitude"] == p.spike_magnitude

    def test_store_layout_written(self, tmp_path, small_market):
        write_market(small_market, tmp_path)
        for name in ("reviews.jsonl", "keywords.jsonl", "rankings.jsonl", "ground_truth.json"):
            assert (tmp_path / name).is_file()
        dated = sorted((tmp_path / "snapshots").glob("*.jsonl"))
        assert len(dated) == SMALL.days
