import dataclasses
import warnings
from datetime import timedelta

import numpy as np
import pytest

from delist.errors import EmptyInput
from delist.features import (
    FEATURE_NAMES,
    NO_KEYWORDS,
    NO_REVIEWS,
    AppBundle,
    FeatureConfig,
    FeatureVector,
    assemble_bundles,
    build_dataset,
    build_feature_vector,
    load_dataset,
    save_dataset,
    truncate_bundle,
)
from delist.diffing import build_timelines
from delist.market import KeywordObservation
from delist.reviews import AbnormalParams

from conftest import day


def kw(d, n, app_id="a"):
    return KeywordObservation.from_raw(app_id, d, [f"k{i}" for i in range(n)])


def bundle(
    mk_record, mk_review, reviews=None, observations=None, ref=day(40), label=True,
    app_id="a", description="",
):
    return AppBundle(
        record=mk_record(app_id, description=description),
        reviews=tuple(reviews or []),
        keyword_observations=tuple(observations or []),
        reference_date=ref,
        label=label,
    )


class TestBundle:
    def test_data_after_reference_rejected(self, mk_record, mk_review):
        with pytest.raises(ValueError):
            bundle(mk_record, mk_review, reviews=[mk_review("a", day(41))])
        with pytest.raises(ValueError):
            bundle(mk_record, mk_review, observations=[kw(day(41), 1)])

    def test_truncation_boundary(self, mk_record, mk_review):
        b = bundle(
            mk_record,
            mk_review,
            reviews=[mk_review("a", day(39)), mk_review("a", day(38))],
            observations=[kw(day(40), 3), kw(day(34), 2)],
        )
        t1 = truncate_bundle(b, 1)
        # a review dated ref-1 survives k=1 (cutoff keeps dates <= ref-1)
        assert [r.date for r in t1.reviews] == [day(39), day(38)]
        assert [o.date for o in t1.keyword_observations] == [day(34)]
        t2 = truncate_bundle(b, 2)
        assert [r.date for r in t2.reviews] == [day(38)]
        assert t2.reference_date == day(40)
        assert t2.label is True

    def test_k0_is_identity(self, mk_record, mk_review):
        b = bundle(mk_record, mk_review, reviews=[mk_review("a", day(40))])
        assert truncate_bundle(b, 0) is b

    def test_negative_k_rejected(self, mk_record, mk_review):
        with pytest.raises(ValueError):
            truncate_bundle(bundle(mk_record, mk_review), -1)


class TestFeatureVector:
    def test_names_match_field_order(self):
        field_names = [
            f.name for f in dataclasses.fields(FeatureVector) if f.name != "sparsity"
        ]
        assert list(FEATURE_NAMES) == field_names
        assert len(FEATURE_NAMES) == 13

    def test_empty_windows_yield_zeros_and_sparsity(self, mk_record, mk_review):
        v = build_feature_vector(bundle(mk_record, mk_review))
        assert v.to_tuple() == (0.0,) * 13
        assert set(v.sparsity) == {NO_REVIEWS, NO_KEYWORDS}

    def test_populated_vector(self, mk_record, mk_review):
        reviews = [
            mk_review("a", day(40), text="dup text", stars=5, user="u1"),
            mk_review("a", day(40), text="dup text", stars=5, user="u2"),
            mk_review("a", day(12), text="old", stars=1, user="u3"),
        ]
        observations = [kw(day(40), 4), kw(day(37), 2)]
        v = build_feature_vector(
            bundle(mk_record, mk_review, reviews, observations, description="k0 k1")
        )
        assert v.review_count_mean == pytest.approx(3 / 30)
        assert v.star5_fraction == pytest.approx(2 / 3)
        assert v.duplicate_review_fraction == pytest.approx(2 / 3)
        assert v.keyword_coverage_count == 2.0
        assert v.sparsity == ()
        # carry-forward over the 7-day window: 0,0,0,0,2,2,2 exclusive of obs day 4?
        assert v.keyword_count_mean == pytest.approx((2 * 3 + 4) / 7)

    def test_abnormal_counts_windowed_users(self, mk_record, mk_review):
        reviews = [mk_review("a", day(40), user="x"), mk_review("a", day(1), user="y")]
        v = build_feature_vector(
            bundle(mk_record, mk_review, reviews),
            abnormal_user_set=frozenset({"x", "y"}),
        )
        assert v.abnormal_user_count == 1.0


class TestDataset:
    def corpus(self, mk_record, mk_review):
        shared = "a suspiciously long promotional blurb here"  # 7 words, shared
        bundles = []
        for i in range(4):
            app = f"app{i}"
            reviews = [
                mk_review(app, day(35), text=shared, user=f"bot{i}-{j}")
                for j in range(3)
            ]
            bundles.append(
                AppBundle(
                    record=mk_record(app),
                    reviews=tuple(reviews),
                    keyword_observations=(kw(day(38), 3, app_id=app),),
                    reference_date=day(40),
                    label=i % 2 == 0,
                )
            )
        return bundles

    def test_rows_in_input_order(self, mk_record, mk_review):
        ds = build_dataset(self.corpus(mk_record, mk_review))
        assert ds.app_ids == ("app0", "app1", "app2", "app3")
        assert ds.matrix.shape == (4, 13)
        assert ds.labels.tolist() == [1, 0, 1, 0]

    def test_abnormal_table_is_global(self, mk_record, mk_review):
        # 12 copies of the shared text exist only across apps; per-app there
        # are 3, under the occurrence floor
        ds = build_dataset(
            self.corpus(mk_record, mk_review),
            FeatureConfig(abnormal_params=AbnormalParams(5, 10)),
        )
        col = list(ds.feature_names).index("abnormal_user_count")
        assert ds.matrix[:, col].tolist() == [3.0, 3.0, 3.0, 3.0]

    def test_truncation_applies_before_global_table(self, mk_record, mk_review):
        ds = build_dataset(
            self.corpus(mk_record, mk_review),
            FeatureConfig(abnormal_params=AbnormalParams(5, 10)),
            advance_days=6,
        )
        col = list(ds.feature_names).index("abnormal_user_count")
        assert ds.matrix[:, col].tolist() == [0.0] * 4
        assert ds.advance_days == 6

    def test_single_class_warns(self, mk_record, mk_review):
        bundles = [
            b if b.label else dataclasses.replace(b, label=True)
            for b in self.corpus(mk_record, mk_review)
        ]
        with pytest.warns(UserWarning):
            build_dataset(bundles)

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            build_dataset([])

    def test_save_load_roundtrip_exact(self, tmp_path, mk_record, mk_review):
        ds = build_dataset(self.corpus(mk_record, mk_review), advance_days=2)
        path = tmp_path / "data.csv"
        save_dataset(ds, path)
        loaded = load_dataset(path)
        assert (loaded.matrix == ds.matrix).all()
        assert (loaded.labels == ds.labels).all()
        assert loaded.feature_names == ds.feature_names
        assert loaded.app_ids == ds.app_ids
        assert loaded.config == ds.config
        assert loaded.advance_days == 2

    def test_saved_csv_is_stable(self, tmp_path, mk_record, mk_review):
        ds = build_dataset(self.corpus(mk_record, mk_review))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        save_dataset(ds, a)
        save_dataset(ds, b)
        assert a.read_bytes() == b.read_bytes()


class TestAssembly:
    def test_anchoring(self, mk_snapshot, mk_record, mk_review):
        snaps = [
            mk_snapshot(day(0), "gone", "stays"),
            mk_snapshot(day(10), "stays"),
            mk_snapshot(day(20), "stays"),
        ]
        timelines = build_timelines(snaps)
        records = {a: mk_record(a) for a in ("gone", "stays")}
        reviews = [
            mk_review("gone", day(5)),
            mk_review("gone", day(15)),  # after first removal: dropped
            mk_review("stays", day(20)),
        ]
        bundles = assemble_bundles(timelines, records, reviews, [], day(20))
        by_id = {b.app_id: b for b in bundles}
        assert by_id["gone"].label is True
        assert by_id["gone"].reference_date == day(10)
        assert [r.date for r in by_id["gone"].reviews] == [day(5)]
        assert by_id["stays"].label is False
        assert by_id["stays"].reference_date == day(20)

    def test_apps_without_records_skipped(self, mk_snapshot):
        snaps = [mk_snapshot(day(0), "x"), mk_snapshot(day(1), "x")]
        timelines = build_timelines(snaps)
        assert assemble_bundles(timelines, {}, [], [], day(1)) == []

    def test_output_sorted_by_app_id(self, mk_snapshot, mk_record):
        snaps = [mk_snapshot(day(0), "b", "a", "c"), mk_snapshot(day(1), "a", "b", "c")]
        timelines = build_timelines(snaps)
        records = {a: mk_record(a) for a in "abc"}
        bundles = assemble_bundles(timelines, records, [], [], day(1))
        assert [b.app_id for b in bundles] == ["a", "b", "c"]
