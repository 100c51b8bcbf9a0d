import math
from collections import Counter
from datetime import timedelta

import pytest
from hypothesis import given
from hypothesis import strategies as st

from delist.daily import Window
from delist.market import Review, normalize_review_text
from delist.reviews import (
    CONDITION_1,
    CONDITION_2,
    AbnormalParams,
    abnormal_users,
    daily_review_stats,
    duplicate_stats,
    review_signal_bundle,
    star_distribution,
    word_count,
)

from conftest import day


def test_word_count():
    assert word_count("one two  three") == 3
    assert word_count("   ") == 0
    assert word_count("hy-phen stays one") == 3


class TestDuplicateStats:
    def test_frozen_example(self, mk_review):
        reviews = [
            mk_review("a", day(0), text="x"),
            mk_review("a", day(1), text="x"),
            mk_review("a", day(2), text="y"),
        ]
        assert duplicate_stats(reviews) == (2, pytest.approx(2 / 3))

    def test_whole_group_counts(self, mk_review):
        reviews = [mk_review("a", day(i), text="same") for i in range(4)]
        assert duplicate_stats(reviews) == (4, 1.0)

    def test_normalization_not_casefold(self, mk_review):
        a = mk_review("a", day(0), text="Great  app ")
        b = mk_review("a", day(1), text="Great app")
        c = mk_review("a", day(2), text="great app")
        count, _ = duplicate_stats([a, b, c])
        assert count == 2  # case differs, so c stands alone

    def test_empty(self):
        assert duplicate_stats([]) == (0, 0.0)

    def test_multi_app_rejected(self, mk_review):
        with pytest.raises(ValueError):
            duplicate_stats([mk_review("a", day(0)), mk_review("b", day(0))])

    @given(st.lists(st.sampled_from(["p", "q", "r", "s "]), max_size=40))
    def test_matches_pairwise_oracle(self, texts):
        reviews = [
            Review("a", f"u{i}", day(0), 5, t) for i, t in enumerate(texts)
        ]
        norm = [normalize_review_text(t) for t in texts]
        expected = sum(
            1
            for i in range(len(norm))
            if any(norm[i] == norm[j] for j in range(len(norm)) if j != i)
        )
        count, frac = duplicate_stats(reviews)
        assert count == expected
        assert frac == (expected / len(texts) if texts else 0.0)


class TestStars:
    def test_distribution(self, mk_review):
        reviews = [mk_review("a", day(0), stars=s) for s in (5, 5, 5, 1)]
        fractions, five = star_distribution(reviews)
        assert fractions == (0.25, 0.0, 0.0, 0.0, 0.75)
        assert five == 0.75

    def test_empty(self):
        assert star_distribution([]) == ((0.0,) * 5, 0.0)


class TestAbnormalUsers:
    def texts(self):
        long = "this app changed my life forever truly"  # 7 words
        return long

    def test_strictly_more_than_m_words(self, mk_review):
        five = "one two three four five"
        six = "one two three four five six"
        reviews = [mk_review("a", day(0), text=five, user=f"f{i}") for i in range(10)]
        reviews += [mk_review("a", day(0), text=six, user=f"s{i}") for i in range(10)]
        report = abnormal_users(reviews, AbnormalParams(5, 10))
        assert report.users == frozenset(f"s{i}" for i in range(10))

    def test_occurrences_include_self(self, mk_review):
        text = self.texts()
        reviews = [mk_review("a", day(0), text=text, user=f"u{i}") for i in range(2)]
        report = abnormal_users(reviews, AbnormalParams(5, 2))
        assert len(report.review_ids) == 2

    def test_global_counting_spans_apps(self, mk_review):
        text = self.texts()
        reviews = [
            mk_review(f"app{i}", day(0), text=text, user=f"u{i}") for i in range(10)
        ]
        report = abnormal_users(reviews, CONDITION_1)
        assert len(report.users) == 10
        # each app sees one abnormal user even though no app has 10 copies
        assert report.per_app_user_count == {f"app{i}": 1 for i in range(10)}

    def test_per_app_counts_distinct_users(self, mk_review):
        text = self.texts()
        reviews = [
            mk_review("a", day(i), text=text, user="dupe") for i in range(12)
        ]
        report = abnormal_users(reviews, CONDITION_1)
        assert report.per_app_user_count == {"a": 1}
        assert len(report.review_ids) == 12

    def test_condition_constants(self):
        assert (CONDITION_1.min_words, CONDITION_1.min_occurrences) == (5, 10)
        assert (CONDITION_2.min_words, CONDITION_2.min_occurrences) == (10, 20)

    def test_param_bounds(self):
        with pytest.raises(ValueError):
            AbnormalParams(0, 10)
        with pytest.raises(ValueError):
            AbnormalParams(5, 1)

    def test_monotone_in_both_thresholds(self, mk_review):
        reviews = []
        for i in range(25):
            reviews.append(
                mk_review("a", day(0), text="w " * (i % 15 + 1), user=f"u{i}")
            )
            reviews.append(
                mk_review("b", day(0), text="w " * (i % 15 + 1), user=f"v{i}")
            )
        base = abnormal_users(reviews, AbnormalParams(3, 4)).review_ids
        assert abnormal_users(reviews, AbnormalParams(6, 4)).review_ids <= base
        assert abnormal_users(reviews, AbnormalParams(3, 9)).review_ids <= base


class TestDailyStats:
    def test_series_and_population_stddev(self, mk_review):
        w = Window.trailing(day(2), 3)
        reviews = [mk_review("a", day(0))]
        reviews += [mk_review("a", day(1)) for _ in range(2)]
        reviews += [mk_review("a", day(2)) for _ in range(3)]
        series, mean, stddev = daily_review_stats(reviews, w)
        assert series.values == (1, 2, 3)
        assert mean == 2.0
        assert stddev == pytest.approx(math.sqrt(2 / 3))

    def test_days_without_reviews_count_zero(self, mk_review):
        w = Window.trailing(day(3), 4)
        series, mean, _ = daily_review_stats([mk_review("a", day(1))], w)
        assert series.values == (0, 1, 0, 0)
        assert mean == 0.25

    def test_outside_window_ignored(self, mk_review):
        w = Window.trailing(day(3), 2)
        series, _, _ = daily_review_stats(
            [mk_review("a", day(0)), mk_review("a", day(9))], w
        )
        assert series.values == (0, 0)


class TestSignalBundle:
    def test_windowing_and_abnormal_intersection(self, mk_review):
        w = Window.trailing(day(30), 30)
        inside = [
            mk_review("a", day(5), text="dup dup", user="x1"),
            mk_review("a", day(6), text="dup dup", user="x2"),
            mk_review("a", day(7), text="solo", stars=1, user="x3"),
        ]
        outside = [mk_review("a", day(0), text="dup dup", user="old")]
        bundle = review_signal_bundle(
            "a", inside + outside, w, abnormal_user_set=frozenset({"x1", "old", "zz"})
        )
        assert bundle.duplicate_count == 2
        assert bundle.duplicate_fraction == pytest.approx(2 / 3)
        assert bundle.star_fractions[4] == pytest.approx(2 / 3)
        assert bundle.five_star_fraction == pytest.approx(2 / 3)
        # "old" reviewed outside the window, "zz" never reviewed this app
        assert bundle.abnormal_user_count == 1
        assert sum(bundle.daily_counts.values) == 3

    def test_empty_window_is_all_zero(self):
        w = Window.trailing(day(10), 5)
        bundle = review_signal_bundle("a", [], w)
        assert bundle.duplicate_count == 0
        assert bundle.star_fractions == (0.0,) * 5
        assert bundle.daily_stddev == 0.0
