"""App-market lifecycle analytics and removal prediction.

The pipeline: daily metadata snapshots are diffed into lifecycle events
(appearances, removals, relaunches); removal timing, categories, popularity,
and developer concentration are analyzed; per-app review and search-keyword
signals feed a feature matrix; from-scratch learners predict upcoming
removals, including k days in advance. A deterministic synthetic market
generator provides ground truth for every stage.
"""

from .daily import DailySeries, Window, make_series, series_mean, series_stddev
from .diffing import (
    APPEARED,
    RELAUNCHED,
    REMOVED,
    AppTimeline,
    LifecycleEvent,
    build_timelines,
    diff_run,
    diff_snapshots,
)
from .errors import DelistError
from .features import (
    FEATURE_NAMES,
    AppBundle,
    FeatureConfig,
    FeatureVector,
    LabeledDataset,
    assemble_bundles,
    build_dataset,
    build_feature_vector,
    load_dataset,
    save_dataset,
    truncate_bundle,
)
from .keywords import (
    AsoSignalBundle,
    aso_signal_bundle,
    description_coverage,
    keyword_daily_series,
    weekly_surge,
)
from .lifecycle import (
    CategoryBreakdown,
    DeveloperStats,
    PeakReport,
    PopularityFlag,
    category_breakdown,
    concentration_curve,
    daily_removal_series,
    detect_peaks,
    developer_stats,
    ecdf,
    interval_samples,
    popularity_flag,
    relaunch_within,
)
from .market import (
    AppRecord,
    KeywordObservation,
    RankingObservation,
    Review,
    Snapshot,
    SnapshotStore,
    parse_auxiliary_streams,
    parse_snapshot_file,
)
from .reviews import (
    CONDITION_1,
    CONDITION_2,
    AbnormalParams,
    AbnormalReport,
    ReviewSignalBundle,
    abnormal_users,
    daily_review_stats,
    duplicate_stats,
    review_signal_bundle,
    star_distribution,
)
from .synth import (
    GeneratedMarket,
    MarketConfig,
    PlantedApp,
    describe_plant,
    generate_market,
    write_market,
)

__version__ = "0.1.0"

__all__ = [
    "APPEARED",
    "AbnormalParams",
    "AbnormalReport",
    "AppBundle",
    "AppRecord",
    "AppTimeline",
    "AsoSignalBundle",
    "CONDITION_1",
    "CONDITION_2",
    "CategoryBreakdown",
    "DailySeries",
    "DelistError",
    "DeveloperStats",
    "FEATURE_NAMES",
    "FeatureConfig",
    "FeatureVector",
    "GeneratedMarket",
    "KeywordObservation",
    "LabeledDataset",
    "LifecycleEvent",
    "MarketConfig",
    "PeakReport",
    "PlantedApp",
    "PopularityFlag",
    "RELAUNCHED",
    "REMOVED",
    "RankingObservation",
    "Review",
    "ReviewSignalBundle",
    "Snapshot",
    "SnapshotStore",
    "Window",
    "abnormal_users",
    "aso_signal_bundle",
    "assemble_bundles",
    "build_dataset",
    "build_feature_vector",
    "build_timelines",
    "category_breakdown",
    "concentration_curve",
    "daily_removal_series",
    "daily_review_stats",
    "describe_plant",
    "description_coverage",
    "detect_peaks",
    "developer_stats",
    "diff_run",
    "diff_snapshots",
    "duplicate_stats",
    "ecdf",
    "generate_market",
    "interval_samples",
    "keyword_daily_series",
    "load_dataset",
    "make_series",
    "parse_auxiliary_streams",
    "parse_snapshot_file",
    "popularity_flag",
    "relaunch_within",
    "review_signal_bundle",
    "save_dataset",
    "series_mean",
    "series_stddev",
    "star_distribution",
    "truncate_bundle",
    "weekly_surge",
    "write_market",
]
