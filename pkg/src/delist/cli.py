"""Command-line pipeline driver.

Commands wire the library end to end over a snapshot store directory:

    simulate / ingest -> diff -> analyze / signals -> features
                                                   -> train / evaluate / sweep
    report runs diff + analyze + signals + features in one pass.

Configuration comes from an optional JSON file (--config) whose keys mirror
the flags (store, from, to, out, dataset, seed, k, models, folds,
review_window_days, keyword_window_days, m_words, n_occurrences,
popular_rank, surge_threshold, min_avg_keywords, apps, days, fraud_fraction,
cycle_days); flags win over file values. Report files are deterministic:
re-running a command over identical inputs rewrites identical bytes.

Exit codes: 0 ok, 1 pipeline error (JSON error summary on stderr), 2 usage.
"""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import json
import sys
from collections import Counter
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .daily import Window
from .diffing import build_timelines, diff_run, events_to_csv_lines
from .errors import (
    ConfigInvalid,
    DelistError,
    EmptyRange,
    IoFailure,
    NoRemovals,
)
from .features import (
    FeatureConfig,
    assemble_bundles,
    build_dataset,
    load_dataset,
    save_dataset,
)
from .keywords import (
    DEFAULT_KEYWORD_WINDOW_DAYS,
    DEFAULT_MIN_AVG_KEYWORDS,
    DEFAULT_SURGE_THRESHOLD,
    aso_signal_bundle,
)
from .learn import (
    ALIASES,
    DEFAULT_CV_FOLDS,
    advance_sweep,
    canonical_kind,
    cross_validate,
    evaluate_metrics,
    feature_importances,
    predict_scores,
    save_model,
    train_model,
)
from .lifecycle import (
    DEFAULT_POPULAR_RANK,
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
    SnapshotStore,
    keywords_to_line,
    parse_auxiliary_streams,
    parse_snapshot_file,
    ranking_to_line,
    review_to_line,
)
from .reports import (
    aso_signals_csv,
    category_breakdown_csv,
    concentration_csv,
    daily_removals_csv,
    developer_stats_csv,
    ecdf_csv,
    importances_lines,
    metrics_csv,
    peaks_csv,
    popularity_csv,
    review_signals_csv,
    write_csv,
)
from .reviews import (
    CONDITION_1,
    CONDITION_2,
    DEFAULT_REVIEW_WINDOW_DAYS,
    AbnormalParams,
    abnormal_users,
    review_signal_bundle,
)
from .synth import MarketConfig, generate_market, write_market

_ALIAS_OF = {kind: alias for alias, kind in ALIASES.items()}


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    store_root: Optional[Path] = None
    date_from: Optional[date] = None
    date_to: Optional[date] = None
    out_dir: Optional[Path] = None
    dataset_path: Optional[Path] = None
    seed: int = 0
    k_range: tuple = (0,)
    models: tuple = ("GBDT",)
    folds: int = DEFAULT_CV_FOLDS
    review_window_days: int = DEFAULT_REVIEW_WINDOW_DAYS
    keyword_window_days: int = DEFAULT_KEYWORD_WINDOW_DAYS
    m_words: int = CONDITION_1.min_words
    n_occurrences: int = CONDITION_1.min_occurrences
    popular_rank: int = DEFAULT_POPULAR_RANK
    surge_threshold: int = DEFAULT_SURGE_THRESHOLD
    min_avg_keywords: float = DEFAULT_MIN_AVG_KEYWORDS
    apps: int = 800
    days: int = 150
    fraud_fraction: float = 0.5
    cycle_days: int = 30
    snapshot_files: tuple = ()
    reviews_file: Optional[Path] = None
    keywords_file: Optional[Path] = None
    rankings_file: Optional[Path] = None

    def validate(self) -> None:
        if self.seed < 0:
            raise ConfigInvalid(f"seed must be >= 0, got {self.seed}")
        if self.folds < 2:
            raise ConfigInvalid(f"folds must be >= 2, got {self.folds}")
        for name in ("review_window_days", "keyword_window_days"):
            if getattr(self, name) < 1:
                raise ConfigInvalid(f"{name} must be >= 1")
        if self.m_words < 1:
            raise ConfigInvalid(f"m_words must be >= 1, got {self.m_words}")
        if self.n_occurrences < 2:
            raise ConfigInvalid(
                f"n_occurrences must be >= 2, got {self.n_occurrences}"
            )
        if self.popular_rank < 1:
            raise ConfigInvalid(f"popular_rank must be >= 1, got {self.popular_rank}")
        if self.surge_threshold < 1:
            raise ConfigInvalid(
                f"surge_threshold must be >= 1, got {self.surge_threshold}"
            )
        if self.min_avg_keywords < 0:
            raise ConfigInvalid("min_avg_keywords must be >= 0")
        if not self.models:
            raise ConfigInvalid("at least one model kind is required")


def parse_k_range(value) -> tuple:
    """Accept a single int, 'A..B' (inclusive), or a comma list."""
    if isinstance(value, int) and not isinstance(value, bool):
        ks: tuple = (value,)
    elif isinstance(value, (list, tuple)):
        try:
            ks = tuple(int(v) for v in value)
        except (TypeError, ValueError):
            raise ConfigInvalid(f"bad k range {value!r}") from None
    else:
        s = str(value).strip()
        try:
            if ".." in s:
                a, _, b = s.partition("..")
                ks = tuple(range(int(a), int(b) + 1))
            else:
                ks = tuple(int(p) for p in s.split(","))
        except ValueError:
            raise ConfigInvalid(f"bad k range {value!r}") from None
    if not ks or any(k < 0 for k in ks):
        raise ConfigInvalid(f"k values must be >= 0, got {value!r}")
    return ks


def parse_models(value) -> tuple:
    names = value if isinstance(value, (list, tuple)) else str(value).split(",")
    kinds = tuple(canonical_kind(str(n).strip()) for n in names if str(n).strip())
    if not kinds:
        raise ConfigInvalid(f"no model kinds in {value!r}")
    return kinds


_FILE_KEY_ATTR = {
    "store": "store_root",
    "from": "date_from",
    "to": "date_to",
    "out": "out_dir",
    "dataset": "dataset_path",
    "seed": "seed",
    "k": "k_range",
    "models": "models",
    "folds": "folds",
    "review_window_days": "review_window_days",
    "keyword_window_days": "keyword_window_days",
    "m_words": "m_words",
    "n_occurrences": "n_occurrences",
    "popular_rank": "popular_rank",
    "surge_threshold": "surge_threshold",
    "min_avg_keywords": "min_avg_keywords",
    "apps": "apps",
    "days": "days",
    "fraud_fraction": "fraud_fraction",
    "cycle_days": "cycle_days",
}


def _file_value(key: str, attr: str, value):
    try:
        if attr in ("store_root", "out_dir", "dataset_path"):
            return Path(str(value))
        if attr in ("date_from", "date_to"):
            return date.fromisoformat(str(value))
        if attr == "k_range":
            return parse_k_range(value)
        if attr == "models":
            return parse_models(value)
        if attr in ("fraud_fraction", "min_avg_keywords"):
            return float(value)
        return int(value)
    except (TypeError, ValueError):
        raise ConfigInvalid(f"config key {key!r}: bad value {value!r}") from None


def load_config_file(path: Path) -> dict:
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as e:
        raise ConfigInvalid(f"config file {path}: {e}") from None
    if not isinstance(obj, dict):
        raise ConfigInvalid(f"config file {path} must hold a JSON object")
    return obj


def merge_config(file_cfg: Mapping, args: argparse.Namespace) -> RunConfig:
    """File values first, then any flag that was actually given."""
    cfg = RunConfig()
    for key in sorted(file_cfg):
        attr = _FILE_KEY_ATTR.get(key)
        if attr is None:
            raise ConfigInvalid(f"unknown config key {key!r}")
        setattr(cfg, attr, _file_value(key, attr, file_cfg[key]))
    for f in dataclasses.fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is None:
            continue
        if f.name == "k_range":
            v = parse_k_range(v)
        elif f.name == "models":
            v = parse_models(v)
        elif f.name == "snapshot_files":
            v = tuple(v)
            if not v:
                continue
        setattr(cfg, f.name, v)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# shared pipeline plumbing


def _require_store(cfg: RunConfig) -> SnapshotStore:
    if cfg.store_root is None:
        raise ConfigInvalid("--store is required for this command")
    return SnapshotStore(cfg.store_root)


def _require_out(cfg: RunConfig) -> Path:
    if cfg.out_dir is None:
        raise ConfigInvalid("--out is required for this command")
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return cfg.out_dir


def _single_k(cfg: RunConfig) -> int:
    if len(cfg.k_range) != 1:
        raise ConfigInvalid(
            f"this command takes a single --k value, got {list(cfg.k_range)}"
        )
    return cfg.k_range[0]


def _feature_config(cfg: RunConfig) -> FeatureConfig:
    try:
        params = AbnormalParams(cfg.m_words, cfg.n_occurrences)
    except ValueError as e:
        raise ConfigInvalid(str(e)) from None
    return FeatureConfig(
        review_window_days=cfg.review_window_days,
        keyword_window_days=cfg.keyword_window_days,
        abnormal_params=params,
    )


@dataclass
class MarketData:
    snapshots: list
    events: list
    timelines: dict
    records: dict
    reviews: list
    observations: list
    rankings: list
    aux_errors: list

    @property
    def last_date(self) -> date:
        return self.snapshots[-1].date


def _load_market_data(cfg: RunConfig) -> MarketData:
    store = _require_store(cfg)
    snapshots = store.load_range(cfg.date_from, cfg.date_to)
    if not snapshots:
        raise EmptyRange(
            f"no snapshots in range [{cfg.date_from}, {cfg.date_to}] "
            f"under {store.root}"
        )
    events = diff_run(snapshots)
    timelines = build_timelines(snapshots)
    records: dict = {}
    for snap in snapshots:
        records.update(snap.records)
    with contextlib.ExitStack() as stack:
        streams = []
        for name in ("reviews.jsonl", "keywords.jsonl", "rankings.jsonl"):
            path = store.root / name
            streams.append(
                stack.enter_context(path.open(encoding="utf-8"))
                if path.exists()
                else None
            )
        reviews, observations, rankings, errors = parse_auxiliary_streams(*streams)
    return MarketData(
        snapshots=snapshots,
        events=events,
        timelines=timelines,
        records=records,
        reviews=reviews,
        observations=observations,
        rankings=rankings,
        aux_errors=errors,
    )


def _bundles(data: MarketData, cfg: RunConfig) -> list:
    return assemble_bundles(
        data.timelines, data.records, data.reviews, data.observations, data.last_date
    )


def _reference_date(data: MarketData, app_id: str) -> date:
    first = data.timelines[app_id].first_removal()
    return first if first is not None else data.last_date


def _emit(summary: dict) -> None:
    print(json.dumps(summary, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# report-building blocks (shared by the focused commands and `report`)


def _write_events(data: MarketData, out: Path) -> dict:
    write_csv(out / "events.csv", events_to_csv_lines(data.events))
    by_kind = Counter(e.kind for e in data.events)
    return {
        "file": "events.csv",
        "total": len(data.events),
        "by_kind": dict(sorted(by_kind.items())),
    }


def _write_analysis(data: MarketData, cfg: RunConfig, out: Path) -> dict:
    start, end = data.snapshots[0].date, data.last_date
    series = daily_removal_series(data.events, start, end)
    write_csv(out / "daily_removals.csv", daily_removals_csv(series))
    peaks = detect_peaks(series)
    write_csv(out / "peaks.csv", peaks_csv(peaks))
    breakdown = category_breakdown(data.events, data.snapshots)
    write_csv(out / "category_breakdown.csv", category_breakdown_csv(breakdown))
    stats, dev_summary = developer_stats(data.timelines)
    write_csv(out / "developer_stats.csv", developer_stats_csv(stats))
    try:
        write_csv(out / "concentration.csv", concentration_csv(concentration_curve(stats)))
    except NoRemovals:
        pass
    intervals = interval_samples(data.timelines)
    interval_counts = {}
    for name in sorted(intervals):
        samples = intervals[name]
        interval_counts[name] = len(samples)
        if samples:
            write_csv(out / f"ecdf_{name}.csv", ecdf_csv(ecdf(samples)))
    by_app: dict = {}
    for r in data.rankings:
        by_app.setdefault(r.app_id, []).append(r)
    flags = [
        popularity_flag(app_id, by_app[app_id], cfg.popular_rank)
        for app_id in sorted(by_app)
    ]
    write_csv(out / "popularity.csv", popularity_csv(flags, cfg.popular_rank))
    summary = {
        "window": [start.isoformat(), end.isoformat()],
        "total_removals": breakdown.total_removals,
        "peak_dates": [d.isoformat() for d in peaks.peak_dates],
        "median_interpeak_days": peaks.median_interpeak,
        "relaunch_within_2_days": relaunch_within(data.timelines),
        "developers": dev_summary["developers"],
        "fraction_developers_all_removed": dev_summary[
            "fraction_developers_all_removed"
        ],
        "ever_popular_apps": sum(1 for f in flags if f.ever_top_k),
        "interval_samples": interval_counts,
    }
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return summary


def _write_signals(data: MarketData, cfg: RunConfig, out: Path) -> dict:
    report1 = abnormal_users(data.reviews, CONDITION_1)
    report2 = abnormal_users(data.reviews, CONDITION_2)
    reviews_by_app: dict = {}
    for r in data.reviews:
        reviews_by_app.setdefault(r.app_id, []).append(r)
    obs_by_app: dict = {}
    for o in data.observations:
        obs_by_app.setdefault(o.app_id, []).append(o)
    review_rows = []
    aso_rows = []
    for app_id in sorted(data.timelines):
        rec = data.records.get(app_id)
        if rec is None:
            continue
        ref = _reference_date(data, app_id)
        rwin = Window.trailing(ref, cfg.review_window_days)
        app_reviews = reviews_by_app.get(app_id, [])
        bundle = review_signal_bundle(app_id, app_reviews, rwin, report1.users)
        windowed_users = {r.user_id for r in app_reviews if rwin.contains(r.date)}
        review_rows.append((bundle, len(windowed_users & set(report2.users))))
        kwin = Window.trailing(ref, cfg.keyword_window_days)
        aso_rows.append(
            aso_signal_bundle(
                app_id,
                obs_by_app.get(app_id, []),
                rec.description,
                kwin,
                surge_threshold=cfg.surge_threshold,
                min_avg_keywords=cfg.min_avg_keywords,
            )
        )
    write_csv(out / "review_signals.csv", review_signals_csv(review_rows))
    write_csv(out / "aso_signals.csv", aso_signals_csv(aso_rows))
    return {
        "apps": len(review_rows),
        "abnormal_users_m5n10": len(report1.users),
        "abnormal_users_m10n20": len(report2.users),
        "surging_apps": sum(1 for b in aso_rows if b.weekly_surge),
        "coverage_eligible_apps": sum(1 for b in aso_rows if b.eligible),
        "files": ["review_signals.csv", "aso_signals.csv"],
    }


def _write_dataset(data: MarketData, cfg: RunConfig, out: Path, k: int) -> dict:
    dataset = build_dataset(_bundles(data, cfg), _feature_config(cfg), advance_days=k)
    save_dataset(dataset, out / "dataset.csv")
    return {
        "rows": len(dataset),
        "positives": int(dataset.labels.sum()),
        "advance_days": k,
        "sparsity": dict(sorted(dataset.sparsity_counts.items())),
        "files": ["dataset.csv", "dataset.meta.json"],
    }


def _dataset_for(cfg: RunConfig):
    if cfg.dataset_path is not None:
        try:
            return load_dataset(cfg.dataset_path)
        except (OSError, ValueError, KeyError) as e:
            raise IoFailure(f"cannot load dataset {cfg.dataset_path}: {e}") from None
    data = _load_market_data(cfg)
    return build_dataset(
        _bundles(data, cfg), _feature_config(cfg), advance_days=_single_k(cfg)
    )


# ---------------------------------------------------------------------------
# commands


def cmd_ingest(cfg: RunConfig) -> int:
    store = _require_store(cfg)
    aux_inputs = (cfg.reviews_file, cfg.keywords_file, cfg.rankings_file)
    if not cfg.snapshot_files and not any(aux_inputs):
        raise ConfigInvalid("nothing to ingest: no snapshot or auxiliary files given")
    stored = []
    for path in cfg.snapshot_files:
        try:
            d = date.fromisoformat(Path(path).stem)
        except ValueError:
            raise ConfigInvalid(
                f"snapshot file name must be YYYY-MM-DD.jsonl, got {Path(path).name}"
            ) from None
        with open(path, encoding="utf-8") as f:
            snap = parse_snapshot_file(f, d)
        stored.append(store.persist(snap, overwrite=True))
    with contextlib.ExitStack() as stack:
        streams = [
            stack.enter_context(open(p, encoding="utf-8")) if p else None
            for p in aux_inputs
        ]
        reviews, observations, rankings, errors = parse_auxiliary_streams(*streams)
    store.root.mkdir(parents=True, exist_ok=True)
    if cfg.reviews_file:
        write_csv(store.root / "reviews.jsonl", [review_to_line(r) for r in reviews])
    if cfg.keywords_file:
        write_csv(
            store.root / "keywords.jsonl", [keywords_to_line(o) for o in observations]
        )
    if cfg.rankings_file:
        write_csv(
            store.root / "rankings.jsonl", [ranking_to_line(o) for o in rankings]
        )
    _emit(
        {
            "command": "ingest",
            "snapshots": stored,
            "reviews": len(reviews),
            "keyword_observations": len(observations),
            "rankings": len(rankings),
            "parse_errors": [f"line {e.line_no}: {e.reason}" for e in errors],
        }
    )
    return 0


def cmd_diff(cfg: RunConfig) -> int:
    data = _load_market_data(cfg)
    out = _require_out(cfg)
    summary = {"command": "diff", **_write_events(data, out)}
    _emit(summary)
    return 0


def cmd_analyze(cfg: RunConfig) -> int:
    data = _load_market_data(cfg)
    out = _require_out(cfg)
    summary = {"command": "analyze", **_write_analysis(data, cfg, out)}
    _emit(summary)
    return 0


def cmd_signals(cfg: RunConfig) -> int:
    data = _load_market_data(cfg)
    out = _require_out(cfg)
    summary = {"command": "signals", **_write_signals(data, cfg, out)}
    _emit(summary)
    return 0


def cmd_features(cfg: RunConfig) -> int:
    data = _load_market_data(cfg)
    out = _require_out(cfg)
    summary = {
        "command": "features",
        **_write_dataset(data, cfg, out, _single_k(cfg)),
    }
    _emit(summary)
    return 0


def cmd_train(cfg: RunConfig) -> int:
    dataset = _dataset_for(cfg)
    out = _require_out(cfg)
    per_model = {}
    for kind in cfg.models:
        model = train_model(dataset, kind, seed=cfg.seed)
        alias = _ALIAS_OF[kind]
        fname = f"model_{alias}.json"
        save_model(model, out / fname)
        m = evaluate_metrics(dataset.labels, predict_scores(model, dataset.matrix))
        entry = {
            "file": fname,
            "train_auc": m.auc,
            "train_f1": m.f1,
            "train_accuracy": m.accuracy,
        }
        importances = feature_importances(model)
        if importances is not None:
            write_csv(
                out / f"importances_{alias}.csv", importances_lines(importances)
            )
            top = max(sorted(importances), key=lambda n: importances[n])
            entry["top_feature"] = top
            entry["importances_file"] = f"importances_{alias}.csv"
        per_model[kind] = entry
    _emit(
        {
            "command": "train",
            "rows": len(dataset.labels),
            "advance_days": dataset.advance_days,
            "seed": cfg.seed,
            "models": per_model,
        }
    )
    return 0


def cmd_evaluate(cfg: RunConfig) -> int:
    dataset = _dataset_for(cfg)
    out = _require_out(cfg)
    rows = []
    per_model = {}
    for kind in cfg.models:
        result = cross_validate(dataset, kind, k=cfg.folds, seed=cfg.seed)
        rows.append((kind, dataset.advance_days, result.mean))
        per_model[kind] = {
            "auc": result.mean.auc,
            "precision": result.mean.precision,
            "recall": result.mean.recall,
            "f1": result.mean.f1,
            "accuracy": result.mean.accuracy,
            "folds": len(result.folds),
        }
    write_csv(out / "metrics.csv", metrics_csv(rows))
    _emit(
        {
            "command": "evaluate",
            "rows": len(dataset.labels),
            "advance_days": dataset.advance_days,
            "folds": cfg.folds,
            "seed": cfg.seed,
            "models": per_model,
            "files": ["metrics.csv"],
        }
    )
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.dataset_path is not None:
        raise ConfigInvalid("sweep rebuilds features per k; use --store, not --dataset")
    data = _load_market_data(cfg)
    out = _require_out(cfg)
    results = advance_sweep(
        _bundles(data, cfg),
        _feature_config(cfg),
        k_range=cfg.k_range,
        kinds=cfg.models,
        cv_folds=cfg.folds,
        seed=cfg.seed,
    )
    rows = [(kind, k, res.mean) for (kind, k), res in sorted(results.items())]
    write_csv(out / "metrics.csv", metrics_csv(rows))
    per_model: dict = {}
    for (kind, k), res in sorted(results.items()):
        per_model.setdefault(kind, {})[str(k)] = {
            "auc": res.mean.auc,
            "f1": res.mean.f1,
        }
    _emit(
        {
            "command": "sweep",
            "k_range": list(cfg.k_range),
            "folds": cfg.folds,
            "seed": cfg.seed,
            "models": per_model,
            "files": ["metrics.csv"],
        }
    )
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.store_root is None:
        raise ConfigInvalid("--store is required: simulate writes a market there")
    market_config = MarketConfig(
        n_apps=cfg.apps,
        fraud_fraction=cfg.fraud_fraction,
        days=cfg.days,
        removal_cycle_days=cfg.cycle_days,
        seed=cfg.seed,
    )
    market = generate_market(market_config)
    write_market(market, cfg.store_root)
    labels = market.labels()
    _emit(
        {
            "command": "simulate",
            "apps": market_config.n_apps,
            "fraud_apps": sum(1 for v in labels.values() if v),
            "days": market_config.days,
            "seed": market_config.seed,
            "snapshots": len(market.snapshots),
            "reviews": len(market.reviews),
            "keyword_observations": len(market.keyword_observations),
            "rankings": len(market.rankings),
            "wave_days": [d.isoformat() for d in market.wave_days],
            "files": [
                "ground_truth.json",
                "index.json",
                "keywords.jsonl",
                "rankings.jsonl",
                "reviews.jsonl",
            ],
        }
    )
    return 0


def cmd_report(cfg: RunConfig) -> int:
    data = _load_market_data(cfg)
    out = _require_out(cfg)
    summary = {
        "command": "report",
        "events": _write_events(data, out),
        "analysis": _write_analysis(data, cfg, out),
        "signals": _write_signals(data, cfg, out),
        "dataset": _write_dataset(data, cfg, out, _single_k(cfg)),
    }
    _emit(summary)
    return 0


_HANDLERS = {
    "ingest": cmd_ingest,
    "diff": cmd_diff,
    "analyze": cmd_analyze,
    "signals": cmd_signals,
    "features": cmd_features,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "report": cmd_report,
}

_COMMAND_HELP = {
    "ingest": "parse raw snapshot/review/keyword/ranking files into a store",
    "diff": "emit lifecycle events from consecutive snapshots",
    "analyze": "removal series, peaks, categories, developers, ECDFs",
    "signals": "per-app review and keyword signal tables",
    "features": "build the labeled feature matrix",
    "train": "fit models on the full dataset and save them",
    "evaluate": "stratified k-fold cross validation",
    "sweep": "cross validation at each advance offset k",
    "simulate": "generate a synthetic market into a store",
    "report": "diff + analyze + signals + features in one pass",
}


def build_parser() -> argparse.ArgumentParser:
    base = argparse.ArgumentParser(add_help=False)
    base.add_argument("--store", dest="store_root", type=Path, metavar="DIR",
                      help="snapshot store directory")
    base.add_argument("--from", dest="date_from", type=date.fromisoformat,
                      metavar="DATE", help="first snapshot date (inclusive)")
    base.add_argument("--to", dest="date_to", type=date.fromisoformat,
                      metavar="DATE", help="last snapshot date (inclusive)")
    base.add_argument("--config", type=Path, metavar="FILE",
                      help="JSON config file; flags override its values")
    base.add_argument("--seed", type=int, metavar="N")
    base.add_argument("--out", dest="out_dir", type=Path, metavar="DIR",
                      help="report output directory")
    base.add_argument("--k", dest="k_range", metavar="RANGE",
                      help="advance days: N, A..B, or comma list")
    base.add_argument("--models", metavar="LIST",
                      help="comma list: logistic,svm,knn,tree,forest,gbdt")
    base.add_argument("--m-words", dest="m_words", type=int, metavar="M",
                      help="abnormal review: more than M words")
    base.add_argument("--n-occurrences", dest="n_occurrences", type=int,
                      metavar="N", help="abnormal review: at least N occurrences")
    base.add_argument("--popular-rank", dest="popular_rank", type=int,
                      metavar="R", help=f"top-rank threshold (default {DEFAULT_POPULAR_RANK})")
    base.add_argument("--surge-threshold", dest="surge_threshold", type=int,
                      metavar="T", help=f"weekly keyword surge (default {DEFAULT_SURGE_THRESHOLD})")
    base.add_argument("--folds", type=int, metavar="K",
                      help=f"cross-validation folds (default {DEFAULT_CV_FOLDS})")
    base.add_argument("--review-window", dest="review_window_days", type=int,
                      metavar="D")
    base.add_argument("--keyword-window", dest="keyword_window_days", type=int,
                      metavar="D")
    base.add_argument("--min-avg-keywords", dest="min_avg_keywords", type=float,
                      metavar="C", help="coverage eligibility threshold")
    base.add_argument("--dataset", dest="dataset_path", type=Path, metavar="CSV",
                      help="reuse a saved feature matrix (train/evaluate)")
    base.add_argument("--apps", type=int, metavar="N", help="simulate: app count")
    base.add_argument("--days", type=int, metavar="N", help="simulate: market days")
    base.add_argument("--fraud-fraction", dest="fraud_fraction", type=float,
                      metavar="F", help="simulate: fraction of fraud apps")
    base.add_argument("--cycle", dest="cycle_days", type=int, metavar="N",
                      help="simulate: removal cycle days")

    parser = argparse.ArgumentParser(
        prog="delist",
        description="App-market lifecycle analytics and removal prediction.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in _HANDLERS:
        p = sub.add_parser(name, parents=[base], help=_COMMAND_HELP[name])
        if name == "ingest":
            p.add_argument("snapshot_files", nargs="*", type=Path,
                           metavar="SNAPSHOT", help="YYYY-MM-DD.jsonl files")
            p.add_argument("--reviews", dest="reviews_file", type=Path)
            p.add_argument("--keywords", dest="keywords_file", type=Path)
            p.add_argument("--rankings", dest="rankings_file", type=Path)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_cfg = load_config_file(args.config) if args.config else {}
        cfg = merge_config(file_cfg, args)
        return _HANDLERS[args.command](cfg)
    except DelistError as e:
        print(
            json.dumps(
                {"error": type(e).__name__, "message": str(e)}, sort_keys=True
            ),
            file=sys.stderr,
        )
        return 1
    except OSError as e:
        print(
            json.dumps({"error": "OSError", "message": str(e)}, sort_keys=True),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
