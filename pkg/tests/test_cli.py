import json
from datetime import date

import pytest

from delist.cli import (
    RunConfig,
    build_parser,
    main,
    merge_config,
    parse_k_range,
    parse_models,
)
from delist.errors import ConfigInvalid
from delist.learn import load_model, predict_scores
from delist.market import SnapshotStore
from delist.synth import MarketConfig, generate_market, write_market


def run(*argv):
    return main([str(a) for a in argv])


def parse(*argv):
    return build_parser().parse_args([str(a) for a in argv])


class TestKRangeParsing:
    def test_forms(self):
        assert parse_k_range(3) == (3,)
        assert parse_k_range("3") == (3,)
        assert parse_k_range("0..6") == (0, 1, 2, 3, 4, 5, 6)
        assert parse_k_range("1,3,5") == (1, 3, 5)
        assert parse_k_range([2, 4]) == (2, 4)

    @pytest.mark.parametrize("bad", ["-1", "2..1", "a", "1,,2", "", "0..x"])
    def test_rejects(self, bad):
        with pytest.raises(ConfigInvalid):
            parse_k_range(bad)


class TestModelParsing:
    def test_aliases_and_canonical(self):
        assert parse_models("gbdt") == ("GBDT",)
        assert parse_models("logistic,KNN") == ("LogisticRegression", "KNN")
        assert parse_models("gbdt,forest,svm") == (
            "GBDT",
            "RandomForest",
            "LinearSVM",
        )


class TestConfigMerge:
    def test_defaults(self):
        cfg = merge_config({}, parse("analyze", "--store", "s", "--out", "o"))
        assert isinstance(cfg, RunConfig)
        assert cfg.seed == 0
        assert cfg.k_range == (0,)
        assert cfg.models == ("GBDT",)
        assert cfg.popular_rank == 1500
        assert cfg.surge_threshold == 1000

    def test_file_values_applied(self):
        file_cfg = {"seed": 9, "k": "0..2", "models": "knn,tree", "popular_rank": 100}
        cfg = merge_config(file_cfg, parse("analyze", "--store", "s"))
        assert cfg.seed == 9
        assert cfg.k_range == (0, 1, 2)
        assert cfg.models == ("KNN", "DecisionTree")
        assert cfg.popular_rank == 100

    def test_flags_beat_file(self):
        file_cfg = {"seed": 9, "m_words": 7}
        cfg = merge_config(
            file_cfg, parse("analyze", "--store", "s", "--seed", 4)
        )
        assert cfg.seed == 4
        assert cfg.m_words == 7

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigInvalid):
            merge_config({"sed": 1}, parse("analyze", "--store", "s"))

    def test_validation_applies_after_merge(self):
        with pytest.raises(ConfigInvalid):
            merge_config({"folds": 1}, parse("analyze", "--store", "s"))

    def test_dates_coerced(self):
        cfg = merge_config(
            {"from": "2024-01-05"}, parse("analyze", "--store", "s")
        )
        assert cfg.date_from == date(2024, 1, 5)


class TestExitCodes:
    def test_unknown_command_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run("frobnicate")
        assert exc.value.code == 2

    def test_missing_store_is_pipeline_error(self, capsys):
        assert run("diff", "--out", "/tmp/nowhere-out") == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ConfigInvalid"
        assert "--store" in err["message"]

    def test_missing_snapshots_is_pipeline_error(self, tmp_path, capsys):
        assert run("diff", "--store", tmp_path, "--out", tmp_path / "out") == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "EmptyRange"

    def test_bad_model_name_is_pipeline_error(self, tmp_path, capsys):
        code = run(
            "evaluate", "--store", tmp_path, "--out", tmp_path / "out",
            "--models", "perceptron",
        )
        assert code == 1
        assert json.loads(capsys.readouterr().err)["error"] == "UnknownModelKind"


@pytest.fixture(scope="module")
def market_store(tmp_path_factory):
    root = tmp_path_factory.mktemp("store")
    write_market(
        generate_market(
            MarketConfig(n_apps=30, days=60, removal_cycle_days=20, seed=11)
        ),
        root,
    )
    return root


class TestPipelineCommands:
    def test_simulate_then_diff(self, tmp_path, capsys):
        store = tmp_path / "store"
        out = tmp_path / "out"
        assert run(
            "simulate", "--store", store, "--apps", 25, "--days", 45,
            "--cycle", 15, "--seed", 2,
        ) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["apps"] == 25
        assert run("diff", "--store", store, "--out", out) == 0
        summary = json.loads(capsys.readouterr().out)
        assert (out / "events.csv").is_file()
        assert summary["total"] > 0
        assert summary["by_kind"]["Appeared"] >= 25

    def test_ingest_round_trip(self, tmp_path, capsys, market_store):
        dest = tmp_path / "ingested"
        src_files = sorted((market_store / "snapshots").glob("*.jsonl"))[:5]
        code = run("ingest", "--store", dest, *src_files)
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert len(summary["snapshots"]) == 5
        assert summary["parse_errors"] == []
        store = SnapshotStore(dest)
        assert len(store.dates()) == 5
        for p in src_files:
            original = p.read_bytes()
            rewritten = (dest / "snapshots" / p.name).read_bytes()
            assert rewritten == original

    def test_analyze_writes_tables(self, tmp_path, market_store, capsys):
        out = tmp_path / "out"
        assert run("analyze", "--store", market_store, "--out", out) == 0
        for name in (
            "daily_removals.csv",
            "peaks.csv",
            "category_breakdown.csv",
            "developer_stats.csv",
            "concentration.csv",
            "popularity.csv",
            "summary.json",
        ):
            assert (out / name).is_file(), name
        summary = json.loads(capsys.readouterr().out)
        assert summary["total_removals"] > 0

    def test_signals_writes_tables(self, tmp_path, market_store, capsys):
        out = tmp_path / "out"
        assert run("signals", "--store", market_store, "--out", out) == 0
        assert (out / "review_signals.csv").is_file()
        assert (out / "aso_signals.csv").is_file()
        summary = json.loads(capsys.readouterr().out)
        assert summary["apps"] == 30

    def test_report_rerun_byte_identical(self, tmp_path, market_store, capsys):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert run("report", "--store", market_store, "--out", out_a) == 0
        assert run("report", "--store", market_store, "--out", out_b) == 0
        capsys.readouterr()
        names_a = sorted(p.name for p in out_a.iterdir())
        names_b = sorted(p.name for p in out_b.iterdir())
        assert names_a == names_b and len(names_a) >= 8
        for name in names_a:
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name

    def test_features_then_train_scores_roundtrip(self, tmp_path, market_store, capsys):
        out = tmp_path / "out"
        assert run("features", "--store", market_store, "--out", out, "--k", 1) == 0
        capsys.readouterr()
        assert (out / "dataset.csv").is_file()
        assert run(
            "train", "--store", market_store, "--out", out, "--models",
            "logistic,gbdt", "--seed", 5,
        ) == 0
        summary = json.loads(capsys.readouterr().out)
        assert set(summary["models"]) == {"LogisticRegression", "GBDT"}
        model = load_model(out / "model_gbdt.json")
        from delist.features import load_dataset

        ds = load_dataset(out / "dataset.csv")
        scores = predict_scores(model, ds.matrix)
        assert scores.shape == (len(ds.labels),)

    def test_sweep_k0_matches_evaluate(self, tmp_path, market_store, capsys):
        ev = tmp_path / "ev"
        sw = tmp_path / "sw"
        common = ("--store", market_store, "--models", "gbdt", "--seed", 3,
                  "--folds", 5)
        assert run("evaluate", "--out", ev, *common) == 0
        assert run("sweep", "--out", sw, "--k", "0..2", *common) == 0
        capsys.readouterr()
        ev_lines = (ev / "metrics.csv").read_text().splitlines()
        sw_lines = (sw / "metrics.csv").read_text().splitlines()
        assert ev_lines[0] == sw_lines[0]
        assert len(sw_lines) == 4
        assert sw_lines[1] == ev_lines[1]

    def test_sweep_rejects_dataset_flag(self, tmp_path, capsys):
        code = run(
            "sweep", "--dataset", tmp_path / "d.csv", "--store", tmp_path,
            "--out", tmp_path / "out",
        )
        assert code == 1
        assert json.loads(capsys.readouterr().err)["error"] == "ConfigInvalid"

    def test_config_file_drives_run(self, tmp_path, market_store, capsys):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps({
            "store": str(market_store),
            "out": str(tmp_path / "out"),
            "models": "tree",
            "folds": 4,
            "seed": 6,
        }))
        assert run("evaluate", "--config", cfg_path) == 0
        summary = json.loads(capsys.readouterr().out)
        assert list(summary["models"]) == ["DecisionTree"]
        lines = (tmp_path / "out" / "metrics.csv").read_text().splitlines()
        assert lines[1].startswith("DecisionTree,")

    def test_config_file_must_be_object(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("[1,2]")
        assert run("diff", "--config", bad, "--store", tmp_path) == 1
        assert json.loads(capsys.readouterr().err)["error"] == "ConfigInvalid"
