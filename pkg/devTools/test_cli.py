# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""End-to-end runs of the panel-causal subcommands."""

import json

import numpy as np
import pandas as pd
import pytest

from panel_causal.cli import build_parser, main
from panel_causal.panel import write_groups, write_panel
from panel_causal.validation import DgpSpec, simulate_dgp


@pytest.fixture
def eight_goal_csv(tmp_path):
    panel = simulate_dgp(DgpSpec(k=8, n=30, t=12, seed=1))
    levels = panel.with_values(np.cumsum(panel.values, axis=1), panel.mask)
    return write_panel(levels, tmp_path / "goals.csv")


@pytest.fixture
def grouped_csv(tmp_path, grouped_levels):
    data = write_panel(grouped_levels, tmp_path / "grouped.csv")
    groups = write_groups(grouped_levels.groups, tmp_path / "groups.csv")
    return data, groups


FAST = ["--p", "1", "--bootstrap-reps", "10", "--tau-max", "1", "--horizon", "3"]


# =============================================================================
# EXIT CODES
# =============================================================================


def test_missing_input_is_data_error(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    code = main(["discover", "--input", str(missing), "--output-dir", str(tmp_path / "out")])
    assert code == 2
    assert "nope.csv" in capsys.readouterr().err


def test_linear_algebra_failure_is_numerical_error(tmp_path, eight_goal_csv, monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise np.linalg.LinAlgError("SVD did not converge")

    monkeypatch.setattr("panel_causal.analysis.pipeline.fevd", broken)
    argv = ["discover", "--input", str(eight_goal_csv), "--output-dir", str(tmp_path / "out")]
    assert main(argv + FAST) == 3
    assert "LinAlgError" in capsys.readouterr().err


def test_no_input_is_config_error(tmp_path):
    assert main(["discover", "--output-dir", str(tmp_path / "out")]) == 1


def test_bad_config_file_is_config_error(tmp_path):
    assert main(["discover", "--config", str(tmp_path / "absent.cfg")]) == 1


def test_usage_error_maps_to_one():
    assert main(["no-such-command"]) == 1


def test_parser_lists_every_subcommand():
    help_text = build_parser().format_help()
    for name in ("preprocess", "discover", "validate", "analyze", "sweep"):
        assert name in help_text


# =============================================================================
# SUBCOMMANDS
# =============================================================================


def test_preprocess_writes_panel_log_and_manifest(tmp_path, eight_goal_csv):
    out = tmp_path / "pre"
    assert main(["preprocess", "--input", str(eight_goal_csv), "--output-dir", str(out)]) == 0

    stages = pd.read_csv(out / "sample_stages.csv")
    assert stages["Stage"].tolist() == ["Raw data", "After cleaning", "After diff.", "After FE"]
    assert stages["Obs"].tolist() == [360, 360, 330, 330]

    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["command"] == "preprocess"
    assert manifest["outputs"] == ["panel_preprocessed.csv", "sample_stages.csv", "transform_log.json"]
    assert str(eight_goal_csv) in manifest["inputs"]


def test_discover_is_byte_reproducible(tmp_path, eight_goal_csv):
    first, second = tmp_path / "run1", tmp_path / "run2"
    for out, threads in ((first, "1"), (second, "3")):
        argv = ["discover", "--input", str(eight_goal_csv), "--output-dir", str(out), "--threads", threads]
        assert main(argv + FAST) == 0

    assert (first / "irf.csv").read_bytes() == (second / "irf.csv").read_bytes()
    assert (first / "fevd.csv").read_bytes() == (second / "fevd.csv").read_bytes()
    granger = pd.read_csv(first / "granger.csv", index_col=0)
    assert granger.shape == (8, 8)
    assert int(granger.notna().to_numpy().sum()) == 56
    for name in ("granger_graph.json", "coefficients.csv", "graph.json", "graph.dot", "model.json"):
        assert (first / name).exists(), name


def test_discover_auto_lag_writes_selection(tmp_path, eight_goal_csv):
    out = tmp_path / "auto"
    argv = ["discover", "--input", str(eight_goal_csv), "--output-dir", str(out), "--p", "auto", "--p-max", "2"]
    assert main(argv + ["--bootstrap-reps", "10", "--tau-max", "1", "--horizon", "2"]) == 0
    selection = pd.read_csv(out / "lag_selection.csv")
    assert selection["p"].tolist() == [1, 2]
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert set(manifest["notes"]["lag_selection"]) == {"aic_p", "bic_p"}


def test_validate_monte_carlo_only(tmp_path):
    out = tmp_path / "val"
    argv = [
        "validate", "--output-dir", str(out),
        "--mc-reps", "10", "--mc-entities", "20", "--mc-variables", "2", "--mc-years", "8",
    ]
    assert main(argv) == 0
    report = json.loads((out / "validation.json").read_text(encoding="utf-8"))
    assert report["mc"]["bias_threshold"] == 0.15
    assert report["mc"]["replications"] == 10
    assert report["permutation"] is None
    assert "Mean Abs. Bias" in (out / "validation_summary.txt").read_text(encoding="utf-8")


def test_analyze_writes_group_outputs(tmp_path, grouped_csv):
    data, groups = grouped_csv
    out = tmp_path / "groups_run"
    argv = ["analyze", "--input", str(data), "--groups", str(groups), "--output-dir", str(out),
            "--tracked", "Edu>Ineq"]
    assert main(argv + FAST) == 0

    tiers = pd.read_csv(out / "tiers.csv")
    assert set(tiers["node"]) == {"Edu", "Ineq", "Growth"}
    heterogeneity = json.loads((out / "heterogeneity.json").read_text(encoding="utf-8"))
    assert {row["group"] for row in heterogeneity["comparison"]} == {"HighIncome", "UpperMiddle", "LowIncome"}
    assert (out / "groups" / "LowIncome" / "irf.csv").exists()


def test_sweep_writes_tau_and_lag_tables(tmp_path, eight_goal_csv):
    out = tmp_path / "sweep"
    argv = ["sweep", "--input", str(eight_goal_csv), "--output-dir", str(out),
            "--tau-max-sweep", "1,2", "--p-max", "2"]
    assert main(argv) == 0
    rows = json.loads((out / "tau_sweep.json").read_text(encoding="utf-8"))
    assert [row["tau_max"] for row in rows] == [1, 2]
    assert len(pd.read_csv(out / "lag_sweep.csv")) == 2
