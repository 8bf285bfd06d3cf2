# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""Run configuration files, overrides and environment settings."""

from pathlib import Path

import pytest

from panel_causal.config import RunConfig, Settings, load_run_config, read_config_file
from panel_causal.errors import ConfigError


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# analysis settings\n"
        "input_path = data/sdr_long.csv\n"
        "variables = Pov, Health , Edu\n"
        "p = auto\n"
        "tracked-pairs = Edu>Ineq, Growth>Pov\n"
        "alpha = 0.01\n",
        encoding="utf-8",
    )
    return path


def test_file_values_are_parsed(config_file):
    config = load_run_config(config_file)
    assert config.input_path == Path("data/sdr_long.csv")
    assert config.variables == ["Pov", "Health", "Edu"]
    assert config.p == "auto"
    assert config.alpha == 0.01
    assert config.tracked == [("Edu", "Ineq"), ("Growth", "Pov")]


def test_defaults():
    config = RunConfig()
    assert (config.p, config.tau_max, config.alpha, config.horizon) == (2, 3, 0.05, 10)
    assert (config.bootstrap_reps, config.permutation_reps, config.mc_reps) == (200, 100, 100)
    assert config.max_missing_fraction == 0.40


def test_overrides_win_and_none_is_ignored(config_file):
    config = load_run_config(config_file, {"alpha": 0.1, "p": None, "tau-max": 4})
    assert config.alpha == 0.1
    assert config.p == "auto"
    assert config.tau_max == 4


def test_numeric_lag_from_string():
    assert load_run_config(overrides={"p": "3"}).p == 3


@pytest.mark.parametrize(
    "overrides",
    [
        {"unknown_key": "1"},
        {"p": "0"},
        {"alpha": "1.5"},
        {"tau_max": "11"},
        {"tracked_pairs": "Edu-Ineq"},
        {"tau_max_sweep": "2,0"},
        {"layout": "tall"},
    ],
)
def test_invalid_values_raise_config_error(overrides):
    with pytest.raises(ConfigError, match="Invalid configuration"):
        load_run_config(overrides=overrides)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        read_config_file(tmp_path / "absent.cfg")


def test_config_hash_is_stable(config_file):
    first = load_run_config(config_file)
    second = load_run_config(config_file)
    assert first.config_hash() == second.config_hash()
    assert len(first.config_hash()) == 64
    assert load_run_config(config_file, {"seed": 5}).config_hash() != first.config_hash()


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("PANEL_CAUSAL_THREADS", "4")
    monkeypatch.setenv("PANEL_CAUSAL_LOG_LEVEL", "debug")
    settings = Settings.from_environment()
    assert settings.threads == 4
    assert settings.log_level == "DEBUG"
