# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""Synthetic DGP, Monte Carlo, permutation falsification and robustness sweeps."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from conftest import make_panel
from panel_causal.errors import ConfigError, NumericalError
from panel_causal.validation import (
    DgpSpec,
    RobustnessSpec,
    ValidationReport,
    default_robustness_specs,
    draw_dgp_coefficients,
    entity_var1_fits,
    monte_carlo_validate,
    permutation_falsification,
    permute_panel,
    robustness_sweep,
    simulate_dgp,
    simulate_var_panel,
    spectral_radius,
    z_score,
)


# =============================================================================
# DGP
# =============================================================================


def test_dgp_draw_is_stable_and_deterministic():
    spec = DgpSpec(k=8, seed=3)
    first, second = draw_dgp_coefficients(spec), draw_dgp_coefficients(spec)
    np.testing.assert_array_equal(first, second)
    np.testing.assert_allclose(np.diag(first), 0.5)
    off = first[~np.eye(8, dtype=bool)]
    assert off.min() >= -0.3 and off.max() <= 0.3
    assert spectral_radius([first]) < 1.0


def test_dgp_rescales_after_failed_redraws():
    spec = DgpSpec(k=3, diag=1.5, max_redraws=5, rescale_radius=0.9)
    phi = draw_dgp_coefficients(spec)
    assert spectral_radius([phi]) == pytest.approx(0.9)


def test_dgp_without_rescale_raises():
    spec = DgpSpec(k=3, diag=1.5, max_redraws=5, rescale_radius=None)
    with pytest.raises(NumericalError, match="No stable"):
        draw_dgp_coefficients(spec)


def test_dgp_spec_validation():
    with pytest.raises(ValidationError):
        DgpSpec(offdiag_low=0.5, offdiag_high=0.1)
    with pytest.raises(ValidationError):
        DgpSpec(unknown=1)


def test_simulate_dgp_shape_and_truth():
    panel = simulate_dgp(DgpSpec(k=4, n=12, t=9, seed=1))
    assert panel.shape == (12, 9, 4)
    assert panel.is_complete
    np.testing.assert_allclose(panel.metadata["true_coeffs"], draw_dgp_coefficients(DgpSpec(k=4, n=12, t=9, seed=1)))


def test_simulate_rejects_explosive_coefficients(rng):
    with pytest.raises(NumericalError):
        simulate_var_panel([1.1 * np.eye(2)], n=3, t=5, rng=rng)


# =============================================================================
# MONTE CARLO
# =============================================================================


def test_monte_carlo_easy_regime_is_accurate():
    spec = DgpSpec(k=3, n=100, t=20, seed=5)
    summary = monte_carlo_validate(spec, reps=10, fixed_effects=False, estimator="pooled")
    assert summary.estimator == "pooled"
    assert summary.replications == 10
    assert summary.failures == 0
    assert summary.mean_abs_bias < summary.bias_threshold
    assert 0.75 <= summary.ci_coverage <= 1.0
    assert len(summary.per_rep_bias) == 10


def test_monte_carlo_is_reproducible_across_workers():
    spec = DgpSpec(k=2, n=30, t=10, seed=9)
    serial = monte_carlo_validate(spec, reps=10, workers=1)
    threaded = monte_carlo_validate(spec, reps=10, workers=3)
    assert serial.to_dict() == threaded.to_dict()


def test_pooled_monte_carlo_error_shrinks_with_entities():
    errors = []
    for n in (50, 100, 200):
        summary = monte_carlo_validate(DgpSpec(k=3, n=n, t=25, seed=6), reps=10, fixed_effects=False, estimator="pooled")
        errors.append(summary.mean_abs_bias)
    assert errors[0] > errors[1] > errors[2]


def test_monte_carlo_reference_configuration_bands():
    summary = monte_carlo_validate(DgpSpec(k=8, n=168, t=25, seed=1), reps=100)
    assert summary.estimator == "entity"
    assert summary.failures == 0
    assert 0.10 <= summary.mean_abs_bias <= 0.25
    assert 0.88 <= summary.ci_coverage <= 0.96


def test_entity_fits_need_more_years_than_regressors():
    with pytest.raises(ConfigError, match="regressors"):
        monte_carlo_validate(DgpSpec(k=8, n=10, t=9), reps=10)


def test_entity_fits_match_lstsq(rng):
    values = rng.normal(size=(3, 12, 2))
    coeffs, _ = entity_var1_fits(values)
    for i in range(3):
        x = np.column_stack([np.ones(11), values[i, :-1]])
        beta = np.linalg.lstsq(x, values[i, 1:], rcond=None)[0]
        np.testing.assert_allclose(coeffs[i], beta[1:].T, atol=1e-10)


def test_monte_carlo_needs_ten_reps():
    with pytest.raises(ConfigError):
        monte_carlo_validate(DgpSpec(k=2, n=10, t=8), reps=5)


# =============================================================================
# PERMUTATION
# =============================================================================


def test_z_score_cases():
    z, infinite, mean, sd = z_score(5.0, np.array([1.0, 2.0, 3.0]))
    assert (z, infinite, mean, sd) == (3.0, False, 2.0, 1.0)
    z, infinite, _, _ = z_score(5.0, np.array([2.0, 2.0, 2.0]))
    assert math.isinf(z) and z > 0 and infinite
    z, infinite, _, _ = z_score(1.0, np.array([2.0, 2.0]))
    assert math.isinf(z) and z < 0 and infinite
    assert z_score(2.0, np.array([2.0, 2.0]))[:2] == (0.0, False)


def test_permute_panel_preserves_marginals(var1_panel, rng):
    permuted = permute_panel(var1_panel, rng)
    assert permuted.metadata["permuted"]
    for k in range(var1_panel.n_variables):
        original = sorted(map(tuple, var1_panel.values[:, :, k]))
        shuffled = sorted(map(tuple, permuted.values[:, :, k]))
        assert original == shuffled


def test_permutation_separates_planted_network():
    phi = np.full((4, 4), 0.15)
    np.fill_diagonal(phi, 0.5)
    panel = simulate_var_panel([phi], n=60, t=20, rng=np.random.default_rng(17))
    summary = permutation_falsification(panel, reps=10, seed=4)
    assert summary.real_link_count == 12
    assert summary.exceeds_all
    assert summary.z_score > 3.0 or summary.infinite_separation
    assert summary.to_dict()["requested"] == 10


def test_permutation_needs_ten_reps(var1_panel):
    with pytest.raises(ConfigError):
        permutation_falsification(var1_panel, reps=3)


# =============================================================================
# ROBUSTNESS
# =============================================================================


def test_default_robustness_specs():
    specs = default_robustness_specs(range(2000, 2025), split_year=2015)
    assert [s.label for s in specs] == [
        "VAR(1)", "VAR(2)", "VAR(3)", "Pre-2015", "Post-2015", "With FE", "No FE",
    ]
    assert specs[3].end_year == 2014
    assert specs[4].start_year == 2015
    assert not specs[-1].fixed_effects


def test_robustness_sweep_rows(grouped_levels):
    specs = default_robustness_specs(grouped_levels.years, split_year=2008, p=1)
    rows = robustness_sweep(grouped_levels, specs, tracked=[("Edu", "Ineq")])
    assert [row["status"] for row in rows] == ["ok"] * 7
    assert rows[3]["years"] == "2001-2007"
    assert "Edu>Ineq" in rows[0]
    assert isinstance(rows[0]["Edu>Ineq significant"], bool)
    full = [row for row in rows if row["label"] not in ("Pre-2008", "Post-2008")]
    assert {row["sample_start"] for row in full} == {3}
    assert len({row["nobs"] for row in full}) == 1


def test_robustness_fixed_effects_change_link_count():
    phi = np.diag([0.3, 0.3, 0.3])
    gen = np.random.default_rng(13)
    intercepts = np.outer(gen.normal(0.0, 3.0, size=40), np.ones(3))
    panel = simulate_var_panel([phi], n=40, t=15, rng=gen, intercepts=intercepts)
    specs = [RobustnessSpec("With FE", p=1), RobustnessSpec("No FE", p=1, fixed_effects=False)]
    with_fe, no_fe = robustness_sweep(panel, specs, differenced=True)
    # a shared entity effect leaks into every lag when it is not removed
    assert no_fe["links"] > with_fe["links"]
    assert no_fe["links"] >= 4


def test_robustness_sweep_isolates_failures(grouped_levels):
    specs = [RobustnessSpec("tiny", p=2, start_year=2000, end_year=2001), RobustnessSpec("VAR(1)", p=1)]
    rows = robustness_sweep(grouped_levels, specs)
    assert rows[0]["status"] == "failed"
    assert rows[0]["error"]
    assert rows[1]["status"] == "ok"


def test_validation_report_summary(grouped_levels):
    report = ValidationReport()
    report.robustness = robustness_sweep(
        grouped_levels,
        [RobustnessSpec("VAR(1)", p=1), RobustnessSpec("tiny", p=2, start_year=2000, end_year=2001)],
        tracked=[("Edu", "Ineq")],
    )
    text = report.summary_text()
    assert "Robustness" in text
    assert "Edu>Ineq" in text
    assert "tiny" in text and "failed" in text
    assert report.to_dict()["mc"] is None


def test_report_tracked_columns_skip_failed_first_row(grouped_levels):
    report = ValidationReport()
    report.robustness = robustness_sweep(
        grouped_levels,
        [RobustnessSpec("tiny", p=2, start_year=2000, end_year=2001), RobustnessSpec("VAR(1)", p=1)],
        tracked=[("Edu", "Ineq")],
    )
    assert report.robustness[0]["status"] == "failed"
    assert "Edu>Ineq" in report.summary_text()


def test_permuted_panel_keeps_labels():
    panel = make_panel(np.arange(24, dtype=float).reshape(4, 3, 2))
    permuted = permute_panel(panel, np.random.default_rng(0))
    assert permuted.entities == panel.entities
    assert permuted.years == panel.years
