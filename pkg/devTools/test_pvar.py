# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""Panel VAR estimation, Granger tests, IRFs, FEVD and the entity bootstrap."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from conftest import make_model, make_panel
from panel_causal.errors import ConfigError, DataError, NumericalError
from panel_causal.preprocess import within_transform
from panel_causal.pvar import (
    bootstrap_irf,
    build_design,
    estimate_var,
    fevd,
    granger_matrix,
    granger_network,
    granger_test,
    impulse_response,
    p_value_frame,
    select_lag,
)
from panel_causal.validation import simulate_var_panel


# =============================================================================
# DESIGN AND ESTIMATION
# =============================================================================


def test_design_never_crosses_entities():
    values = np.arange(2 * 4 * 1, dtype=float).reshape(2, 4, 1)
    design = build_design(make_panel(values), p=1)
    # entity 0: years 1..3 lag 0..2; entity 1: values 4..7
    np.testing.assert_array_equal(design.y[:, 0], [1, 2, 3, 5, 6, 7])
    np.testing.assert_array_equal(design.x[:, 1], [0, 1, 2, 4, 5, 6])
    assert design.columns == ("const", "X1.L1")


def test_design_skips_incomplete_windows():
    values = np.arange(1 * 5 * 1, dtype=float).reshape(1, 5, 1)
    values[0, 2, 0] = np.nan
    design = build_design(make_panel(values), p=1)
    np.testing.assert_array_equal(design.y[:, 0], [1, 4])


def test_design_argument_checks():
    panel = make_panel(np.ones((2, 4, 1)))
    with pytest.raises(ConfigError):
        build_design(panel, p=0)
    with pytest.raises(ConfigError):
        build_design(panel, p=2, sample_start=1)
    with pytest.raises(DataError):
        build_design(panel, p=4)


def test_estimate_recovers_coefficients(var1_panel):
    model = estimate_var(var1_panel, p=1)
    assert model.coefficient("X2", "X1") == pytest.approx(0.4, abs=0.08)
    assert model.coefficient("X1", "X1") == pytest.approx(0.5, abs=0.08)
    assert model.coefficient("X1", "X2") == pytest.approx(0.0, abs=0.08)
    assert model.nobs == 60 * 19
    assert model.dof_resid == model.nobs - (3 * 1 + 1)
    assert model.is_stable
    np.testing.assert_allclose(model.sigma, model.sigma.T)


def test_coefficient_frame_layout(var1_panel):
    frame = estimate_var(var1_panel, p=2).coefficient_frame()
    assert frame.columns.tolist() == ["lag", "response", "driver", "coef", "stderr", "t"]
    assert len(frame) == 2 * 3 * 3


def test_collinear_variables_named():
    gen = np.random.default_rng(2)
    base = gen.normal(size=(10, 8, 1))
    panel = make_panel(np.concatenate([base, 2.0 * base], axis=2), variables=["a", "b"])
    with pytest.raises(NumericalError, match="collinear"):
        estimate_var(panel, p=1)


def test_companion_and_spectral_radius():
    model = make_model([np.diag([0.5, 0.2]), np.diag([0.3, 0.0])], np.eye(2))
    companion = model.companion()
    assert companion.shape == (4, 4)
    # λ² − 0.5λ − 0.3 = 0 → largest root (0.5 + sqrt(1.45)) / 2
    assert model.spectral_radius == pytest.approx((0.5 + np.sqrt(1.45)) / 2)


def test_select_lag_uses_common_sample(var1_panel):
    selection = select_lag(var1_panel, p_max=3)
    assert selection.table["nobs"].nunique() == 1
    assert selection.table["p"].tolist() == [1, 2, 3]
    assert selection.chosen_p in (1, 2, 3)
    assert selection.bic_p == 1


def test_select_lag_common_sample_with_leading_gaps():
    values = np.random.default_rng(4).normal(size=(30, 15, 2))
    values[:10, 0, :] = np.nan
    selection = select_lag(make_panel(values), p_max=3)
    # entities missing the first year lose the t=3 row for every p
    assert selection.table["nobs"].tolist() == [350, 350, 350]


def test_select_lag_recovers_planted_var2():
    phi1 = np.array([[0.2, 0.0], [0.0, 0.2]])
    phi2 = np.array([[0.4, 0.0], [0.3, 0.3]])
    panel = simulate_var_panel([phi1, phi2], n=100, t=30, rng=np.random.default_rng(31))
    selection = select_lag(within_transform(panel), p_max=3)
    assert selection.bic_p == 2
    assert selection.chosen_p >= 2


def test_inversion_failure_is_numerical_error(var1_panel, monkeypatch):
    def singular(*args, **kwargs):
        raise np.linalg.LinAlgError("Singular matrix")

    monkeypatch.setattr("panel_causal.pvar.model.linalg.inv", singular)
    with pytest.raises(NumericalError, match="inversion failed"):
        estimate_var(var1_panel, 1)


# =============================================================================
# GRANGER
# =============================================================================


def _brute_force_f(data, p, source, target):
    """Nested-OLS F statistic assembled entity by entity without the library design."""
    k = data.n_variables
    s, j = data.variables.index(source), data.variables.index(target)
    rows_y, rows_x = [], []
    for i in range(data.n_entities):
        for t in range(p, data.n_years):
            rows_y.append(data.values[i, t, j])
            lags = [data.values[i, t - lag, v] for lag in range(1, p + 1) for v in range(k)]
            rows_x.append([1.0, *lags])
    y, x = np.array(rows_y), np.array(rows_x)
    keep = [c for c in range(x.shape[1]) if c == 0 or (c - 1) % k != s]

    def ssr(design):
        beta = np.linalg.lstsq(design, y, rcond=None)[0]
        resid = y - design @ beta
        return resid @ resid

    ssr_u, ssr_r = ssr(x), ssr(x[:, keep])
    df_den = len(y) - (k * p + 1)
    return ((ssr_r - ssr_u) / p) / (ssr_u / df_den), df_den


@pytest.mark.parametrize("seed", range(50))
def test_granger_f_matches_oracle(seed):
    gen = np.random.default_rng(seed)
    k = int(gen.integers(2, 5))
    n = int(gen.integers(5, 31))
    t = int(gen.integers(8, 16))
    p = int(gen.integers(1, 3))
    panel = make_panel(gen.normal(size=(n, t, k)))
    model = estimate_var(panel, p)
    source, target = "X1", f"X{k}"
    result = granger_test(model, panel, source, target)
    expected, df_den = _brute_force_f(panel, p, source, target)
    assert result.df_den == df_den
    assert result.df_num == p
    assert abs(result.f_stat - expected) < 1e-8 * max(1.0, abs(expected))
    assert result.p_value == pytest.approx(stats.f.sf(expected, p, df_den), rel=1e-6, abs=1e-12)


def test_granger_detects_planted_link(var1_panel):
    model = estimate_var(var1_panel, p=1)
    planted = granger_test(model, var1_panel, "X1", "X2")
    assert planted.significant
    assert planted.strength > 0.2


def test_granger_matrix_covers_ordered_pairs():
    panel = make_panel(np.random.default_rng(0).normal(size=(20, 10, 8)))
    model = estimate_var(panel, 1)
    results = granger_matrix(model, panel)
    assert len(results) == 56
    frame = p_value_frame(results, model.variables)
    assert frame.shape == (8, 8)
    assert int(frame.notna().to_numpy().sum()) == 56


def test_granger_network_edges_are_significant_pairs(var1_panel):
    model = estimate_var(var1_panel, p=1)
    results = granger_matrix(model, var1_panel)
    graph = granger_network(model, var1_panel, alpha=0.05, results=results)
    expected = {(r.source, r.target) for r in results if r.p_value < 0.05}
    assert set(graph.link_pairs) == expected
    assert ("X1", "X2") in expected
    assert all(edge.lag == 1 for edge in graph.edges)


def test_granger_rejects_foreign_panel(var1_panel):
    model = estimate_var(var1_panel, p=1)
    other = var1_panel.select_entities(var1_panel.entities[:10])
    with pytest.raises(DataError):
        granger_test(model, other, "X1", "X2")


def test_granger_null_rejection_rate():
    rejections = tests = 0
    for seed in range(100):
        panel = make_panel(np.random.default_rng(100 + seed).normal(size=(30, 12, 4)))
        model = estimate_var(panel, 1)
        results = granger_matrix(model, panel)
        rejections += sum(r.significant for r in results)
        tests += len(results)
    assert tests == 1200
    assert 0.03 <= rejections / tests <= 0.07


# =============================================================================
# IRF AND FEVD
# =============================================================================


def test_irf_diagonal_var1_is_geometric():
    model = make_model([0.5 * np.eye(3)], np.eye(3))
    irf = impulse_response(model, horizon=10)
    for h in range(11):
        for i in range(3):
            assert irf.responses[h, i, i] == pytest.approx(0.5 ** h, abs=1e-10)
    off = irf.responses.copy()
    for i in range(3):
        off[:, i, i] = 0.0
    assert np.abs(off).max() < 1e-12


def test_irf_impact_is_cholesky_factor():
    sigma = np.array([[1.0, 0.5], [0.5, 2.0]])
    model = make_model([np.zeros((2, 2))], sigma)
    irf = impulse_response(model, horizon=0)
    chol = np.linalg.cholesky(sigma)
    np.testing.assert_allclose(irf.responses[0].T, chol)


def test_irf_ordering_changes_identification():
    sigma = np.array([[1.0, 0.5], [0.5, 2.0]])
    model = make_model([np.zeros((2, 2))], sigma)
    default = impulse_response(model, horizon=0)
    reversed_ = impulse_response(model, horizon=0, ordering=["X2", "X1"])
    # first variable in the ordering does not react on impact to the second shock
    assert default.responses[0, 1, 0] == pytest.approx(0.0)
    assert reversed_.responses[0, 0, 1] == pytest.approx(0.0)
    assert reversed_.ordering == ("X2", "X1")


def test_irf_bad_ordering():
    model = make_model([np.zeros((2, 2))], np.eye(2))
    with pytest.raises(ConfigError):
        impulse_response(model, ordering=["X1", "X3"])


def test_non_pd_sigma_suggests_ridge():
    model = make_model([np.zeros((2, 2))], np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(NumericalError, match="ridge"):
        impulse_response(model)
    regularized = impulse_response(model, ridge=1e-6)
    assert np.isfinite(regularized.responses).all()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100_000), k=st.integers(min_value=1, max_value=5),
       p=st.integers(min_value=1, max_value=3))
def test_fevd_rows_sum_to_one(seed, k, p):
    gen = np.random.default_rng(seed)
    coeffs = gen.uniform(-0.4, 0.4, size=(p, k, k))
    a = gen.normal(size=(k, k))
    model = make_model(coeffs, a @ a.T + 0.1 * np.eye(k))
    shares = fevd(model, horizon=10).shares
    np.testing.assert_allclose(shares.sum(axis=2), 1.0, atol=1e-9)
    assert (shares >= 0.0).all()


def test_fevd_diagonal_model_is_own_shock():
    model = make_model([0.5 * np.eye(2)], np.eye(2))
    shares = fevd(model, horizon=5).shares
    np.testing.assert_allclose(shares[:, 0, 0], 1.0)
    np.testing.assert_allclose(shares[:, 1, 0], 0.0)


def test_irf_long_frame_shape():
    model = make_model([0.5 * np.eye(2)], np.eye(2))
    frame = impulse_response(model, horizon=3).to_long_frame()
    assert frame.columns.tolist() == ["h", "impulse", "response", "point", "lo", "hi"]
    assert len(frame) == 4 * 2 * 2


# =============================================================================
# BOOTSTRAP
# =============================================================================


@pytest.fixture
def differenced_small():
    phi = np.array([[0.4, 0.0], [0.3, 0.3]])
    return simulate_var_panel([phi], n=25, t=12, rng=np.random.default_rng(21))


def test_bootstrap_is_reproducible_across_workers(differenced_small):
    serial = bootstrap_irf(differenced_small, p=1, horizon=4, reps=20, seed=5, workers=1)
    threaded = bootstrap_irf(differenced_small, p=1, horizon=4, reps=20, seed=5, workers=3)
    np.testing.assert_array_equal(serial.ci_lower, threaded.ci_lower)
    np.testing.assert_array_equal(serial.ci_upper, threaded.ci_upper)
    np.testing.assert_array_equal(serial.responses, threaded.responses)


def test_bootstrap_bands_contain_point(differenced_small):
    irf = bootstrap_irf(differenced_small, p=1, horizon=4, reps=20, seed=1)
    assert irf.has_bands
    assert irf.reps == 20
    assert (irf.ci_lower <= irf.responses + 1e-12).all()
    assert (irf.responses <= irf.ci_upper + 1e-12).all()


def test_bootstrap_point_matches_demeaned_fit(differenced_small):
    irf = bootstrap_irf(differenced_small, p=1, horizon=3, reps=10, seed=0, bias_correct=False)
    assert not irf.bias_corrected
    point = impulse_response(estimate_var(within_transform(differenced_small), 1), horizon=3)
    np.testing.assert_allclose(irf.responses, point.responses)


def test_peak_reports_band(differenced_small):
    irf = bootstrap_irf(differenced_small, p=1, horizon=4, reps=20, seed=2)
    peak = irf.peak("X1", "X2")
    assert peak["h"] >= 1
    assert peak["lower"] <= peak["peak"] <= peak["upper"]
    assert peak["band_contains_zero"] in (True, False)


def test_bias_correction_raises_own_persistence(differenced_small):
    plain = bootstrap_irf(differenced_small, p=1, horizon=2, reps=10, seed=3, bias_correct=False)
    corrected = bootstrap_irf(differenced_small, p=1, horizon=2, reps=10, bias_reps=40, seed=3)
    assert corrected.bias_corrected
    assert corrected.to_dict()["bias_corrected"] is True
    # the within estimator pulls own lags towards zero on short panels
    assert corrected.responses[1, 0, 0] > plain.responses[1, 0, 0]


def test_bias_correction_skipped_for_unstable_fit():
    gen = np.random.default_rng(8)
    values = np.zeros((30, 12, 2))
    values[:, 0] = gen.normal(size=(30, 2))
    for t in range(1, 12):
        values[:, t] = 1.3 * values[:, t - 1] + gen.normal(size=(30, 2))
    panel = make_panel(values)
    irf = bootstrap_irf(panel, p=1, horizon=2, reps=5, seed=0, fixed_effects=False)
    assert not irf.bias_corrected


def test_bootstrap_band_coverage_short_horizons():
    phi = np.array([[0.5, 0.0], [0.3, 0.5]])
    truth = np.stack([np.linalg.matrix_power(phi, h) for h in range(6)]).transpose(0, 2, 1)
    inside = []
    for sim in range(100):
        panel = simulate_var_panel([phi], n=100, t=25, rng=np.random.default_rng(1000 + sim))
        irf = bootstrap_irf(panel, p=1, horizon=5, reps=100, bias_reps=50, seed=sim)
        hit = (irf.ci_lower <= truth) & (truth <= irf.ci_upper)
        inside.append(hit[1:].mean())
    assert 0.88 <= float(np.mean(inside)) <= 0.99
