# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""Centrality roles, tiers, the full pipeline and the income-group run."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_panel
from panel_causal.analysis import (
    SDG_DIRECT,
    SDG_LINKS,
    SDG_NODES,
    PipelineParams,
    Role,
    RoleRules,
    Tier,
    TierRules,
    centrality,
    compare_peaks,
    direct_effects,
    heterogeneity_run,
    run_pipeline,
    sdg_reference_graph,
    tier_classify,
)
from panel_causal.panel import IncomeGroup, split_by_group
from panel_causal.pcmciplus import CausalGraph
from panel_causal.preprocess import first_difference
from panel_causal.validation import simulate_var_panel

EXPECTED_ROLES = {
    "Edu": (1, 3, Role.DRIVER),
    "Growth": (2, 2, Role.MEDIATOR),
    "Inst": (1, 2, Role.ENABLER),
    "Ineq": (2, 1, Role.OUTCOME),
    "Climate": (1, 1, Role.NEUTRAL),
    "Pov": (2, 0, Role.OUTCOME),
    "Health": (1, 0, Role.OUTCOME),
    "Energy": (0, 1, Role.ENABLER),
}

EXPECTED_TIERS = {
    "Edu": Tier.T1,
    "Growth": Tier.T1,
    "Inst": Tier.T2,
    "Energy": Tier.T2,
    "Ineq": Tier.T3,
    "Climate": Tier.T3,
    "Pov": Tier.T3,
    "Health": Tier.T3,
}


# =============================================================================
# REFERENCE NETWORK
# =============================================================================


def test_reference_network_degrees_and_roles():
    table = centrality(sdg_reference_graph())
    assert table.edge_count == len(SDG_LINKS) == 10
    for node, (in_degree, out_degree, role) in EXPECTED_ROLES.items():
        row = table[node]
        assert (row.in_degree, row.out_degree, row.role) == (in_degree, out_degree, role), node


def test_reference_network_tiers():
    tiers = tier_classify(centrality(sdg_reference_graph()), SDG_DIRECT)
    for node, tier in EXPECTED_TIERS.items():
        assert tiers.tier_of(node) is tier, node
    assert tiers.members(Tier.T1) == ["Edu", "Growth"]
    assert "direct=yes" in tiers.to_dict()["Edu"]["rationale"]


def test_centrality_frame_columns():
    frame = centrality(sdg_reference_graph()).to_frame()
    assert frame.columns.tolist() == ["node", "in", "out", "total", "role"]
    assert frame["node"].tolist() == list(SDG_NODES)


def test_self_links_do_not_count():
    graph = CausalGraph.from_pairs(["A", "B"], [("A", "A"), ("A", "B")])
    table = centrality(graph)
    assert (table["A"].in_degree, table["A"].out_degree) == (0, 1)


# =============================================================================
# RULES
# =============================================================================


@pytest.mark.parametrize(
    ("in_degree", "out_degree", "role"),
    [
        (0, 0, Role.NEUTRAL),
        (3, 3, Role.MEDIATOR),
        (1, 1, Role.NEUTRAL),
        (0, 2, Role.DRIVER),
        (2, 3, Role.ENABLER),
        (4, 3, Role.OUTCOME),
    ],
)
def test_role_rules_first_match(in_degree, out_degree, role):
    assert RoleRules().classify(in_degree, out_degree) is role


def test_role_rules_are_configurable():
    assert RoleRules(driver_margin=3).classify(0, 2) is Role.ENABLER
    assert RoleRules(mediator_min=1).classify(1, 1) is Role.MEDIATOR


def test_tier_rules():
    rules = TierRules()
    assert rules.classify(0, 3, direct=False) is Tier.T2
    assert rules.classify(0, 3, direct=True) is Tier.T1
    assert rules.classify(0, 0, direct=False) is Tier.T3
    assert rules.classify(3, 2, direct=False) is Tier.T2
    assert Tier.T2.description == "enabler"


def test_direct_effects_from_graph():
    graph = CausalGraph.from_pairs(["A", "B", "C"], [("A", "B"), ("C", "C")])
    assert direct_effects(graph) == {"A": True, "B": False, "C": False}


# =============================================================================
# PIPELINE
# =============================================================================


def test_run_pipeline_end_to_end(chain_panel):
    params = PipelineParams(p=1, horizon=4, bootstrap_reps=20, tau_max=1, alpha=0.01, seed=3)
    result = run_pipeline(chain_panel, params)
    assert result.model.p == 1
    assert len(result.granger) == 6
    assert result.granger_graph.has_link("X", "Z")
    assert result.irf.has_bands
    assert result.irf.responses.shape == (5, 3, 3)
    assert result.pcmci_graph is not None and result.pcmci_graph.has_link("Z", "Y")
    assert {e.node for e in result.tiers.entries} == {"X", "Z", "Y"}
    assert set(result.timings) == {"estimate", "granger", "irf", "pcmci"}
    assert result.to_dict()["pcmci_graph"]["method"] == "pcmci+"


def test_run_pipeline_without_pcmci_has_no_tier_one(chain_panel):
    params = PipelineParams(p=1, horizon=2, bootstrap_reps=10, run_pcmci=False)
    result = run_pipeline(chain_panel, params)
    assert result.pcmci_graph is None
    assert result.tiers.members(Tier.T1) == []


def test_pipeline_params_are_validated():
    with pytest.raises(ValueError):
        PipelineParams(tau_max=11)
    with pytest.raises(ValueError):
        PipelineParams(p=0)


# =============================================================================
# HETEROGENEITY
# =============================================================================


def test_heterogeneity_isolates_failing_group(grouped_levels):
    panels = split_by_group(first_difference(grouped_levels), min_entities=5)
    tiny = make_panel(np.random.default_rng(0).normal(size=(6, 1, 3)), variables=["Edu", "Ineq", "Growth"])
    panels[IncomeGroup.LOWER_MIDDLE] = tiny
    params = PipelineParams(p=1, horizon=3, bootstrap_reps=10, run_pcmci=False, seed=2)

    outcome = heterogeneity_run(panels, params, tracked=[("Edu", "Ineq")])
    assert set(outcome.results) == {"HighIncome", "UpperMiddle", "LowIncome"}
    assert set(outcome.failures) == {"LowerMiddle"}
    assert len(outcome.comparison) == 3
    assert {row["pair"] for row in outcome.comparison} == {"Edu>Ineq"}


def test_compare_peaks_flags_disjoint_bands(grouped_levels):
    panels = split_by_group(first_difference(grouped_levels), min_entities=5)
    params = PipelineParams(p=1, horizon=3, bootstrap_reps=10, run_pcmci=False)
    results = heterogeneity_run(panels, params).results
    rows = compare_peaks(results, [("Edu", "Growth")])
    for row in rows:
        assert row["lower"] <= row["peak"] <= row["upper"]
        assert row["differs"] == bool(row["non_overlapping_with"])
        assert row["group"] not in row["non_overlapping_with"]


def test_heterogeneity_recovers_planted_group_effects():
    effects = {"Strong": -0.22, "Middle": -0.12, "Weak": -0.06}
    peaks = {group: [] for group in effects}
    weak_contains_zero = 0
    for seed in range(50):
        gen = np.random.default_rng(900 + seed)
        panels = {}
        for group, effect in effects.items():
            phi = np.diag([0.3, 0.3, 0.3])
            phi[1, 0] = effect
            panels[group] = simulate_var_panel([phi], n=15, t=16, rng=gen, variables=["Edu", "Ineq", "Growth"])
        params = PipelineParams(p=1, horizon=3, bootstrap_reps=50, run_pcmci=False, seed=seed)
        rows = {row["group"]: row for row in heterogeneity_run(panels, params, tracked=[("Edu", "Ineq")]).comparison}
        for group in effects:
            peaks[group].append(rows[group]["peak"])
        weak_contains_zero += rows["Weak"]["band_contains_zero"]
    mean_peak = {group: np.mean(values) for group, values in peaks.items()}
    assert mean_peak["Strong"] < mean_peak["Middle"] < mean_peak["Weak"]
    assert weak_contains_zero >= 40


@settings(max_examples=40, deadline=None)
@given(pairs=st.sets(st.tuples(st.sampled_from(SDG_NODES), st.sampled_from(SDG_NODES)), max_size=30))
def test_degree_sums_equal_link_count(pairs):
    graph = CausalGraph.from_pairs(SDG_NODES, sorted(pairs))
    table = centrality(graph)
    assert sum(r.in_degree for r in table.rows) == sum(r.out_degree for r in table.rows) == graph.link_count
    assert table.edge_count == graph.link_count
