# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""Network centrality, tier classification and pooled / per-group pipeline orchestration."""

from panel_causal.analysis.centrality import (
    CentralityTable,
    NodeCentrality,
    Role,
    RoleRules,
    Tier,
    TierAssignment,
    TierRules,
    centrality,
    direct_effects,
    tier_classify,
)
from panel_causal.analysis.fixtures import SDG_DIRECT, SDG_LINKS, SDG_NODES, sdg_reference_graph
from panel_causal.analysis.pipeline import (
    HeterogeneityResult,
    PipelineParams,
    PipelineResult,
    compare_peaks,
    heterogeneity_run,
    run_pipeline,
)

__all__ = [
    "CentralityTable",
    "HeterogeneityResult",
    "NodeCentrality",
    "PipelineParams",
    "PipelineResult",
    "Role",
    "RoleRules",
    "SDG_DIRECT",
    "SDG_LINKS",
    "SDG_NODES",
    "Tier",
    "TierAssignment",
    "TierRules",
    "centrality",
    "compare_peaks",
    "direct_effects",
    "heterogeneity_run",
    "run_pipeline",
    "sdg_reference_graph",
    "tier_classify",
]
