# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Panel Causal

Causal network analysis for entity-by-year panels: fixed-effects panel VAR
with Granger networks, bootstrap impulse responses and variance
decompositions, PCMCI+ temporal graph discovery, estimator validation, and
centrality-based priority tiers.

Usage:
    from panel_causal import load_panel, clean_panel, preprocess_panel, run_pipeline, PipelineParams

    raw = load_panel("data/sdr_long.csv")
    panel, log = preprocess_panel(clean_panel(raw), fixed_effects=False)
    result = run_pipeline(panel, PipelineParams(p=2, seed=7))
"""

from panel_causal.analysis import PipelineParams, centrality, run_pipeline, tier_classify
from panel_causal.config import RunConfig, Settings, get_settings, load_run_config
from panel_causal.errors import ConfigError, DataError, NumericalError, PanelCausalError
from panel_causal.panel import IncomeGroup, PanelDataset, clean_panel, load_panel, split_by_group
from panel_causal.pcmciplus import CausalGraph, ParCorr, run_pcmci_plus
from panel_causal.preprocess import TransformLog, first_difference, preprocess_panel, within_transform
from panel_causal.pvar import bootstrap_irf, estimate_var, fevd, granger_network, impulse_response

__version__ = "0.1.0"

__all__ = [
    "CausalGraph",
    "ConfigError",
    "DataError",
    "IncomeGroup",
    "NumericalError",
    "PanelCausalError",
    "PanelDataset",
    "ParCorr",
    "PipelineParams",
    "RunConfig",
    "Settings",
    "TransformLog",
    "bootstrap_irf",
    "centrality",
    "clean_panel",
    "estimate_var",
    "fevd",
    "first_difference",
    "get_settings",
    "granger_network",
    "impulse_response",
    "load_panel",
    "load_run_config",
    "preprocess_panel",
    "run_pcmci_plus",
    "run_pipeline",
    "split_by_group",
    "tier_classify",
    "within_transform",
]
