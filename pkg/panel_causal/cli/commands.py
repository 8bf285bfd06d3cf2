# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
CLI Commands

One function per subcommand. Each takes a validated RunConfig, writes its
artifacts through an ArtifactStore transaction (partial outputs are removed
on failure) and finishes with a ``manifest.json`` that records the config
hash, seed, package versions, input checksums and stage timings.

    preprocess  clean → first difference → ADF → within transform
    discover    VAR(p), Granger network, bootstrap IRF, FEVD, PCMCI+
    validate    Monte Carlo, permutation falsification, robustness table
    analyze     centrality, tiers, income-group heterogeneity
    sweep       τ_max and lag-order sweeps
"""

import logging
from typing import Callable, Optional

from panel_causal.analysis.pipeline import PipelineParams, PipelineResult, heterogeneity_run, run_pipeline
from panel_causal.config import RunConfig
from panel_causal.errors import ConfigError
from panel_causal.observability import RunManifest, StageTimer
from panel_causal.panel.cleaning import clean_panel, split_by_group
from panel_causal.panel.dataset import PanelDataset
from panel_causal.panel.io import load_panel
from panel_causal.pcmciplus.pcmci import tau_max_sweep
from panel_causal.preprocess.log import TransformLog
from panel_causal.preprocess.transforms import first_difference, preprocess_panel, within_transform
from panel_causal.pvar.granger import p_value_frame
from panel_causal.pvar.model import select_lag
from panel_causal.storage.artifact_store import ArtifactStore, get_store
from panel_causal.validation.dgp import DgpSpec
from panel_causal.validation.montecarlo import monte_carlo_validate
from panel_causal.validation.permutation import permutation_falsification
from panel_causal.validation.report import ValidationReport
from panel_causal.validation.robustness import default_robustness_specs, robustness_sweep

logger = logging.getLogger(__name__)

Command = Callable[[RunConfig, ArtifactStore, RunManifest], None]


# ----------------------------------------------------------------------
# Shared steps
# ----------------------------------------------------------------------


def _load(config: RunConfig) -> PanelDataset:
    if config.input_path is None:
        raise ConfigError("input_path is required (set it in the config file or pass --input)")
    return load_panel(
        config.input_path,
        config.layout,
        variables=config.variables,
        group_column=config.group_column,
        groups_path=config.groups_path,
    )


def _differenced(config: RunConfig, manifest: RunManifest) -> PanelDataset:
    """Differenced panel for estimation; a preprocessed input is used as-is."""
    with StageTimer("load", manifest):
        data = _load(config)
    if config.preprocessed:
        return data
    with StageTimer("clean_and_difference", manifest):
        return first_difference(clean_panel(data, config.max_missing_fraction))


def _resolve_lag(config: RunConfig, data: PanelDataset, store: ArtifactStore, manifest: RunManifest) -> int:
    if config.p != "auto":
        return int(config.p)
    with StageTimer("select_lag", manifest):
        selection = select_lag(within_transform(data), config.p_max)
    store.write_csv("lag_selection.csv", selection.table)
    manifest.notes["lag_selection"] = {"aic_p": selection.chosen_p, "bic_p": selection.bic_p}
    return selection.chosen_p


def _params(config: RunConfig, p: int) -> PipelineParams:
    return PipelineParams(
        p=p,
        horizon=config.horizon,
        ordering=tuple(config.ordering) if config.ordering else None,
        bootstrap_reps=config.bootstrap_reps,
        alpha=config.alpha,
        tau_max=config.tau_max,
        alpha_pc=config.alpha_pc,
        ridge=config.ridge,
        seed=config.seed,
        workers=config.threads,
    )


def _write_discovery(store: ArtifactStore, result: PipelineResult, prefix: str = "") -> None:
    store.write_csv(f"{prefix}granger.csv", p_value_frame(result.granger, result.model.variables), index=True)
    store.write_json(f"{prefix}granger_graph.json", result.granger_graph.to_dict())
    store.write_csv(f"{prefix}coefficients.csv", result.model.coefficient_frame())
    store.write_csv(f"{prefix}irf.csv", result.irf.to_long_frame())
    store.write_csv(f"{prefix}fevd.csv", result.fevd.to_long_frame())
    if result.pcmci_graph is not None:
        store.write_json(f"{prefix}graph.json", result.pcmci_graph.to_dict())
        store.write_text(f"{prefix}graph.dot", result.pcmci_graph.to_dot())


# ----------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------


def cmd_preprocess(config: RunConfig, store: ArtifactStore, manifest: RunManifest) -> None:
    """Clean, difference, ADF-test and demean; write the panel and its TransformLog."""
    with StageTimer("load", manifest):
        raw = _load(config)

    log = TransformLog()
    log.record_stage("Raw data", raw)
    with StageTimer("clean", manifest):
        cleaned = clean_panel(raw, config.max_missing_fraction)
    log.record_step("clean_panel", raw, cleaned, max_missing_fraction=config.max_missing_fraction)
    log.record_stage("After cleaning", cleaned, f"{cleaned.metadata.get('interpolated_cells', 0)} cell(s) interpolated")

    with StageTimer("preprocess", manifest):
        transformed, log = preprocess_panel(cleaned, adf_alpha=config.alpha, log=log)

    store.write_csv("panel_preprocessed.csv", transformed.to_frame())
    store.write_json("transform_log.json", log.to_dict())
    store.write_csv("sample_stages.csv", log.stage_table())
    manifest.notes["observations"] = {"raw": raw.n_observations, "final": transformed.n_observations}


def cmd_discover(config: RunConfig, store: ArtifactStore, manifest: RunManifest) -> None:
    """Pooled VAR, Granger network, bootstrap IRF, FEVD and the PCMCI+ graph."""
    data = _differenced(config, manifest)
    p = _resolve_lag(config, data, store, manifest)
    with StageTimer("pipeline", manifest):
        result = run_pipeline(data, _params(config, p))
    _write_discovery(store, result)
    store.write_json("model.json", result.model.to_dict())
    manifest.notes["timings_ms"] = result.timings


def cmd_validate(config: RunConfig, store: ArtifactStore, manifest: RunManifest) -> None:
    """Monte Carlo on the simulated DGP; permutation and robustness when an input panel is given."""
    report = ValidationReport()
    spec = DgpSpec(k=config.mc_variables, n=config.mc_entities, t=config.mc_years, seed=config.seed)
    with StageTimer("monte_carlo", manifest):
        report.mc = monte_carlo_validate(
            spec, reps=config.mc_reps, workers=config.threads, estimator=config.mc_estimator
        )

    if config.input_path is not None:
        with StageTimer("load", manifest):
            levels = clean_panel(_load(config), config.max_missing_fraction)
        differenced = first_difference(levels)
        p = _resolve_lag(config, differenced, store, manifest)
        with StageTimer("permutation", manifest):
            report.permutation = permutation_falsification(
                differenced,
                reps=config.permutation_reps,
                alpha=config.alpha,
                seed=config.seed,
                p=p,
                workers=config.threads,
            )
        with StageTimer("robustness", manifest):
            specs = default_robustness_specs(levels.years, split_year=config.split_year, p=p)
            report.robustness = robustness_sweep(levels, specs, alpha=config.alpha, tracked=config.tracked)
        report.decisions["lag"] = f"p={p}"
    else:
        logger.info("No input panel configured: permutation and robustness checks skipped")

    report.decisions["monte_carlo"] = (
        f"mean absolute error over all coefficients, {config.mc_estimator} VAR(1) fits with fixed effects"
    )
    store.write_json("validation.json", report.to_dict())
    store.write_text("validation_summary.txt", report.summary_text())


def cmd_analyze(config: RunConfig, store: ArtifactStore, manifest: RunManifest) -> None:
    """Centrality and tiers on the pooled panel, then the per-group heterogeneity run."""
    data = _differenced(config, manifest)
    p = _resolve_lag(config, data, store, manifest)
    params = _params(config, p)
    with StageTimer("pipeline", manifest):
        pooled = run_pipeline(data, params)
    store.write_csv("centrality.csv", pooled.centrality.to_frame())
    store.write_csv("tiers.csv", pooled.tiers.to_frame())

    if not data.groups:
        logger.info("No income group labels: heterogeneity run skipped")
        return
    with StageTimer("heterogeneity", manifest):
        panels = split_by_group(data, config.min_group_size)
        groups = heterogeneity_run(panels, params, config.tracked, workers=1)
    for label, result in groups.results.items():
        _write_discovery(store, result, prefix=f"groups/{label}/")
        store.write_csv(f"groups/{label}/centrality.csv", result.centrality.to_frame())
    store.write_json("heterogeneity.json", {"comparison": groups.comparison, "failures": groups.failures})


def cmd_sweep(config: RunConfig, store: ArtifactStore, manifest: RunManifest) -> None:
    """PCMCI+ graph summary per τ_max and the information criteria per lag order."""
    data = _differenced(config, manifest)
    demeaned = within_transform(data)
    with StageTimer("tau_max_sweep", manifest):
        rows = tau_max_sweep(
            demeaned, config.tau_max_sweep, alpha=config.alpha, alpha_pc=config.alpha_pc, workers=config.threads
        )
    store.write_json("tau_sweep.json", rows)
    with StageTimer("lag_sweep", manifest):
        selection = select_lag(demeaned, config.p_max)
    store.write_csv("lag_sweep.csv", selection.table)
    manifest.notes["lag_selection"] = {"aic_p": selection.chosen_p, "bic_p": selection.bic_p}


COMMANDS: dict[str, Command] = {
    "preprocess": cmd_preprocess,
    "discover": cmd_discover,
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
}


def run_command(name: str, config: RunConfig, store: Optional[ArtifactStore] = None) -> RunManifest:
    """Execute a subcommand inside a store transaction and write its manifest."""
    if name not in COMMANDS:
        raise ConfigError(f"Unknown command '{name}' (expected one of {sorted(COMMANDS)})")
    store = store or get_store(config.output_dir)
    manifest = RunManifest.start(name, config)
    with store.transaction():
        start = len(store.written)
        COMMANDS[name](config, store, manifest)
        for output in store.written[start:]:
            manifest.record_output(output)
        store.write_json("manifest.json", manifest.to_dict())
    logger.info(f"✅ {name}: {len(manifest.outputs)} artifact(s) in {store.root}")
    return manifest
