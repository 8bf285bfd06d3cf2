# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Estimation Pipeline

One pass over a differenced panel:

    within transform → VAR(p) → Granger network → bootstrap IRF → FEVD
    → PCMCI+ → centrality → tiers

``heterogeneity_run`` applies the same pass to each income-group panel,
isolating failures per group, and compares tracked IRF peaks across
groups.

Usage:
    params = PipelineParams(p=2, bootstrap_reps=200, seed=7)
    result = run_pipeline(differenced, params)
    groups = heterogeneity_run(split_by_group(differenced), params, [("Edu", "Ineq")])
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field

from panel_causal.analysis.centrality import (
    CentralityTable,
    RoleRules,
    TierAssignment,
    TierRules,
    centrality,
    direct_effects,
    tier_classify,
)
from panel_causal.errors import PanelCausalError
from panel_causal.panel.dataset import PanelDataset
from panel_causal.pcmciplus.graph import CausalGraph
from panel_causal.pcmciplus.pcmci import run_pcmci_plus
from panel_causal.preprocess.transforms import within_transform
from panel_causal.pvar.bootstrap import bootstrap_irf
from panel_causal.pvar.granger import GrangerResult, granger_matrix, granger_network
from panel_causal.pvar.irf import FevdResult, IrfResult, fevd
from panel_causal.pvar.model import VarModel, estimate_var
from panel_causal.workers import ReplicatePool

logger = logging.getLogger(__name__)


class PipelineParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    p: int = Field(2, ge=1)
    horizon: int = Field(10, ge=0)
    ordering: Optional[tuple[str, ...]] = None
    bootstrap_reps: int = Field(200, ge=2)
    alpha: float = Field(0.05, ge=0.0, le=1.0)
    tau_max: int = Field(3, ge=1, le=10)
    alpha_pc: Optional[float] = Field(None, ge=0.0, le=1.0)
    ridge: float = Field(0.0, ge=0.0)
    fixed_effects: bool = True
    run_pcmci: bool = True
    seed: int = 0
    workers: int = Field(1, ge=1)


@dataclass
class PipelineResult:
    model: VarModel
    granger: list[GrangerResult]
    granger_graph: CausalGraph
    irf: IrfResult
    fevd: FevdResult
    pcmci_graph: Optional[CausalGraph]
    centrality: CentralityTable
    tiers: TierAssignment
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model.to_dict(),
            "granger": [g.to_dict() for g in self.granger],
            "granger_graph": self.granger_graph.to_dict(),
            "pcmci_graph": self.pcmci_graph.to_dict() if self.pcmci_graph else None,
            "centrality": self.centrality.to_frame().to_dict(orient="records"),
            "tiers": self.tiers.to_dict(),
            "timings_ms": self.timings,
        }


@dataclass
class HeterogeneityResult:
    results: dict[str, PipelineResult]
    failures: dict[str, str]
    comparison: list[dict[str, Any]]


def run_pipeline(
    data: PanelDataset,
    params: PipelineParams,
    role_rules: RoleRules = RoleRules(),
    tier_rules: TierRules = TierRules(),
) -> PipelineResult:
    """Full estimation pass on a differenced panel."""
    timings: dict[str, float] = {}

    def _tick(stage: str, t0: float) -> None:
        timings[stage] = (time.monotonic() - t0) * 1000

    t0 = time.monotonic()
    panel = within_transform(data) if params.fixed_effects else data
    model = estimate_var(panel, params.p)
    if not model.is_stable:
        logger.warning(f"⚠️ VAR({params.p}) is not stable (spectral radius {model.spectral_radius:.3f})")
    _tick("estimate", t0)

    t0 = time.monotonic()
    granger = granger_matrix(model, panel, params.alpha)
    graph = granger_network(model, panel, params.alpha, results=granger)
    _tick("granger", t0)

    t0 = time.monotonic()
    irf = bootstrap_irf(
        data,
        params.p,
        params.horizon,
        params.ordering,
        reps=params.bootstrap_reps,
        seed=params.seed,
        workers=params.workers,
        fixed_effects=params.fixed_effects,
        ridge=params.ridge,
    )
    decomposition = fevd(model, params.horizon, params.ordering, params.ridge)
    _tick("irf", t0)

    pcmci_graph = None
    if params.run_pcmci:
        t0 = time.monotonic()
        pcmci_graph = run_pcmci_plus(
            panel, tau_max=params.tau_max, alpha=params.alpha, alpha_pc=params.alpha_pc, workers=params.workers
        )
        _tick("pcmci", t0)

    table = centrality(graph, role_rules)
    directness = direct_effects(pcmci_graph) if pcmci_graph else {}
    tiers = tier_classify(table, directness, tier_rules)
    return PipelineResult(model, granger, graph, irf, decomposition, pcmci_graph, table, tiers, timings)


def _bands_overlap(a: Mapping[str, Any], b: Mapping[str, Any]) -> bool:
    return not (a["upper"] < b["lower"] or b["upper"] < a["lower"])


def compare_peaks(results: Mapping[str, PipelineResult], tracked: Sequence[tuple[str, str]]) -> list[dict[str, Any]]:
    """Tracked-pair IRF peaks per group, flagged when bands are disjoint from another group's."""
    rows: list[dict[str, Any]] = []
    for impulse, response in tracked:
        peaks = {group: res.irf.peak(impulse, response) for group, res in results.items()}
        for group, peak in peaks.items():
            disjoint = [
                other for other in peaks
                if other != group and not _bands_overlap(peak, peaks[other])
            ]
            rows.append({"group": group, "pair": f"{impulse}>{response}", **peak,
                         "non_overlapping_with": disjoint, "differs": bool(disjoint)})
    return rows


def heterogeneity_run(
    panels: Mapping[Any, PanelDataset],
    params: PipelineParams,
    tracked: Sequence[tuple[str, str]] = (),
    workers: int = 1,
) -> HeterogeneityResult:
    """
    Identical pipeline per group panel.

    A group whose pipeline raises is recorded in ``failures`` and the
    remaining groups are still produced. Every group uses ``params.seed``.
    """
    labels = [getattr(g, "value", str(g)) for g in panels]
    items = list(zip(labels, panels.values()))

    def _one(item: tuple[str, PanelDataset]) -> tuple[str, Optional[PipelineResult], Optional[str]]:
        label, panel = item
        try:
            logger.info(f"🔄 Pipeline for group {label} (N={panel.n_entities})")
            return label, run_pipeline(panel, params), None
        except PanelCausalError as e:
            logger.error(f"❌ Pipeline failed for group {label}: {e}")
            return label, None, str(e)

    results: dict[str, PipelineResult] = {}
    failures: dict[str, str] = {}
    for label, result, error in ReplicatePool(workers=workers, label="groups").map(_one, items):
        if result is not None:
            results[label] = result
        else:
            failures[label] = error or "unknown error"

    comparison = compare_peaks(results, tracked)
    logger.info(f"✅ Heterogeneity: {len(results)} group(s) estimated, {len(failures)} failed")
    return HeterogeneityResult(results=results, failures=failures, comparison=comparison)
