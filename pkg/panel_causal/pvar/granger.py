# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Panel Granger Causality

Nested-regression F test of H₀: all p lags of ``source`` have zero
coefficients in the ``target`` equation. The restricted model re-fits the
target equation on the same stacked sample without those columns.

    F = [(SSR_r − SSR_u) / p] / [SSR_u / (nobs − (k·p + 1))]

Edge strength is the signed partial correlation implied by the two fits,
sign(Σ_ℓ Φ_ℓ[target, source]) · sqrt((SSR_r − SSR_u) / SSR_r).
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Optional

import numpy as np
import pandas as pd
from scipy import stats

from panel_causal.errors import ConfigError, DataError
from panel_causal.panel.dataset import PanelDataset
from panel_causal.pcmciplus.graph import CausalEdge, CausalGraph, EdgeKind, Provenance
from panel_causal.pvar.design import VarDesign, build_design
from panel_causal.pvar.model import VarModel, check_rank

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GrangerResult:
    source: str
    target: str
    f_stat: float
    p_value: float
    df_num: int
    df_den: int
    strength: float
    significant: bool

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _ssr(x: np.ndarray, y: np.ndarray) -> float:
    beta, _, _, _ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ beta
    return float(resid @ resid)


def _test_on_design(
    model: VarModel, design: VarDesign, source: str, target: str, alpha: float
) -> GrangerResult:
    if source == target:
        raise ConfigError(f"Granger test needs distinct variables (got {source} twice)")
    k = model.k
    s = model.variables.index(source)
    j = model.variables.index(target)
    y = design.y[:, j]
    drop = set(design.lag_columns(k, s))
    keep = [c for c in range(design.x.shape[1]) if c not in drop]
    restricted = design.x[:, keep]
    check_rank(restricted, tuple(design.columns[c] for c in keep))

    ssr_u = float(model.ssr[j])
    ssr_r = _ssr(restricted, y)
    q = model.p
    df_den = design.nobs - (k * model.p + 1)
    gain = max(ssr_r - ssr_u, 0.0)
    f_stat = (gain / q) / (ssr_u / df_den) if ssr_u > 0 else math.inf
    p_value = float(stats.f.sf(f_stat, q, df_den))
    direction = np.sign(model.coeffs[:, j, s].sum()) or 1.0
    strength = float(direction * math.sqrt(gain / ssr_r)) if ssr_r > 0 else 0.0
    return GrangerResult(
        source=source,
        target=target,
        f_stat=float(f_stat),
        p_value=p_value,
        df_num=q,
        df_den=df_den,
        strength=strength,
        significant=p_value < alpha,
    )


def granger_test(
    model: VarModel, data: PanelDataset, source: str, target: str, alpha: float = 0.05
) -> GrangerResult:
    """F test that ``source`` does not Granger-cause ``target``."""
    for name in (source, target):
        if name not in model.variables:
            raise DataError(f"Unknown variable '{name}'")
    design = build_design(data, model.p, model.sample_start)
    if design.nobs != model.nobs:
        raise DataError("Model was not fitted on this panel (stacked sample sizes differ)")
    return _test_on_design(model, design, source, target, alpha)


def granger_matrix(model: VarModel, data: PanelDataset, alpha: float = 0.05) -> list[GrangerResult]:
    """All k(k−1) ordered pairs, in (source, target) variable order."""
    design = build_design(data, model.p, model.sample_start)
    if design.nobs != model.nobs:
        raise DataError("Model was not fitted on this panel (stacked sample sizes differ)")
    return [
        _test_on_design(model, design, source, target, alpha)
        for source in model.variables
        for target in model.variables
        if source != target
    ]


def p_value_frame(results: list[GrangerResult], variables: tuple[str, ...]) -> pd.DataFrame:
    """k×k matrix of p-values, rows = source, columns = target, NaN diagonal."""
    frame = pd.DataFrame(np.nan, index=list(variables), columns=list(variables))
    for r in results:
        frame.loc[r.source, r.target] = r.p_value
    frame.index.name = "source"
    return frame


def granger_network(
    model: VarModel,
    data: PanelDataset,
    alpha: float = 0.05,
    results: Optional[list[GrangerResult]] = None,
) -> CausalGraph:
    """Directed graph with one lag-1 edge per pair with p < α."""
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")
    results = results if results is not None else granger_matrix(model, data, alpha)
    edges = [
        CausalEdge(r.source, r.target, 1, r.strength, r.p_value, EdgeKind.LAGGED, Provenance.GRANGER)
        for r in results
        if r.p_value < alpha
    ]
    graph = CausalGraph(nodes=model.variables, edges=edges, tau_max=model.p, alpha=alpha, method="granger")
    logger.info(
        f"Granger network: {graph.link_count} of {len(results)} pairs significant "
        f"(density {graph.density:.1%})"
    )
    return graph
