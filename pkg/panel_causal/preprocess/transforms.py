# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Stationarity Transforms

First differencing, the within (entity-demeaning) transform, and the
combined difference → ADF → within pipeline used ahead of estimation.

Usage:
    from panel_causal.preprocess import preprocess_panel

    demeaned, log = preprocess_panel(cleaned, adf_alpha=0.05)
"""

import logging
import time
from typing import Optional

import numpy as np

from panel_causal.errors import DataError
from panel_causal.panel.dataset import PanelDataset
from panel_causal.preprocess.adf import adf_panel, schwert_max_lag
from panel_causal.preprocess.log import TransformLog

logger = logging.getLogger(__name__)


def first_difference(data: PanelDataset) -> PanelDataset:
    """
    Δx[i, t] = x[i, t] − x[i, t−1] over years 2..T.

    A difference touching a missing cell is missing. Entities left with no
    observed difference for some variable are dropped with a warning.
    """
    if data.n_years < 2:
        raise DataError(f"first_difference needs at least 2 years, panel has {data.n_years}")

    values = data.values[:, 1:] - data.values[:, :-1]
    mask = data.mask[:, 1:] & data.mask[:, :-1]
    usable = mask.any(axis=1).all(axis=1)
    dropped = [e for e, ok in zip(data.entities, usable) if not ok]
    if dropped:
        logger.warning(
            f"⚠️ first_difference: dropped {len(dropped)} entit(ies) with fewer than 2 "
            f"consecutive observations for some variable: {dropped[:10]}"
        )
    if not usable.any():
        raise DataError("first_difference: no entity has two consecutive observations for every variable")

    keep = np.flatnonzero(usable)
    return data.with_values(
        np.where(mask, values, 0.0)[keep],
        mask[keep],
        entities=[data.entities[i] for i in keep],
        years=data.years[1:],
        differenced=True,
        dropped_in_differencing=dropped,
    )


def within_transform(data: PanelDataset) -> PanelDataset:
    """Subtract each entity's per-variable mean over its observed years."""
    counts = data.mask.sum(axis=1, keepdims=True)
    if np.any(counts == 0):
        raise DataError("within_transform: an entity has no observations for some variable")
    means = np.where(data.mask, data.values, 0.0).sum(axis=1, keepdims=True) / counts
    demeaned = np.where(data.mask, data.values - means, 0.0)
    return data.with_values(demeaned, data.mask, demeaned=True)


def preprocess_panel(
    data: PanelDataset,
    adf_alpha: float = 0.05,
    fixed_effects: bool = True,
    log: Optional[TransformLog] = None,
    adf_max_lag: Optional[int] = None,
) -> tuple[PanelDataset, TransformLog]:
    """
    Difference, test the differenced series for unit roots, then demean.

    Args:
        data: cleaned panel.
        adf_alpha: significance level for the ADF reject flags.
        fixed_effects: skip the within transform when False.
        log: existing log to append to (e.g. already holding the raw and
            cleaned stages).
        adf_max_lag: fixed ADF lag ceiling; Schwert rule per series if None.

    Returns:
        (transformed panel, TransformLog)
    """
    t0 = time.monotonic()
    log = log if log is not None else TransformLog()

    differenced = first_difference(data)
    log.record_step("first_difference", data, differenced)
    log.record_stage("After diff.", differenced)

    log.adf_settings = {
        "regression": "c",
        "max_lag": adf_max_lag if adf_max_lag is not None else f"schwert ({schwert_max_lag(differenced.n_years)})",
        "autolag": "AIC",
        "alpha": adf_alpha,
        "critical_values": "MacKinnon response surface",
    }
    log.adf_results = adf_panel(differenced, alpha=adf_alpha, max_lag=adf_max_lag)
    nonstationary = [v for v, r in log.adf_results.items() if not r.reject]
    if nonstationary:
        logger.warning(f"⚠️ ADF does not reject a unit root for differenced {nonstationary}")

    result = differenced
    if fixed_effects:
        result = within_transform(differenced)
        log.record_step("within_transform", differenced, result)
        log.record_stage("After FE", result, "Demeaned")
    else:
        logger.info("Fixed effects disabled: within transform skipped")

    log.reconcile()
    elapsed = (time.monotonic() - t0) * 1000
    logger.info(
        f"✅ preprocess_panel: {result.n_entities}×{result.n_years} "
        f"({result.n_observations} obs, FE={'on' if fixed_effects else 'off'}) ({elapsed:.0f}ms)"
    )
    return result, log
