# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Stacked Lag Windows

Turns a panel into pooled rows (entity i, year t) with t ≥ τ_max and every
variable observed over t − τ_max .. t, so a lag reference never reaches
into another entity's series. Entities are stacked in sorted identifier
order.
"""

from typing import Sequence

import numpy as np

from panel_causal.errors import ConfigError, DataError
from panel_causal.panel.dataset import PanelDataset


class StackedPanel:
    """
    Lag-window view of a panel.

    ``lagged[τ, r, v]`` is variable v at time t_r − τ for stacked row r.
    """

    def __init__(self, data: PanelDataset, tau_max: int):
        if tau_max < 1:
            raise ConfigError(f"tau_max must be >= 1, got {tau_max}")
        if data.n_years <= tau_max:
            raise DataError(f"Panel with T={data.n_years} cannot support tau_max={tau_max}")

        self.variables = data.variables
        self.tau_max = tau_max
        order = sorted(range(data.n_entities), key=lambda i: data.entities[i])
        blocks, entity_rows = [], []
        for rank, i in enumerate(order):
            complete = data.mask[i].all(axis=1)
            rows = [t for t in range(tau_max, data.n_years) if complete[t - tau_max: t + 1].all()]
            if not rows:
                continue
            rows_arr = np.asarray(rows)
            blocks.append(np.stack([data.values[i, rows_arr - lag] for lag in range(tau_max + 1)]))
            entity_rows.append(np.full(len(rows), rank))
        if not blocks:
            raise DataError(f"No entity has {tau_max + 1} consecutive complete years")

        self.lagged = np.concatenate(blocks, axis=1)
        self.row_entity = np.concatenate(entity_rows)
        self.lagged.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return self.lagged.shape[1]

    @property
    def n_variables(self) -> int:
        return self.lagged.shape[2]

    def column(self, variable: int, lag: int) -> np.ndarray:
        return self.lagged[lag, :, variable]

    def matrix(self, refs: Sequence[tuple[int, int]]) -> np.ndarray:
        return np.column_stack([self.lagged[lag, :, v] for v, lag in refs])

    def label(self, ref: tuple[int, int]) -> str:
        v, lag = ref
        return f"{self.variables[v]}(t-{lag})" if lag else f"{self.variables[v]}(t)"
