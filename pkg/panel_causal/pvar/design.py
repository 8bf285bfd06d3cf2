# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Stacked VAR Design

Builds the pooled regression design for a panel VAR(p): for each entity
and each year t ≥ ``sample_start`` with the response and all p lags
observed, one row

    y = x_t                     (k responses)
    X = [1, x_{t-1}, ..., x_{t-p}]

Lags never cross entity boundaries: every entity loses its first
``sample_start`` years, and a row needs the whole window
x_{t-sample_start} .. x_t observed, so every p fitted with one
``sample_start`` uses the same rows.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from panel_causal.errors import ConfigError, DataError
from panel_causal.panel.dataset import PanelDataset


@dataclass(frozen=True)
class VarDesign:
    y: np.ndarray            # (nobs, k)
    x: np.ndarray            # (nobs, 1 + k·p)
    columns: tuple[str, ...]
    p: int
    sample_start: int
    n_entities: int

    @property
    def nobs(self) -> int:
        return self.y.shape[0]

    def lag_columns(self, k: int, variable: int) -> list[int]:
        """Design columns holding lags 1..p of one variable."""
        return [1 + lag * k + variable for lag in range(self.p)]


def column_names(variables: tuple[str, ...], p: int) -> tuple[str, ...]:
    return ("const", *(f"{v}.L{lag}" for lag in range(1, p + 1) for v in variables))


def build_design(data: PanelDataset, p: int, sample_start: Optional[int] = None) -> VarDesign:
    if p < 1:
        raise ConfigError(f"Lag order p must be >= 1, got {p}")
    start = p if sample_start is None else sample_start
    if start < p:
        raise ConfigError(f"sample_start ({start}) cannot be smaller than p ({p})")
    if data.n_years <= start:
        raise DataError(f"Panel with T={data.n_years} cannot support {start} lag year(s)")

    n, t_len, k = data.shape
    ys, xs = [], []
    used_entities = 0
    for i in range(n):
        observed = data.mask[i].all(axis=1)
        rows = [t for t in range(start, t_len) if observed[t - start: t + 1].all()]
        if not rows:
            continue
        used_entities += 1
        rows_arr = np.asarray(rows)
        ys.append(data.values[i, rows_arr])
        lagged = [data.values[i, rows_arr - lag] for lag in range(1, p + 1)]
        xs.append(np.column_stack([np.ones(len(rows)), *lagged]))

    if not ys:
        raise DataError(f"No entity has {p + 1} consecutive complete years")
    return VarDesign(
        y=np.vstack(ys),
        x=np.vstack(xs),
        columns=column_names(data.variables, p),
        p=p,
        sample_start=start,
        n_entities=used_entities,
    )
