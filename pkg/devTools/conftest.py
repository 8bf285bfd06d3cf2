# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Shared test fixtures.

Panels are small and simulated from fixed seeds so every test is
deterministic and runs in seconds.

Usage:
    uv run pytest devTools
"""

import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from panel_causal.panel.dataset import IncomeGroup, PanelDataset
from panel_causal.pvar.model import VarModel
from panel_causal.validation.dgp import simulate_var_panel


# =============================================================================
# BUILDERS
# =============================================================================


def make_panel(
    values: np.ndarray,
    mask: Optional[np.ndarray] = None,
    variables: Optional[Sequence[str]] = None,
    first_year: int = 2000,
    groups: Optional[dict] = None,
) -> PanelDataset:
    """Panel from an (n, t, k) array; NaN cells become missing."""
    values = np.asarray(values, dtype=float)
    n, t, k = values.shape
    if mask is None:
        mask = np.isfinite(values)
    return PanelDataset(
        entities=tuple(f"E{i + 1:03d}" for i in range(n)),
        years=tuple(range(first_year, first_year + t)),
        variables=tuple(variables or [f"X{j + 1}" for j in range(k)]),
        values=np.where(mask, np.nan_to_num(values), 0.0),
        mask=mask,
        groups=groups or {},
    )


def make_model(coeffs: Sequence[np.ndarray], sigma: np.ndarray, variables: Optional[Sequence[str]] = None) -> VarModel:
    """VarModel with given Φ and Σ (fit statistics left as placeholders)."""
    coeffs = np.asarray(coeffs, dtype=float)
    p, k, _ = coeffs.shape
    return VarModel(
        variables=tuple(variables or [f"X{j + 1}" for j in range(k)]),
        p=p,
        intercept=np.zeros(k),
        coeffs=coeffs,
        sigma=np.asarray(sigma, dtype=float),
        stderr=np.zeros_like(coeffs),
        intercept_stderr=np.zeros(k),
        ssr=np.ones(k),
        nobs=100,
        dof_resid=100 - (k * p + 1),
        llf=0.0,
        aic=0.0,
        bic=0.0,
        n_entities=10,
        sample_start=p,
    )


def chain_coefficients() -> np.ndarray:
    """X → Z → Y at lag 1 with own-lag persistence 0.5 (variable order X, Z, Y)."""
    return np.array([
        [0.5, 0.0, 0.0],
        [0.6, 0.5, 0.0],
        [0.0, 0.6, 0.5],
    ])


# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def chain_panel() -> PanelDataset:
    return simulate_var_panel(
        [chain_coefficients()], n=100, t=30, rng=np.random.default_rng(7), variables=["X", "Z", "Y"]
    )


@pytest.fixture
def var1_panel() -> PanelDataset:
    """Three-variable VAR(1) panel with one strong cross effect X1 → X2."""
    phi = np.array([
        [0.5, 0.0, 0.0],
        [0.4, 0.3, 0.0],
        [0.0, 0.0, 0.2],
    ])
    return simulate_var_panel([phi], n=60, t=20, rng=np.random.default_rng(3))


@pytest.fixture
def grouped_levels() -> PanelDataset:
    """Random-walk levels for 24 entities split across three income groups."""
    gen = np.random.default_rng(11)
    steps = gen.normal(size=(24, 16, 3))
    levels = np.cumsum(steps, axis=1) + 50.0
    labels = [IncomeGroup.HIGH_INCOME, IncomeGroup.UPPER_MIDDLE, IncomeGroup.LOW_INCOME]
    groups = {f"E{i + 1:03d}": labels[i % 3] for i in range(24)}
    return make_panel(levels, variables=["Edu", "Ineq", "Growth"], groups=groups)
