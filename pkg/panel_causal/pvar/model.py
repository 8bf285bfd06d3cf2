# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Panel VAR Estimation

Pooled OLS on the stacked, within-transformed panel:

    y_it = Φ₀ + Φ₁ y_{i,t-1} + ... + Φ_p y_{i,t-p} + ε_it

Coefficient convention: ``coeffs[ℓ-1][j, x]`` is the effect of driver x at
lag ℓ on response j. Residual covariance uses dof_resid = nobs − (k·p + 1).
Information criteria come from the Gaussian log-likelihood of the stacked
system; only their ordering across specifications is meaningful.

Usage:
    model = estimate_var(demeaned, p=2)
    selection = select_lag(demeaned, p_max=3)
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
import pandas as pd
from scipy import linalg

from panel_causal.errors import ConfigError, NumericalError
from panel_causal.panel.dataset import PanelDataset
from panel_causal.pvar.design import VarDesign, build_design

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VarModel:
    variables: tuple[str, ...]
    p: int
    intercept: np.ndarray          # (k,)
    coeffs: np.ndarray             # (p, k, k)
    sigma: np.ndarray              # (k, k)
    stderr: np.ndarray             # (p, k, k)
    intercept_stderr: np.ndarray   # (k,)
    ssr: np.ndarray                # (k,) per equation
    nobs: int
    dof_resid: int
    llf: float
    aic: float
    bic: float
    n_entities: int
    sample_start: int

    @property
    def k(self) -> int:
        return len(self.variables)

    @property
    def n_coefficients(self) -> int:
        """Autoregressive coefficients (k²·p), intercepts excluded."""
        return int(self.coeffs.size)

    def companion(self) -> np.ndarray:
        k, p = self.k, self.p
        top = np.hstack(list(self.coeffs)) if p > 1 else self.coeffs[0]
        if p == 1:
            return np.array(top, copy=True)
        bottom = np.hstack([np.eye(k * (p - 1)), np.zeros((k * (p - 1), k))])
        return np.vstack([top, bottom])

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(linalg.eigvals(self.companion()))))

    @property
    def is_stable(self) -> bool:
        return self.spectral_radius < 1.0

    def coefficient(self, response: str, driver: str, lag: int = 1) -> float:
        return float(self.coeffs[lag - 1, self.variables.index(response), self.variables.index(driver)])

    def coefficient_frame(self) -> pd.DataFrame:
        """Long table: lag, response, driver, coef, stderr, t."""
        rows = []
        for lag in range(self.p):
            for j, response in enumerate(self.variables):
                for x, driver in enumerate(self.variables):
                    coef = float(self.coeffs[lag, j, x])
                    se = float(self.stderr[lag, j, x])
                    rows.append({
                        "lag": lag + 1,
                        "response": response,
                        "driver": driver,
                        "coef": coef,
                        "stderr": se,
                        "t": coef / se if se > 0 else float("nan"),
                    })
        return pd.DataFrame(rows)

    def to_dict(self) -> dict[str, Any]:
        return {
            "variables": list(self.variables),
            "k": self.k,
            "p": self.p,
            "nobs": self.nobs,
            "dof_resid": self.dof_resid,
            "n_entities": self.n_entities,
            "sample_start": self.sample_start,
            "intercept": self.intercept.tolist(),
            "coeffs": self.coeffs.tolist(),
            "stderr": self.stderr.tolist(),
            "sigma": self.sigma.tolist(),
            "llf": self.llf,
            "aic": self.aic,
            "bic": self.bic,
            "spectral_radius": self.spectral_radius,
            "is_stable": self.is_stable,
        }


@dataclass(frozen=True)
class LagSelection:
    table: pd.DataFrame
    chosen_p: int
    bic_p: int

    def to_dict(self) -> dict[str, Any]:
        return {"chosen_p": self.chosen_p, "bic_p": self.bic_p, "table": self.table.to_dict(orient="records")}


# ------------------------------------------------------------------
# Estimation
# ------------------------------------------------------------------


def check_rank(x: np.ndarray, columns: tuple[str, ...]) -> None:
    """Raise NumericalError naming the columns QR pivoting finds dependent."""
    _, r, piv = linalg.qr(x, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = (diag[0] if diag.size else 0.0) * max(x.shape) * np.finfo(float).eps
    rank = int((diag > tol).sum())
    if rank < x.shape[1]:
        dropped = [columns[c] for c in piv[rank:]]
        raise NumericalError(f"Rank-deficient regressor matrix; collinear column(s): {dropped}")


def ols_fit(design: VarDesign) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(B, residuals, (X'X)⁻¹) for the stacked system; B is (1 + k·p, k)."""
    check_rank(design.x, design.columns)
    try:
        with np.errstate(over="raise", invalid="raise"):
            xtx_inv = linalg.inv(design.x.T @ design.x)
    except (linalg.LinAlgError, FloatingPointError) as e:
        raise NumericalError(f"X'X inversion failed for columns {list(design.columns)}: {e}") from e
    beta = xtx_inv @ (design.x.T @ design.y)
    resid = design.y - design.x @ beta
    return beta, resid, xtx_inv


def _gaussian_llf(resid: np.ndarray) -> float:
    nobs, k = resid.shape
    sign, logdet = np.linalg.slogdet(resid.T @ resid / nobs)
    if sign <= 0:
        raise NumericalError("Residual covariance is singular; log-likelihood undefined")
    return -0.5 * nobs * (k * math.log(2.0 * math.pi) + logdet + k)


def estimate_var(data: PanelDataset, p: int, sample_start: Optional[int] = None) -> VarModel:
    """
    Fit a panel VAR(p) by pooled OLS.

    Args:
        data: differenced, demeaned panel.
        p: lag order (≥ 1).
        sample_start: first usable year index; defaults to p. Passing a
            common value across p keeps information criteria comparable.
    """
    t0 = time.monotonic()
    design = build_design(data, p, sample_start)
    k = data.n_variables
    n_params = 1 + k * p
    dof = design.nobs - n_params
    if dof <= 0:
        raise NumericalError(f"Not enough observations ({design.nobs}) for {n_params} regressors per equation")

    beta, resid, xtx_inv = ols_fit(design)
    ssr = (resid ** 2).sum(axis=0)
    sigma = resid.T @ resid / dof
    sigma = (sigma + sigma.T) / 2.0
    se = np.sqrt(np.outer(np.diag(xtx_inv), np.diag(sigma)))   # (1 + k·p, k)

    llf = _gaussian_llf(resid)
    total_params = k * n_params
    model = VarModel(
        variables=data.variables,
        p=p,
        intercept=beta[0].copy(),
        coeffs=beta[1:].reshape(p, k, k).transpose(0, 2, 1).copy(),
        sigma=sigma,
        stderr=se[1:].reshape(p, k, k).transpose(0, 2, 1).copy(),
        intercept_stderr=se[0].copy(),
        ssr=ssr,
        nobs=design.nobs,
        dof_resid=dof,
        llf=llf,
        aic=-2.0 * llf + 2.0 * total_params,
        bic=-2.0 * llf + math.log(design.nobs) * total_params,
        n_entities=design.n_entities,
        sample_start=design.sample_start,
    )
    elapsed = (time.monotonic() - t0) * 1000
    if not model.is_stable:
        logger.debug(f"VAR({p}) companion spectral radius {model.spectral_radius:.3f} ≥ 1")
    logger.debug(
        f"VAR({p}) fitted: k={k}, nobs={design.nobs}, AIC={model.aic:.1f}, "
        f"BIC={model.bic:.1f} ({elapsed:.0f}ms)"
    )
    return model


def select_lag(data: PanelDataset, p_max: int) -> LagSelection:
    """
    Fit p = 1..p_max on one common sample (rows with p_max + 1 observed
    years) and pick argmin AIC (ties → smaller p).
    """
    if p_max < 1:
        raise ConfigError(f"p_max must be >= 1, got {p_max}")
    rows = []
    for p in range(1, p_max + 1):
        model = estimate_var(data, p, sample_start=p_max)
        rows.append({"p": p, "label": f"VAR({p})", "aic": model.aic, "bic": model.bic, "nobs": model.nobs})
    table = pd.DataFrame(rows)

    def _argmin(column: str) -> int:
        best = rows[0]
        for row in rows[1:]:
            if row[column] < best[column]:
                best = row
        return int(best["p"])

    selection = LagSelection(table=table, chosen_p=_argmin("aic"), bic_p=_argmin("bic"))
    logger.info(f"Lag selection: AIC → p={selection.chosen_p}, BIC → p={selection.bic_p}")
    return selection
