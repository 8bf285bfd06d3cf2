# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Augmented Dickey-Fuller Test

ADF regression with a constant (no trend):

    Δx_t = c + γ x_{t-1} + Σ_{j=1..L} δ_j Δx_{t-j} + e_t

The statistic is the t-ratio on γ. Lag order starts at the Schwert bound
floor(12·(n/100)^0.25), capped by the sample, and is chosen downward by AIC
on a common sample. P-values and critical values come from MacKinnon's
response surfaces (statsmodels.tsa.adfvalues).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg
from statsmodels.tsa.adfvalues import mackinnoncrit, mackinnonp

from panel_causal.errors import DataError, NumericalError
from panel_causal.panel.dataset import PanelDataset
from panel_causal.preprocess.log import AdfSummary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdfResult:
    stat: float
    p_value: float
    lags_used: int
    nobs: int
    reject: bool
    critical_values: dict[str, float]

    @property
    def p(self) -> float:
        return self.p_value


def schwert_max_lag(n: int) -> int:
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def _design(x: np.ndarray, lags: int, start: int) -> tuple[np.ndarray, np.ndarray]:
    """Regressors [1, x_{t-1}, Δx_{t-1..t-lags}] and Δx_t for t ≥ start+1."""
    dx = np.diff(x)
    rows = range(start, len(dx))
    y = dx[start:]
    cols = [np.ones(len(y)), x[start: len(dx)]]
    for j in range(1, lags + 1):
        cols.append(np.array([dx[t - j] for t in rows]))
    return np.column_stack(cols), y


def _ols(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    beta, _, rank, _ = linalg.lstsq(X, y)
    if rank < X.shape[1]:
        raise NumericalError("ADF regression is rank deficient")
    resid = y - X @ beta
    return beta, resid, float(resid @ resid)


def adf_test(
    series: np.ndarray,
    max_lag: Optional[int] = None,
    regression: str = "c",
    alpha: float = 0.05,
    autolag: Optional[str] = "AIC",
) -> AdfResult:
    """
    ADF unit-root test with a constant.

    Args:
        series: gap-free real vector.
        max_lag: highest augmentation lag considered (Schwert rule if None).
        regression: only "c" (constant, no trend) is supported.
        alpha: level for the reject flag.
        autolag: "AIC" to select the lag downward from max_lag, None to use max_lag.
    """
    if regression != "c":
        raise DataError(f"Only regression='c' is supported, got '{regression}'")
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise DataError("ADF needs a one-dimensional series without missing values")
    n = len(x)
    if max_lag is None:
        max_lag = max(0, min(schwert_max_lag(n), n // 2 - 2))
    if max_lag < 0 or n <= max_lag + 3:
        raise DataError(f"Series of length {n} too short for max_lag={max_lag}")
    if np.ptp(x) == 0.0:
        raise NumericalError("zero variance")

    if autolag is not None:
        # common sample so criteria are comparable
        best_lag, best_ic = 0, np.inf
        for lag in range(max_lag, -1, -1):
            X, y = _design(x, lag, max_lag)
            if len(y) <= X.shape[1]:
                continue
            _, _, ssr = _ols(X, y)
            m = len(y)
            ic = m * math.log(max(ssr, 1e-300) / m) + 2 * X.shape[1]
            if ic <= best_ic:
                best_lag, best_ic = lag, ic
        used = best_lag
    else:
        used = max_lag

    X, y = _design(x, used, used)
    if len(y) <= X.shape[1]:
        raise DataError(f"Series of length {n} too short for {used} augmentation lag(s)")
    beta, resid, ssr = _ols(X, y)
    dof = len(y) - X.shape[1]
    if ssr <= 0.0:
        raise NumericalError("zero variance")
    sigma2 = ssr / dof
    cov = sigma2 * linalg.inv(X.T @ X)
    stat = float(beta[1] / math.sqrt(cov[1, 1]))
    p_value = float(mackinnonp(stat, regression="c", N=1))
    crit = mackinnoncrit(N=1, regression="c", nobs=len(y))
    return AdfResult(
        stat=stat,
        p_value=p_value,
        lags_used=used,
        nobs=len(y),
        reject=p_value < alpha,
        critical_values={"1%": float(crit[0]), "5%": float(crit[1]), "10%": float(crit[2])},
    )


def adf_panel(data: PanelDataset, alpha: float = 0.05, max_lag: Optional[int] = None) -> dict[str, AdfSummary]:
    """
    Run the ADF test on every entity series of every variable.

    Series with gaps, too few points or zero variance are skipped and
    counted. The per-variable decision is a majority vote of the series.
    """
    results: dict[str, AdfSummary] = {}
    for k, name in enumerate(data.variables):
        stats, pvals, lags, rejects = [], [], [], []
        skipped = 0
        for i in range(data.n_entities):
            observed = data.mask[i, :, k]
            if not observed.any():
                skipped += 1
                continue
            idx = np.flatnonzero(observed)
            segment = data.values[i, idx[0]: idx[-1] + 1, k]
            if not observed[idx[0]: idx[-1] + 1].all():
                skipped += 1
                continue
            try:
                res = adf_test(segment, max_lag=max_lag, alpha=alpha)
            except (DataError, NumericalError):
                skipped += 1
                continue
            stats.append(res.stat)
            pvals.append(res.p_value)
            lags.append(res.lags_used)
            rejects.append(res.reject)

        if not stats:
            logger.warning(f"⚠️ ADF: no testable series for {name}")
            results[name] = AdfSummary(name, float("nan"), float("nan"), 0, False, 0.0, 0, skipped)
            continue
        fraction = float(np.mean(rejects))
        results[name] = AdfSummary(
            variable=name,
            stat=float(np.median(stats)),
            p_value=float(np.median(pvals)),
            lags_used=int(np.median(lags)),
            reject=fraction >= 0.5,
            reject_fraction=fraction,
            series_tested=len(stats),
            series_skipped=skipped,
        )
        logger.info(
            f"ADF {name}: median stat {results[name].stat:.3f}, "
            f"{fraction:.0%} of {len(stats)} series reject at {alpha}"
        )
    return results
