# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Impulse Responses and Variance Decomposition

Orthogonalized IRFs via the MA recursion

    Ψ₀ = I,  Ψ_h = Σ_{ℓ=1..min(h,p)} Φ_ℓ Ψ_{h−ℓ}
    Θ_h = Ψ_h · L

where L is the lower Cholesky factor of Σ taken in the given variable
ordering and mapped back to dataset order. ``responses[h, impulse,
response]`` is Θ_h[response, impulse]: the response to a one-standard-
deviation orthogonalized shock.
"""

import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg

from panel_causal.errors import ConfigError, NumericalError
from panel_causal.pvar.model import VarModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class IrfResult:
    variables: tuple[str, ...]
    ordering: tuple[str, ...]
    responses: np.ndarray                  # (H+1, k, k) [h, impulse, response]
    ci_lower: Optional[np.ndarray] = None
    ci_upper: Optional[np.ndarray] = None
    reps: int = 0
    failed_reps: int = 0
    bias_corrected: bool = False

    @property
    def horizon(self) -> int:
        return self.responses.shape[0] - 1

    @property
    def horizons(self) -> list[int]:
        return list(range(self.horizon + 1))

    @property
    def has_bands(self) -> bool:
        return self.ci_lower is not None and self.ci_upper is not None

    def path(self, impulse: str, response: str) -> np.ndarray:
        return self.responses[:, self.variables.index(impulse), self.variables.index(response)]

    def peak(self, impulse: str, response: str, skip_impact: bool = True) -> dict[str, Any]:
        """
        Largest-magnitude response over the horizon, with its band.

        Impact (h = 0) is skipped by default.
        """
        i, j = self.variables.index(impulse), self.variables.index(response)
        series = self.responses[:, i, j]
        first = 1 if skip_impact and self.horizon >= 1 else 0
        h = first + int(np.argmax(np.abs(series[first:])))
        lo = float(self.ci_lower[h, i, j]) if self.ci_lower is not None else float("nan")
        hi = float(self.ci_upper[h, i, j]) if self.ci_upper is not None else float("nan")
        return {
            "impulse": impulse,
            "response": response,
            "h": h,
            "peak": float(series[h]),
            "lower": lo,
            "upper": hi,
            "band_contains_zero": bool(lo <= 0.0 <= hi) if self.has_bands else None,
        }

    def to_long_frame(self) -> pd.DataFrame:
        """h, impulse, response, point, lo, hi."""
        rows = []
        for h in range(self.horizon + 1):
            for i, impulse in enumerate(self.variables):
                for j, response in enumerate(self.variables):
                    rows.append({
                        "h": h,
                        "impulse": impulse,
                        "response": response,
                        "point": float(self.responses[h, i, j]),
                        "lo": float(self.ci_lower[h, i, j]) if self.ci_lower is not None else float("nan"),
                        "hi": float(self.ci_upper[h, i, j]) if self.ci_upper is not None else float("nan"),
                    })
        return pd.DataFrame(rows)

    def to_dict(self) -> dict[str, Any]:
        return {
            "variables": list(self.variables),
            "ordering": list(self.ordering),
            "horizon": self.horizon,
            "reps": self.reps,
            "failed_reps": self.failed_reps,
            "bias_corrected": self.bias_corrected,
            "responses": self.responses.tolist(),
            "ci_lower": self.ci_lower.tolist() if self.ci_lower is not None else None,
            "ci_upper": self.ci_upper.tolist() if self.ci_upper is not None else None,
        }


@dataclass(frozen=True, eq=False)
class FevdResult:
    variables: tuple[str, ...]
    ordering: tuple[str, ...]
    shares: np.ndarray                     # (H+1, k, k) [h, variable, shock]

    def to_long_frame(self) -> pd.DataFrame:
        rows = []
        for h in range(self.shares.shape[0]):
            for j, variable in enumerate(self.variables):
                for s, shock in enumerate(self.variables):
                    rows.append({"h": h, "variable": variable, "shock": shock, "share": float(self.shares[h, j, s])})
        return pd.DataFrame(rows)

    def to_dict(self) -> dict[str, Any]:
        return {"variables": list(self.variables), "ordering": list(self.ordering), "shares": self.shares.tolist()}


# ------------------------------------------------------------------
# Computation
# ------------------------------------------------------------------


def resolve_ordering(variables: tuple[str, ...], ordering: Optional[Sequence[str]]) -> tuple[str, ...]:
    if ordering is None or len(ordering) == 0:
        return tuple(variables)
    ordering = tuple(ordering)
    if sorted(ordering) != sorted(variables):
        raise ConfigError(f"Cholesky ordering {list(ordering)} must be a permutation of {list(variables)}")
    return ordering


def cholesky_factor(model: VarModel, ordering: tuple[str, ...], ridge: float = 0.0) -> np.ndarray:
    """Lower Cholesky factor in ``ordering``, rows and columns mapped back to dataset order."""
    pos = [model.variables.index(v) for v in ordering]
    sigma = model.sigma[np.ix_(pos, pos)]
    if ridge > 0.0:
        sigma = sigma + ridge * np.eye(model.k)
    try:
        chol = linalg.cholesky(sigma, lower=True)
    except linalg.LinAlgError as e:
        raise NumericalError(
            "Residual covariance is not positive definite; set a small ridge "
            "(e.g. ridge = 1e-8) to regularize the Cholesky factorization"
        ) from e
    full = np.zeros_like(chol)
    full[np.ix_(pos, pos)] = chol
    return full


def ma_coefficients(model: VarModel, horizon: int) -> np.ndarray:
    """Ψ_0..Ψ_H, shape (H+1, k, k)."""
    k, p = model.k, model.p
    psi = np.zeros((horizon + 1, k, k))
    psi[0] = np.eye(k)
    for h in range(1, horizon + 1):
        for lag in range(1, min(h, p) + 1):
            psi[h] += model.coeffs[lag - 1] @ psi[h - lag]
    return psi


def orthogonalized_responses(
    model: VarModel, horizon: int, ordering: tuple[str, ...], ridge: float = 0.0
) -> np.ndarray:
    """Θ_h as (H+1, k, k) in [h, response, impulse] layout."""
    if horizon < 0:
        raise ConfigError(f"horizon must be >= 0, got {horizon}")
    chol = cholesky_factor(model, ordering, ridge)
    return ma_coefficients(model, horizon) @ chol


def impulse_response(
    model: VarModel,
    horizon: int = 10,
    ordering: Optional[Sequence[str]] = None,
    ridge: float = 0.0,
) -> IrfResult:
    """Point-estimate orthogonalized IRFs (no bands)."""
    order = resolve_ordering(model.variables, ordering)
    theta = orthogonalized_responses(model, horizon, order, ridge)
    logger.debug(f"IRF computed: horizon={horizon}, ordering={list(order)}")
    return IrfResult(
        variables=model.variables,
        ordering=order,
        responses=theta.transpose(0, 2, 1).copy(),
    )


def fevd(
    model: VarModel,
    horizon: int = 10,
    ordering: Optional[Sequence[str]] = None,
    ridge: float = 0.0,
) -> FevdResult:
    """shares[h, j, s] = Σ_{m≤h} Θ_m[j, s]² / Σ_s Σ_{m≤h} Θ_m[j, s]²."""
    order = resolve_ordering(model.variables, ordering)
    theta = orthogonalized_responses(model, horizon, order, ridge)
    cumulative = np.cumsum(theta ** 2, axis=0)
    totals = cumulative.sum(axis=2, keepdims=True)
    if np.any(totals <= 0.0):
        raise NumericalError("Forecast error variance is zero for some variable")
    return FevdResult(variables=model.variables, ordering=order, shares=cumulative / totals)
