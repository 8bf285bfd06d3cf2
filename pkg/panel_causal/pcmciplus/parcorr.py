# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Partial Correlation Test

r is the correlation of the OLS residuals of x and y on [1, Z]; the
p-value is two-sided from Student-t with n − |Z| − 2 degrees of freedom:

    t = r · sqrt((n − |Z| − 2) / (1 − r²))

With ``weighting="entity_variance"`` every row is weighted by the inverse
of its entity's sqrt(var(x)·var(y)) before residualizing (weighted least
squares). The default is equal weights.
"""

import logging
import math
from typing import Literal, Optional

import numpy as np
from scipy import stats

from panel_causal.errors import ConfigError, DataError, NumericalError
from panel_causal.pcmciplus.base import CiTestResult, CondIndTest

logger = logging.getLogger(__name__)

Weighting = Literal["none", "entity_variance"]

_DEGENERATE_TOL = 1e-14


def _residualize(v: np.ndarray, design: np.ndarray) -> np.ndarray:
    beta, _, _, _ = np.linalg.lstsq(design, v, rcond=None)
    return v - design @ beta


def _entity_weights(x: np.ndarray, y: np.ndarray, groups: np.ndarray) -> np.ndarray:
    weights = np.ones(len(x))
    for g in np.unique(groups):
        rows = groups == g
        scale = math.sqrt(float(np.var(x[rows])) * float(np.var(y[rows])))
        weights[rows] = 1.0 / scale if scale > 0 else 0.0
    if not np.any(weights > 0):
        raise NumericalError("degenerate after conditioning")
    return weights


def parcorr_test(
    x: np.ndarray,
    y: np.ndarray,
    z: Optional[np.ndarray] = None,
    weights: Optional[np.ndarray] = None,
) -> CiTestResult:
    """
    Partial correlation of x and y given z with its analytic p-value.

    Raises:
        DataError: lengths differ or n ≤ |Z| + 3.
        NumericalError: a residual vector has (numerically) zero variance.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if len(y) != n:
        raise DataError(f"x and y lengths differ ({n} vs {len(y)})")
    if z is not None and np.size(z) == 0:
        z = None
    if z is not None:
        z = np.asarray(z, dtype=float).reshape(n, -1)
    dim_z = 0 if z is None else z.shape[1]
    if n <= dim_z + 3:
        raise DataError(f"Sample size {n} too small for {dim_z} conditioning variable(s)")

    if weights is not None:
        root_w = np.sqrt(np.asarray(weights, dtype=float))
        design = root_w[:, None] * (np.ones((n, 1)) if z is None else np.column_stack([np.ones(n), z]))
        rx = _residualize(root_w * x, design)
        ry = _residualize(root_w * y, design)
    elif z is None:
        rx = x - x.mean()
        ry = y - y.mean()
    else:
        design = np.column_stack([np.ones(n), z])
        rx = _residualize(x, design)
        ry = _residualize(y, design)

    sx = float(rx @ rx)
    sy = float(ry @ ry)
    if sx <= _DEGENERATE_TOL * max(1.0, float(x @ x)) or sy <= _DEGENERATE_TOL * max(1.0, float(y @ y)):
        raise NumericalError("degenerate after conditioning")
    r = float(np.clip((rx @ ry) / math.sqrt(sx * sy), -1.0, 1.0))

    df = n - dim_z - 2
    if abs(r) >= 1.0:
        p_value = 0.0
    else:
        t = r * math.sqrt(df / (1.0 - r * r))
        p_value = float(2.0 * stats.t.sf(abs(t), df))
    return CiTestResult(statistic=r, p_value=p_value, sample_size=n)


class ParCorr(CondIndTest):
    """Linear partial correlation test (equal or entity-variance weights)."""

    def __init__(self, weighting: Weighting = "none"):
        if weighting not in ("none", "entity_variance"):
            raise ConfigError(f"Unknown ParCorr weighting '{weighting}'")
        self.weighting = weighting
        self.name = "ParCorr" if weighting == "none" else "ParCorr[entity_variance]"

    def run_test(
        self,
        x: np.ndarray,
        y: np.ndarray,
        z: Optional[np.ndarray] = None,
        groups: Optional[np.ndarray] = None,
    ) -> CiTestResult:
        weights = None
        if self.weighting == "entity_variance" and groups is not None:
            weights = _entity_weights(x, y, groups)
        return parcorr_test(x, y, z, weights)
