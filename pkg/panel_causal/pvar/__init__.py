# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""Panel VAR: pooled OLS estimation, lag selection, Granger tests, IRFs, FEVD and bootstrap bands."""

from panel_causal.pvar.bootstrap import bootstrap_irf
from panel_causal.pvar.design import VarDesign, build_design
from panel_causal.pvar.granger import (
    GrangerResult,
    granger_matrix,
    granger_network,
    granger_test,
    p_value_frame,
)
from panel_causal.pvar.irf import FevdResult, IrfResult, fevd, impulse_response
from panel_causal.pvar.model import LagSelection, VarModel, estimate_var, select_lag

__all__ = [
    "FevdResult",
    "GrangerResult",
    "IrfResult",
    "LagSelection",
    "VarDesign",
    "VarModel",
    "bootstrap_irf",
    "build_design",
    "estimate_var",
    "fevd",
    "granger_matrix",
    "granger_network",
    "granger_test",
    "impulse_response",
    "p_value_frame",
    "select_lag",
]
