# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""Stationarity pipeline: differencing, ADF testing and fixed-effects removal."""

from panel_causal.preprocess.adf import AdfResult, adf_panel, adf_test, schwert_max_lag
from panel_causal.preprocess.log import AdfSummary, SampleStage, TransformLog, TransformStep
from panel_causal.preprocess.transforms import first_difference, preprocess_panel, within_transform

__all__ = [
    "AdfResult",
    "AdfSummary",
    "SampleStage",
    "TransformLog",
    "TransformStep",
    "adf_panel",
    "adf_test",
    "first_difference",
    "preprocess_panel",
    "schwert_max_lag",
    "within_transform",
]
