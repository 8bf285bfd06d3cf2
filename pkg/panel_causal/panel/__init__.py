# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Panel Core Module

Data model, CSV ingestion and cleaning for entity-by-year-by-variable panels.
"""

from panel_causal.panel.cleaning import clean_panel, missing_summary, split_by_group
from panel_causal.panel.dataset import IncomeGroup, PanelDataset
from panel_causal.panel.io import load_groups, load_panel, write_groups, write_panel

__all__ = [
    "IncomeGroup",
    "PanelDataset",
    "clean_panel",
    "load_groups",
    "load_panel",
    "missing_summary",
    "split_by_group",
    "write_groups",
    "write_panel",
]
