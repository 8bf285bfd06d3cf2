# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""Conditional independence testing and PCMCI+ causal discovery on stacked panels."""

from panel_causal.pcmciplus.base import CiTestResult, CondIndTest
from panel_causal.pcmciplus.data import StackedPanel
from panel_causal.pcmciplus.graph import CausalEdge, CausalGraph, EdgeKind, GraphConflict, Provenance
from panel_causal.pcmciplus.mci import mci_graph
from panel_causal.pcmciplus.parcorr import ParCorr, parcorr_test
from panel_causal.pcmciplus.pc1 import ParentSet, pc1_parents
from panel_causal.pcmciplus.pcmci import run_pcmci_plus, tau_max_sweep

__all__ = [
    "CausalEdge",
    "CausalGraph",
    "CiTestResult",
    "CondIndTest",
    "EdgeKind",
    "GraphConflict",
    "ParCorr",
    "ParentSet",
    "Provenance",
    "StackedPanel",
    "mci_graph",
    "parcorr_test",
    "pc1_parents",
    "run_pcmci_plus",
    "tau_max_sweep",
]
