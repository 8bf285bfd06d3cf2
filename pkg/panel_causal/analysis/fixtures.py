# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""Reference 8-goal Granger network used to check the role and tier rules."""

from panel_causal.pcmciplus.graph import CausalGraph, Provenance

SDG_NODES = ("Edu", "Growth", "Inst", "Ineq", "Climate", "Pov", "Health", "Energy")

SDG_LINKS = (
    ("Edu", "Ineq"),
    ("Edu", "Growth"),
    ("Edu", "Health"),
    ("Growth", "Pov"),
    ("Growth", "Climate"),
    ("Inst", "Growth"),
    ("Inst", "Pov"),
    ("Ineq", "Edu"),
    ("Climate", "Ineq"),
    ("Energy", "Inst"),
)

# goals with a confirmed direct (conditional-independence) effect
SDG_DIRECT = {"Edu": True, "Growth": True}


def sdg_reference_graph() -> CausalGraph:
    return CausalGraph.from_pairs(SDG_NODES, SDG_LINKS, provenance=Provenance.FIXTURE)
