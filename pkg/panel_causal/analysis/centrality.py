# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Network Centrality and Tiers

Degree counts on the lag-collapsed graph (self-links excluded), role
labels from explicit ordered rules, and the three-tier priority
classification.

Role rules (first match wins, defaults shown):
    Outcome   in > out
    Driver    out − in ≥ 2
    Mediator  in = out ≥ 2
    Enabler   out > in
    Neutral   otherwise

Tier rules:
    T1  out ≥ 2 and a direct effect confirmed
    T3  in ≥ out and out ≤ 1
    T2  otherwise
"""

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Mapping

import pandas as pd

from panel_causal.pcmciplus.graph import CausalGraph


class Role(str, Enum):
    DRIVER = "Driver"
    MEDIATOR = "Mediator"
    ENABLER = "Enabler"
    OUTCOME = "Outcome"
    NEUTRAL = "Neutral"


class Tier(str, Enum):
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"

    @property
    def description(self) -> str:
        return {"T1": "driver", "T2": "enabler", "T3": "outcome"}[self.value]


@dataclass(frozen=True)
class RoleRules:
    driver_margin: int = 2
    mediator_min: int = 2

    def classify(self, in_degree: int, out_degree: int) -> Role:
        if in_degree > out_degree:
            return Role.OUTCOME
        if out_degree - in_degree >= self.driver_margin:
            return Role.DRIVER
        if in_degree == out_degree >= self.mediator_min:
            return Role.MEDIATOR
        if out_degree > in_degree:
            return Role.ENABLER
        return Role.NEUTRAL


@dataclass(frozen=True)
class TierRules:
    driver_min_out: int = 2
    outcome_max_out: int = 1

    def classify(self, in_degree: int, out_degree: int, direct: bool) -> Tier:
        if out_degree >= self.driver_min_out and direct:
            return Tier.T1
        if in_degree >= out_degree and out_degree <= self.outcome_max_out:
            return Tier.T3
        return Tier.T2


@dataclass(frozen=True)
class NodeCentrality:
    node: str
    in_degree: int
    out_degree: int
    role: Role

    @property
    def total(self) -> int:
        return self.in_degree + self.out_degree


@dataclass(frozen=True)
class CentralityTable:
    rows: tuple[NodeCentrality, ...]
    edge_count: int

    def __getitem__(self, node: str) -> NodeCentrality:
        for row in self.rows:
            if row.node == node:
                return row
        raise KeyError(node)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([
            {"node": r.node, "in": r.in_degree, "out": r.out_degree, "total": r.total, "role": r.role.value}
            for r in self.rows
        ])


@dataclass(frozen=True)
class TierEntry:
    node: str
    tier: Tier
    rationale: str


@dataclass(frozen=True)
class TierAssignment:
    entries: tuple[TierEntry, ...]

    def tier_of(self, node: str) -> Tier:
        for entry in self.entries:
            if entry.node == node:
                return entry.tier
        raise KeyError(node)

    def members(self, tier: Tier) -> list[str]:
        return [e.node for e in self.entries if e.tier == tier]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([
            {"node": e.node, "tier": e.tier.value, "label": e.tier.description, "rationale": e.rationale}
            for e in self.entries
        ])

    def to_dict(self) -> dict[str, Any]:
        return {e.node: {**asdict(e), "tier": e.tier.value} for e in self.entries}


def centrality(graph: CausalGraph, rules: RoleRules = RoleRules()) -> CentralityTable:
    """In/out degree per node over distinct (source, target) links."""
    nx_graph = graph.to_networkx()
    rows = tuple(
        NodeCentrality(
            node=node,
            in_degree=int(nx_graph.in_degree(node)),
            out_degree=int(nx_graph.out_degree(node)),
            role=rules.classify(int(nx_graph.in_degree(node)), int(nx_graph.out_degree(node))),
        )
        for node in graph.nodes
    )
    return CentralityTable(rows=rows, edge_count=nx_graph.number_of_edges())


def direct_effects(graph: CausalGraph) -> dict[str, bool]:
    """Node → has at least one outgoing link to another node in ``graph``."""
    sources = {source for source, _ in graph.link_pairs}
    return {node: node in sources for node in graph.nodes}


def tier_classify(
    table: CentralityTable,
    directness: Mapping[str, bool],
    rules: TierRules = TierRules(),
) -> TierAssignment:
    entries = []
    for row in table.rows:
        direct = bool(directness.get(row.node, False))
        tier = rules.classify(row.in_degree, row.out_degree, direct)
        rationale = f"in={row.in_degree}, out={row.out_degree}, direct={'yes' if direct else 'no'}"
        entries.append(TierEntry(row.node, tier, rationale))
    return TierAssignment(entries=tuple(entries))
