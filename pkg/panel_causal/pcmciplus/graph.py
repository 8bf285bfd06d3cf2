# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Causal Graph

Directed temporal graph shared by the Granger network and PCMCI+.

Edges carry a lag τ ≥ 0, a strength (partial correlation), a p-value, a
kind (lagged / contemporaneous) and their provenance. Contemporaneous
links whose orientation could not be resolved are kept in ``conflicts``
rather than silently dropped.

Usage:
    graph = CausalGraph.from_pairs(["Edu", "Ineq"], [("Edu", "Ineq")])
    graph.density           # 0.5
    graph.to_dot()
"""

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Iterable, Optional, Sequence

import networkx as nx

from panel_causal.errors import DataError


class EdgeKind(str, Enum):
    LAGGED = "lagged"
    CONTEMPORANEOUS = "contemporaneous"


class Provenance(str, Enum):
    GRANGER = "granger"
    PCMCI = "pcmci"
    FIXTURE = "fixture"


@dataclass(frozen=True)
class CausalEdge:
    source: str
    target: str
    lag: int
    strength: float
    p_value: float
    kind: EdgeKind
    provenance: Provenance

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["kind"] = self.kind.value
        data["provenance"] = self.provenance.value
        return data


@dataclass(frozen=True)
class GraphConflict:
    """A contemporaneous adjacency left undirected."""

    a: str
    b: str
    reason: str
    strength: float = float("nan")
    p_value: float = float("nan")
    votes: tuple[int, int] = (0, 0)


@dataclass
class CausalGraph:
    nodes: tuple[str, ...]
    edges: list[CausalEdge] = field(default_factory=list)
    conflicts: list[GraphConflict] = field(default_factory=list)
    tau_max: Optional[int] = None
    alpha: Optional[float] = None
    method: str = ""

    def __post_init__(self):
        self.nodes = tuple(self.nodes)
        known = set(self.nodes)
        seen: set[tuple[str, str, int]] = set()
        for edge in self.edges:
            if edge.source not in known or edge.target not in known:
                raise DataError(f"Edge {edge.source}→{edge.target} references an unknown node")
            if edge.lag < 0:
                raise DataError(f"Edge {edge.source}→{edge.target} has negative lag {edge.lag}")
            expected = EdgeKind.CONTEMPORANEOUS if edge.lag == 0 else EdgeKind.LAGGED
            if edge.kind != expected:
                raise DataError(f"Edge {edge.source}→{edge.target} at lag {edge.lag} must be {expected.value}")
            if edge.lag == 0 and edge.source == edge.target:
                raise DataError(f"Contemporaneous self-edge on {edge.source}")
            key = (edge.source, edge.target, edge.lag)
            if key in seen:
                raise DataError(f"Duplicate edge {edge.source}→{edge.target} at lag {edge.lag}")
            seen.add(key)
        self.edges.sort(key=lambda e: (self.nodes.index(e.source), self.nodes.index(e.target), e.lag))

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    @property
    def link_pairs(self) -> list[tuple[str, str]]:
        """Distinct ordered (source, target) pairs, self-links excluded, lags collapsed."""
        pairs = dict.fromkeys((e.source, e.target) for e in self.edges if e.source != e.target)
        return list(pairs)

    @property
    def link_count(self) -> int:
        return len(self.link_pairs)

    @property
    def density(self) -> float:
        k = len(self.nodes)
        return self.link_count / (k * (k - 1)) if k > 1 else 0.0

    def edges_between(self, source: str, target: str) -> list[CausalEdge]:
        return [e for e in self.edges if e.source == source and e.target == target]

    def has_link(self, source: str, target: str) -> bool:
        return bool(self.edges_between(source, target))

    def strongest(self, source: str, target: str) -> Optional[CausalEdge]:
        candidates = self.edges_between(source, target)
        return max(candidates, key=lambda e: abs(e.strength)) if candidates else None

    # ------------------------------------------------------------------
    # Construction and export
    # ------------------------------------------------------------------

    @classmethod
    def from_pairs(
        cls,
        nodes: Sequence[str],
        pairs: Iterable[tuple[str, str]],
        provenance: Provenance = Provenance.FIXTURE,
        lag: int = 1,
    ) -> "CausalGraph":
        kind = EdgeKind.CONTEMPORANEOUS if lag == 0 else EdgeKind.LAGGED
        edges = [CausalEdge(s, t, lag, float("nan"), float("nan"), kind, provenance) for s, t in pairs]
        return cls(nodes=tuple(nodes), edges=edges, method=provenance.value)

    def to_networkx(self) -> nx.DiGraph:
        """Lag-collapsed DiGraph; edge attributes keep the lags and the strongest r."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for source, target in self.link_pairs:
            edges = self.edges_between(source, target)
            best = max(edges, key=lambda e: abs(e.strength) if e.strength == e.strength else 0.0)
            graph.add_edge(
                source,
                target,
                lags=[e.lag for e in edges],
                strength=best.strength,
                p_value=best.p_value,
            )
        return graph

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "tau_max": self.tau_max,
            "alpha": self.alpha,
            "nodes": list(self.nodes),
            "density": self.density,
            "link_count": self.link_count,
            "edges": [e.to_dict() for e in self.edges],
            "conflicts": [asdict(c) for c in self.conflicts],
        }

    def to_dot(self, name: str = "causal_graph") -> str:
        lines = [f"digraph {name} {{"]
        for node in self.nodes:
            lines.append(f'  "{node}";')
        for e in self.edges:
            style = "solid" if e.kind == EdgeKind.LAGGED else "bold"
            lines.append(
                f'  "{e.source}" -> "{e.target}" '
                f'[label="τ={e.lag} r={e.strength:.3f}", style={style}];'
            )
        for c in self.conflicts:
            lines.append(f'  "{c.a}" -> "{c.b}" [dir=none, style=dashed, label="{c.reason}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
