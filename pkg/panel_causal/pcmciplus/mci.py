# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
MCI Skeleton and Contemporaneous Orientation

Second stage of PCMCI+:

1. Skeleton. Every lagged candidate X(t−τ) → Y(t), τ = 1..τ_max, and every
   contemporaneous pair X(t) — Y(t) is tested conditional on

       S ∪ parents(Y) ∪ parents(X) shifted by τ

   where S holds the |S| strongest contemporaneous neighbours of Y. |S|
   grows by one per level; all tests of a level read the same adjacency
   snapshot, so the result does not depend on evaluation order. Links with
   p > α are removed and their separating set kept.
2. Colliders. For each unshielded triple A → M — B the pair (A, B) is
   re-tested over all subsets of the contemporaneous neighbourhoods.
   M is a collider when it appears in fewer than half of the separating
   subsets, not one when it appears in more, and the triple is ambiguous
   at exactly half.
3. Meek rules R1–R3 propagate orientations to the remaining undirected
   contemporaneous links.

Contemporaneous links still undirected, ambiguous or oriented both ways
end up in ``CausalGraph.conflicts``.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence, Union

from panel_causal.errors import ConfigError
from panel_causal.pcmciplus.base import CiTestResult, CondIndTest, LagRef
from panel_causal.pcmciplus.data import StackedPanel
from panel_causal.pcmciplus.graph import (
    CausalEdge,
    CausalGraph,
    EdgeKind,
    GraphConflict,
    Provenance,
)
from panel_causal.workers import ReplicatePool

logger = logging.getLogger(__name__)

LinkKey = tuple[int, int, int]          # (source, lag, target)
Pair = frozenset
CONFLICT = "conflict"


@dataclass
class _State:
    tau_max: int
    k: int
    parents: dict[int, list[LagRef]]
    lagged: set[LinkKey] = field(default_factory=set)
    contemp: set[Pair] = field(default_factory=set)
    results: dict[tuple, tuple[int, CiTestResult]] = field(default_factory=dict)
    sepsets: dict[tuple, tuple[LagRef, ...]] = field(default_factory=dict)
    orient: dict[Pair, Union[tuple[int, int], str]] = field(default_factory=dict)
    ambiguous: dict[Pair, tuple[int, int]] = field(default_factory=dict)

    # --------------------------------------------------------------
    # Adjacency helpers
    # --------------------------------------------------------------

    def result_key(self, source: int, lag: int, target: int) -> tuple:
        return ("c", min(source, target), max(source, target)) if lag == 0 else ("l", source, lag, target)

    def strength(self, key: tuple) -> float:
        entry = self.results.get(key)
        return abs(entry[1].statistic) if entry else 0.0

    def neighbours(self, node: int) -> list[int]:
        """Contemporaneous neighbours sorted by decreasing |r|, ties by index."""
        found = [other for other in range(self.k) if other != node and Pair((node, other)) in self.contemp]
        return sorted(found, key=lambda o: (-self.strength(self.result_key(o, 0, node)), o))

    def adjacent(self, ref: LagRef, target: int) -> bool:
        source, lag = ref
        if lag == 0:
            return source != target and Pair((source, target)) in self.contemp
        return (source, lag, target) in self.lagged

    def conditions(self, source: int, lag: int, target: int, extra: Sequence[LagRef]) -> list[LagRef]:
        shifted = [(v, l + lag) for v, l in self.parents[source] if l + lag <= self.tau_max]
        return list(dict.fromkeys([*extra, *self.parents[target], *shifted]))

    def record(self, key: tuple, level: int, result: CiTestResult) -> None:
        previous = self.results.get(key)
        if previous is None or previous[0] < level or result.p_value > previous[1].p_value:
            self.results[key] = (level, result)

    def directed_into(self, node: int) -> list[LagRef]:
        refs: list[LagRef] = [(s, lag) for (s, lag, t) in sorted(self.lagged) if t == node]
        for pair, value in sorted(self.orient.items(), key=lambda kv: sorted(kv[0])):
            if value != CONFLICT and value[1] == node:  # type: ignore[index]
                refs.append((value[0], 0))  # type: ignore[index]
        return refs

    def undirected(self) -> list[Pair]:
        return sorted((p for p in self.contemp if p not in self.orient), key=sorted)

    def is_oriented(self, a: int, b: int) -> bool:
        return self.orient.get(Pair((a, b))) == (a, b)

    def set_orientation(self, a: int, b: int) -> None:
        pair = Pair((a, b))
        current = self.orient.get(pair)
        if current is None:
            self.orient[pair] = (a, b)
        elif current != (a, b):
            self.orient[pair] = CONFLICT


# ------------------------------------------------------------------
# Skeleton
# ------------------------------------------------------------------


def _skeleton(
    data: StackedPanel,
    state: _State,
    test: CondIndTest,
    alpha: float,
    max_conds_dim: int,
    pool: ReplicatePool,
) -> None:
    level = 0
    while level <= max_conds_dim:
        snapshot = {j: state.neighbours(j) for j in range(state.k)}
        jobs: list[tuple[int, int, int, list[LagRef]]] = []
        for j in range(state.k):
            candidates = [(s, lag) for (s, lag, t) in sorted(state.lagged) if t == j]
            candidates += [(i, 0) for i in snapshot[j]]
            for i, lag in candidates:
                available = [n for n in snapshot[j] if not (lag == 0 and n == i)]
                if len(available) < level:
                    continue
                jobs.append((i, lag, j, [(n, 0) for n in available[:level]]))
        if not jobs:
            break

        def _run(job: tuple[int, int, int, list[LagRef]]) -> CiTestResult:
            i, lag, j, extra = job
            return test.test_links(data, (i, lag), (j, 0), state.conditions(i, lag, j, extra))

        outcomes = pool.map(_run, jobs)
        removed = 0
        for (i, lag, j, extra), outcome in zip(jobs, outcomes):
            key = state.result_key(i, lag, j)
            state.record(key, level, outcome)
            if outcome.p_value > alpha:
                state.sepsets.setdefault(key, tuple(extra))
                if lag == 0:
                    if Pair((i, j)) in state.contemp:
                        state.contemp.discard(Pair((i, j)))
                        removed += 1
                elif (i, lag, j) in state.lagged:
                    state.lagged.discard((i, lag, j))
                    removed += 1
        logger.debug(f"MCI level {level}: {len(jobs)} test(s), {removed} link(s) removed")
        level += 1


# ------------------------------------------------------------------
# Orientation
# ------------------------------------------------------------------


def _separating_votes(
    data: StackedPanel,
    state: _State,
    test: CondIndTest,
    alpha: float,
    source: LagRef,
    target: int,
    middle: int,
    max_conds_dim: int,
) -> tuple[int, int]:
    """(separating subsets containing ``middle``, separating subsets)."""
    i, lag = source
    pools = [[n for n in state.neighbours(target) if not (lag == 0 and n == i)]]
    if lag == 0:
        pools.append([n for n in state.neighbours(i) if n != target])

    subsets: dict[tuple[int, ...], None] = {}
    for neighbourhood in pools:
        for size in range(min(len(neighbourhood), max_conds_dim) + 1):
            for subset in combinations(neighbourhood, size):
                subsets.setdefault(tuple(sorted(subset)), None)

    with_middle = separating = 0
    for subset in subsets:
        extra = [(n, 0) for n in subset]
        outcome = test.test_links(data, source, (target, 0), state.conditions(i, lag, target, extra))
        if outcome.p_value > alpha:
            separating += 1
            with_middle += int(middle in subset)
    if separating == 0:
        sepset = state.sepsets.get(state.result_key(i, lag, target), ())
        return (1, 1) if (middle, 0) in sepset else (0, 1)
    return with_middle, separating


def _orient_colliders(
    data: StackedPanel, state: _State, test: CondIndTest, alpha: float, max_conds_dim: int
) -> None:
    colliders: list[tuple[LagRef, int, int]] = []
    for middle in range(state.k):
        neighbours = state.neighbours(middle)
        sources: list[LagRef] = [(s, lag) for (s, lag, t) in sorted(state.lagged) if t == middle]
        sources += [(n, 0) for n in neighbours]
        for target in neighbours:
            for source in sources:
                i, lag = source
                if lag == 0 and (i == target or i > target):
                    continue
                if state.adjacent(source, target):
                    continue
                with_middle, separating = _separating_votes(
                    data, state, test, alpha, source, target, middle, max_conds_dim
                )
                share = with_middle / separating
                if share < 0.5:
                    colliders.append((source, middle, target))
                elif share == 0.5:
                    state.ambiguous[Pair((middle, target))] = (with_middle, separating)
                    if lag == 0:
                        state.ambiguous[Pair((i, middle))] = (with_middle, separating)

    for (i, lag), middle, target in colliders:
        if lag == 0:
            state.set_orientation(i, middle)
        state.set_orientation(target, middle)
    if colliders:
        logger.debug(f"Oriented {len(colliders)} collider(s)")


def _meek(state: _State) -> None:
    while True:
        proposals: dict[Pair, set[tuple[int, int]]] = {}
        for pair in state.undirected():
            if pair in state.ambiguous:
                continue
            a, b = sorted(pair)
            for x, y in ((a, b), (b, a)):
                # R1: z → x — y with z, y non-adjacent
                r1 = any(ref != (y, 0) and not state.adjacent(ref, y) for ref in state.directed_into(x))
                # R2: x → w → y
                r2 = any(
                    state.is_oriented(x, w) and state.is_oriented(w, y)
                    for w in range(state.k) if w not in (x, y)
                )
                # R3: x — c → y and x — d → y with c, d non-adjacent
                spokes = [
                    c for c in range(state.k)
                    if c not in (x, y) and Pair((x, c)) in state.contemp
                    and Pair((x, c)) not in state.orient and state.is_oriented(c, y)
                ]
                r3 = any(
                    Pair((c, d)) not in state.contemp for c, d in combinations(spokes, 2)
                )
                if r1 or r2 or r3:
                    proposals.setdefault(pair, set()).add((x, y))
        if not proposals:
            return
        for pair, directions in proposals.items():
            if len(directions) > 1:
                state.orient[pair] = CONFLICT
            else:
                state.set_orientation(*next(iter(directions)))


# ------------------------------------------------------------------
# Entry point
# ------------------------------------------------------------------


def mci_graph(
    data: StackedPanel,
    parents: dict[int, list[LagRef]],
    test: CondIndTest,
    alpha: float = 0.05,
    max_conds_dim: int = 10,
    workers: int = 1,
    pool: Optional[ReplicatePool] = None,
) -> CausalGraph:
    """
    MCI skeleton plus contemporaneous orientation.

    Args:
        data: stacked lag windows (same as used for ``parents``).
        parents: PC1 parents per target variable index.
        test: conditional independence test.
        alpha: significance level for retaining links.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")
    k, tau_max = data.n_variables, data.tau_max
    state = _State(tau_max=tau_max, k=k, parents={j: list(parents.get(j, [])) for j in range(k)})
    state.lagged = {(i, lag, j) for i in range(k) for lag in range(1, tau_max + 1) for j in range(k)}
    state.contemp = {Pair((i, j)) for i, j in combinations(range(k), 2)}
    pool = pool or ReplicatePool(workers=workers, label="mci")

    _skeleton(data, state, test, alpha, max_conds_dim, pool)
    _orient_colliders(data, state, test, alpha, max_conds_dim)
    _meek(state)

    names = data.variables
    edges: list[CausalEdge] = []
    for i, lag, j in sorted(state.lagged):
        outcome = state.results[state.result_key(i, lag, j)][1]
        edges.append(CausalEdge(
            names[i], names[j], lag, outcome.statistic, outcome.p_value, EdgeKind.LAGGED, Provenance.PCMCI
        ))

    conflicts: list[GraphConflict] = []
    for pair in sorted(state.contemp, key=sorted):
        a, b = sorted(pair)
        outcome = state.results[state.result_key(a, 0, b)][1]
        value = state.orient.get(pair)
        if isinstance(value, tuple):
            edges.append(CausalEdge(
                names[value[0]], names[value[1]], 0, outcome.statistic, outcome.p_value,
                EdgeKind.CONTEMPORANEOUS, Provenance.PCMCI,
            ))
            continue
        if value == CONFLICT:
            reason, votes = "conflicting-orientation", (0, 0)
        elif pair in state.ambiguous:
            reason, votes = "ambiguous-collider", state.ambiguous[pair]
        else:
            reason, votes = "unoriented", (0, 0)
        conflicts.append(GraphConflict(names[a], names[b], reason, outcome.statistic, outcome.p_value, votes))

    graph = CausalGraph(
        nodes=names, edges=edges, conflicts=conflicts, tau_max=tau_max, alpha=alpha, method="pcmci+"
    )
    for edge in graph.edges:
        logger.info(
            f"  {edge.source} → {edge.target} (τ={edge.lag}, r={edge.strength:+.3f}, p={edge.p_value:.4f})"
        )
    for conflict in graph.conflicts:
        logger.info(f"  {conflict.a} — {conflict.b} unresolved ({conflict.reason})")
    return graph
