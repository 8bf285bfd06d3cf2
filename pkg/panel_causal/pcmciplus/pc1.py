# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
PC1 Lagged Parent Selection

Condition-selection stage of PCMCI+. For one target the candidate pool is
every (variable, lag) with lag 1..τ_max. Pass q tests each candidate
conditional on the q strongest other candidates; candidates with
p > α_pc are removed at the end of the pass and survivors are re-sorted by
their smallest |r| seen so far. Passes run for q = 0, 1, 2, ... up to
``max_conds_dim``; the loop stops when the pool cannot supply q
conditions, or when a pass with q ≥ 1 removes nothing.
"""

import logging
from dataclasses import dataclass, field

from panel_causal.errors import ConfigError
from panel_causal.pcmciplus.base import CondIndTest, LagRef
from panel_causal.pcmciplus.data import StackedPanel

logger = logging.getLogger(__name__)

DEFAULT_MAX_CONDS_DIM = 10


@dataclass
class ParentSet:
    """Ordered lagged parents of one target with their weakest test values."""

    target: int
    parents: list[LagRef] = field(default_factory=list)
    val_min: dict[LagRef, float] = field(default_factory=dict)
    pval_max: dict[LagRef, float] = field(default_factory=dict)
    passes: int = 0


def pc1_parents(
    data: StackedPanel,
    target: int,
    test: CondIndTest,
    alpha_pc: float = 0.05,
    max_conds_dim: int = DEFAULT_MAX_CONDS_DIM,
) -> ParentSet:
    """Lagged parents of ``target`` sorted by decreasing dependence strength."""
    if not 0.0 <= alpha_pc <= 1.0:
        raise ConfigError(f"alpha_pc must lie in [0, 1], got {alpha_pc}")
    if max_conds_dim < 0:
        raise ConfigError(f"max_conds_dim must be >= 0, got {max_conds_dim}")

    parents: list[LagRef] = [
        (v, lag) for lag in range(1, data.tau_max + 1) for v in range(data.n_variables)
    ]
    result = ParentSet(target=target)
    y = (target, 0)

    for conds_dim in range(max_conds_dim + 1):
        if len(parents) - 1 < conds_dim:
            break
        nonsig: list[LagRef] = []
        for parent in parents:
            conditions = [c for c in parents if c != parent][:conds_dim]
            outcome = test.test_links(data, parent, y, conditions)
            strength = abs(outcome.statistic)
            result.val_min[parent] = min(result.val_min.get(parent, strength), strength)
            result.pval_max[parent] = max(result.pval_max.get(parent, 0.0), outcome.p_value)
            if outcome.p_value > alpha_pc:
                nonsig.append(parent)
        result.passes += 1

        for parent in nonsig:
            parents.remove(parent)
        parents.sort(key=lambda c: result.val_min[c], reverse=True)
        if conds_dim >= 1 and not nonsig:
            break

    result.parents = parents
    logger.debug(
        f"PC1 {data.variables[target]}: {len(parents)} parent(s) after {result.passes} pass(es): "
        + ", ".join(data.label(p) for p in parents)
    )
    return result
