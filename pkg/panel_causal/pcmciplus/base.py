# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Conditional Independence Test Base

Defines the abstract base class every CI test used by PCMCI+ inherits
from. A test receives the stacked lag windows and variable references
``(variable index, lag)`` with lag ≥ 0 meaning time t − lag.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from panel_causal.pcmciplus.data import StackedPanel

LagRef = tuple[int, int]


@dataclass(frozen=True)
class CiTestResult:
    statistic: float
    p_value: float
    sample_size: int
    conditioning_set: tuple[LagRef, ...] = field(default_factory=tuple)

    def significant(self, alpha: float) -> bool:
        return self.p_value <= alpha


class CondIndTest(ABC):
    """
    Abstract base class for conditional independence tests.

    Required Methods:
        - run_test(): test x ⊥ y | z on plain arrays

    ``test_links`` resolves lag references against a StackedPanel and
    forwards to ``run_test``.
    """

    name: str = "base"

    @abstractmethod
    def run_test(
        self,
        x: np.ndarray,
        y: np.ndarray,
        z: Optional[np.ndarray] = None,
        groups: Optional[np.ndarray] = None,
    ) -> CiTestResult:
        """
        Test independence of x and y given z.

        Args:
            x, y: length-n vectors.
            z: (n, m) conditioning matrix or None.
            groups: per-row entity index, for tests that weight by entity.
        """

    def test_links(
        self,
        data: StackedPanel,
        x: LagRef,
        y: LagRef,
        conditions: Sequence[LagRef] = (),
    ) -> CiTestResult:
        conditions = tuple(c for c in dict.fromkeys(conditions) if c != x and c != y)
        z = data.matrix(conditions) if conditions else None
        result = self.run_test(data.column(*x), data.column(*y), z, data.row_entity)
        return CiTestResult(result.statistic, result.p_value, result.sample_size, conditions)

    def describe(self) -> str:
        return self.name
