# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Replicate Worker Pool

Runs independent, seeded tasks (bootstrap draws, Monte Carlo replications,
permutations, per-group pipelines) on a thread pool and merges the results
by task index, so output never depends on completion order or worker count.

Seeds:
    ``numpy.random.SeedSequence(seed).spawn(reps)`` yields one child seed per
    replicate; replicate ``b`` always receives child ``b``.

Failures:
    A task raising a PanelCausalError is logged, counted and skipped. Callers
    decide whether the failure budget was exceeded via ``ReplicateOutcome``.

Usage:
    pool = ReplicatePool(workers=4, label="bootstrap")
    outcome = pool.run(lambda b, rng: draw(rng), reps=200, seed=7)
    outcome.raise_if_failed(max_fraction=0.10)
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Generic, Iterable, Optional, Sequence, TypeVar, Union

import numpy as np

from panel_causal.errors import NumericalError, PanelCausalError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class ReplicateOutcome(Generic[T]):
    """Results of a replicate run, ordered by replicate index."""

    label: str
    requested: int
    results: list[Optional[T]]
    errors: dict[int, str] = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return len(self.errors)

    @property
    def succeeded(self) -> list[T]:
        """Successful results in replicate order."""
        return [r for r in self.results if r is not None]

    def raise_if_failed(self, max_fraction: float = 0.10) -> None:
        """Raise NumericalError when more than ``max_fraction`` of tasks failed."""
        if self.requested and self.failures / self.requested > max_fraction:
            sample = "; ".join(f"#{i}: {msg}" for i, msg in list(self.errors.items())[:3])
            raise NumericalError(
                f"{self.label}: {self.failures}/{self.requested} replicates failed "
                f"(limit {max_fraction:.0%}). First errors: {sample}"
            )


class ReplicatePool:
    """
    Deterministic fan-out over independent tasks.

    Lifecycle:
        pool = ReplicatePool(workers=2)
        outcome = pool.run(task, reps=100, seed=0)   # blocks until done
    """

    def __init__(self, workers: int = 1, label: str = "replicates"):
        self.workers = max(1, int(workers))
        self.label = label

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------

    def run(
        self,
        task: Callable[[int, np.random.Generator], T],
        reps: int,
        seed: Union[int, Sequence[int]],
    ) -> ReplicateOutcome[T]:
        """
        Run ``task(index, rng)`` for each replicate with its own child seed.

        ``seed`` may be a sequence of ints to give a stage its own stream
        under one root seed, e.g. ``(seed, 1)``.
        """
        children = np.random.SeedSequence(seed if isinstance(seed, int) else list(seed)).spawn(reps)
        t0 = time.monotonic()
        logger.info(f"🔄 [{self.label}] {reps} replicate(s) on {self.workers} worker(s)")

        def _one(index: int) -> tuple[int, Optional[T], Optional[str]]:
            rng = np.random.default_rng(children[index])
            try:
                return index, task(index, rng), None
            except PanelCausalError as e:
                logger.debug(f"[{self.label}] replicate {index} failed: {e}")
                return index, None, str(e)

        outcome: ReplicateOutcome[T] = ReplicateOutcome(self.label, reps, [None] * reps)
        for index, result, error in self._execute(_one, range(reps)):
            if error is not None:
                outcome.errors[index] = error
            else:
                outcome.results[index] = result

        elapsed = (time.monotonic() - t0) * 1000
        if outcome.failures:
            logger.warning(f"⚠️ [{self.label}] {outcome.failures}/{reps} replicate(s) failed")
        logger.info(f"✅ [{self.label}] completed in {elapsed:.0f}ms")
        return outcome

    def map(self, fn: Callable[[R], T], items: Sequence[R]) -> list[T]:
        """Apply ``fn`` to every item; results keep the input order."""
        return list(self._execute(fn, items))

    # ------------------------------------------------------------------
    # Execution
    # ------------------------------------------------------------------

    def _execute(self, fn: Callable[[R], T], items: Iterable[R]) -> list[T]:
        items = list(items)
        if self.workers == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix=self.label) as executor:
            # executor.map preserves input order regardless of completion order
            return list(executor.map(fn, items))
