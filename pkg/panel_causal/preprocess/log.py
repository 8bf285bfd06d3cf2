# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Transform Log

Audit trail for the stationarity pipeline: each step with its parameters
and observation accounting, the ADF decisions per variable, and the
sample-size table (stage, N, T, Obs).
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import pandas as pd

from panel_causal.errors import DataError
from panel_causal.panel.dataset import PanelDataset


@dataclass
class TransformStep:
    operation: str
    parameters: dict[str, Any]
    obs_in: int
    obs_out: int

    @property
    def rows_lost(self) -> int:
        return self.obs_in - self.obs_out


@dataclass
class SampleStage:
    stage: str
    n: int
    t: int
    obs: int
    note: str = ""
    after_step: int = 0     # steps recorded before this stage


@dataclass
class AdfSummary:
    """Per-variable ADF outcome aggregated over entity series."""

    variable: str
    stat: float
    p_value: float
    lags_used: int
    reject: bool
    reject_fraction: float
    series_tested: int
    series_skipped: int


@dataclass
class TransformLog:
    steps: list[TransformStep] = field(default_factory=list)
    stages: list[SampleStage] = field(default_factory=list)
    adf_results: dict[str, AdfSummary] = field(default_factory=dict)
    adf_settings: dict[str, Any] = field(default_factory=dict)

    def record_step(self, operation: str, before: PanelDataset, after: PanelDataset, **parameters: Any) -> None:
        self.steps.append(TransformStep(operation, parameters, before.n_observations, after.n_observations))

    def record_stage(self, stage: str, data: PanelDataset, note: str = "") -> None:
        self.stages.append(
            SampleStage(stage, data.n_entities, data.n_years, data.n_observations, note, len(self.steps))
        )

    def reconcile(self, initial_obs: Optional[int] = None) -> None:
        """
        Check that each step starts where the previous one ended (the first
        at ``initial_obs``, else the first stage recorded before any step)
        and that every stage matches the step it follows.
        """
        if initial_obs is None:
            opening = next((s for s in self.stages if s.after_step == 0), None)
            initial_obs = opening.obs if opening else (self.steps[0].obs_in if self.steps else 0)
        expected = initial_obs
        for step in self.steps:
            if step.obs_in != expected:
                raise DataError(
                    f"Observation accounting broken at '{step.operation}': "
                    f"expected {expected} in, recorded {step.obs_in}"
                )
            expected = step.obs_out
        for stage in self.stages:
            if stage.after_step > len(self.steps):
                raise DataError(f"Stage '{stage.stage}' refers to an unrecorded step")
            want = initial_obs if stage.after_step == 0 else self.steps[stage.after_step - 1].obs_out
            if stage.obs != want:
                raise DataError(
                    f"Observation accounting broken at stage '{stage.stage}': "
                    f"expected {want}, recorded {stage.obs}"
                )

    def stage_table(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"Stage": s.stage, "N": s.n, "T": s.t, "Obs": s.obs, "Notes": s.note} for s in self.stages]
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "steps": [{**asdict(s), "rows_lost": s.rows_lost} for s in self.steps],
            "stages": [asdict(s) for s in self.stages],
            "adf_settings": self.adf_settings,
            "adf_results": {k: asdict(v) for k, v in self.adf_results.items()},
        }
