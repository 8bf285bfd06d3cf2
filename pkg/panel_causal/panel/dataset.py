# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Panel Dataset

Immutable entity × year × variable panel with an explicit presence mask.
Missing cells are never represented by a sentinel number: ``mask[i, t, k]``
is False and the stored value is 0.0 and must not be read.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from panel_causal.errors import DataError

logger = logging.getLogger(__name__)


class IncomeGroup(str, Enum):
    """World Bank income classification (closed enumeration)."""

    HIGH_INCOME = "HighIncome"
    UPPER_MIDDLE = "UpperMiddle"
    LOWER_MIDDLE = "LowerMiddle"
    LOW_INCOME = "LowIncome"

    @property
    def short(self) -> str:
        return _SHORT_NAMES[self]

    @classmethod
    def parse(cls, label: str) -> "IncomeGroup":
        """Accept canonical names, World Bank spellings and HIC/UMIC/LMIC/LIC."""
        key = "".join(ch for ch in str(label).lower() if ch.isalnum())
        try:
            return _ALIASES[key]
        except KeyError:
            raise DataError(f"Unknown income group label: '{label}'") from None


_SHORT_NAMES = {
    IncomeGroup.HIGH_INCOME: "HIC",
    IncomeGroup.UPPER_MIDDLE: "UMIC",
    IncomeGroup.LOWER_MIDDLE: "LMIC",
    IncomeGroup.LOW_INCOME: "LIC",
}

_ALIASES = {
    "highincome": IncomeGroup.HIGH_INCOME,
    "hic": IncomeGroup.HIGH_INCOME,
    "h": IncomeGroup.HIGH_INCOME,
    "uppermiddle": IncomeGroup.UPPER_MIDDLE,
    "uppermiddleincome": IncomeGroup.UPPER_MIDDLE,
    "umic": IncomeGroup.UPPER_MIDDLE,
    "um": IncomeGroup.UPPER_MIDDLE,
    "lowermiddle": IncomeGroup.LOWER_MIDDLE,
    "lowermiddleincome": IncomeGroup.LOWER_MIDDLE,
    "lmic": IncomeGroup.LOWER_MIDDLE,
    "lm": IncomeGroup.LOWER_MIDDLE,
    "lowincome": IncomeGroup.LOW_INCOME,
    "lic": IncomeGroup.LOW_INCOME,
    "l": IncomeGroup.LOW_INCOME,
}


@dataclass(frozen=True, eq=False)
class PanelDataset:
    """
    Entity-by-year-by-variable observations.

    Invariants:
        - years strictly increasing with unit step
        - values and mask shaped |entities| × |years| × |variables|
        - entity identifiers unique
        - groups (optional) map entities to at most one IncomeGroup

    The arrays are made read-only on construction; derive new panels with
    ``with_values`` or the selection helpers.
    """

    entities: tuple[str, ...]
    years: tuple[int, ...]
    variables: tuple[str, ...]
    values: np.ndarray
    mask: np.ndarray
    groups: Mapping[str, IncomeGroup] = field(default_factory=dict)
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        entities = tuple(str(e) for e in self.entities)
        years = tuple(int(y) for y in self.years)
        variables = tuple(str(v) for v in self.variables)
        values = np.array(self.values, dtype=float, copy=True)
        mask = np.array(self.mask, dtype=bool, copy=True)

        if len(set(entities)) != len(entities):
            dupes = sorted({e for e in entities if entities.count(e) > 1})
            raise DataError(f"Duplicate entity identifiers: {dupes[:5]}")
        if len(set(variables)) != len(variables):
            raise DataError("Duplicate variable names")
        if years and any(b - a != 1 for a, b in zip(years, years[1:])):
            raise DataError("Years must be strictly increasing with unit step")
        expected = (len(entities), len(years), len(variables))
        if values.shape != expected or mask.shape != expected:
            raise DataError(
                f"values/mask shape {values.shape}/{mask.shape} does not match "
                f"entities × years × variables = {expected}"
            )
        if np.any(~np.isfinite(values[mask])):
            raise DataError("Present cells must hold finite numbers")

        values[~mask] = 0.0
        values.setflags(write=False)
        mask.setflags(write=False)
        known = set(entities)
        groups = {str(e): IncomeGroup(g) for e, g in dict(self.groups).items() if str(e) in known}

        object.__setattr__(self, "entities", entities)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "metadata", dict(self.metadata))

    # ------------------------------------------------------------------
    # Shape
    # ------------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape  # type: ignore[return-value]

    @property
    def n_entities(self) -> int:
        return len(self.entities)

    @property
    def n_years(self) -> int:
        return len(self.years)

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_observations(self) -> int:
        """Entity-year count N × T (the sample-size table's Obs column)."""
        return self.n_entities * self.n_years

    @property
    def missing_count(self) -> int:
        return int((~self.mask).sum())

    @property
    def is_complete(self) -> bool:
        return bool(self.mask.all())

    def missing_fraction_by_entity(self) -> dict[str, float]:
        """Share of missing cells per entity over years × variables."""
        per_entity = (~self.mask).reshape(self.n_entities, -1).mean(axis=1) if self.mask.size else []
        return {e: float(f) for e, f in zip(self.entities, per_entity)}

    def variable_index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise DataError(f"Unknown variable '{name}' (have {list(self.variables)})") from None

    # ------------------------------------------------------------------
    # Derivation
    # ------------------------------------------------------------------

    def with_values(
        self,
        values: np.ndarray,
        mask: np.ndarray,
        *,
        entities: Optional[Sequence[str]] = None,
        years: Optional[Sequence[int]] = None,
        variables: Optional[Sequence[str]] = None,
        **metadata: Any,
    ) -> "PanelDataset":
        """New panel sharing labels (unless overridden) with merged metadata."""
        return replace(
            self,
            entities=tuple(entities) if entities is not None else self.entities,
            years=tuple(years) if years is not None else self.years,
            variables=tuple(variables) if variables is not None else self.variables,
            values=values,
            mask=mask,
            metadata={**self.metadata, **metadata},
        )

    def select_entities(self, entities: Iterable[str]) -> "PanelDataset":
        entities = list(entities)
        lookup = {e: i for i, e in enumerate(self.entities)}
        missing = [e for e in entities if e not in lookup]
        if missing:
            raise DataError(f"Unknown entities: {missing[:5]}")
        idx = [lookup[e] for e in entities]
        return self.with_values(self.values[idx], self.mask[idx], entities=entities)

    def select_variables(self, variables: Iterable[str]) -> "PanelDataset":
        variables = list(variables)
        idx = [self.variable_index(v) for v in variables]
        return self.with_values(self.values[:, :, idx], self.mask[:, :, idx], variables=variables)

    def select_years(self, start: Optional[int] = None, end: Optional[int] = None) -> "PanelDataset":
        """Keep years in the inclusive range [start, end]."""
        lo = self.years[0] if start is None else start
        hi = self.years[-1] if end is None else end
        idx = [t for t, y in enumerate(self.years) if lo <= y <= hi]
        if not idx:
            raise DataError(f"No years in [{lo}, {hi}]")
        return self.with_values(
            self.values[:, idx], self.mask[:, idx], years=[self.years[t] for t in idx]
        )

    def resample_entities(self, indices: Sequence[int]) -> "PanelDataset":
        """
        Panel built from entity draws (with replacement), keeping each
        entity's time series intact. Draw ``b`` is renamed ``<id>#<b>`` so
        identifiers stay unique.
        """
        idx = np.asarray(indices, dtype=int)
        entities = [f"{self.entities[i]}#{b}" for b, i in enumerate(idx)]
        groups = {f"{self.entities[i]}#{b}": self.groups[self.entities[i]]
                  for b, i in enumerate(idx) if self.entities[i] in self.groups}
        return replace(
            self,
            entities=tuple(entities),
            values=self.values[idx],
            mask=self.mask[idx],
            groups=groups,
        )

    def series(self, entity: str, variable: str) -> np.ndarray:
        """One entity's series for a variable, NaN where missing (for display/tests)."""
        i = self.entities.index(entity)
        k = self.variable_index(variable)
        return np.where(self.mask[i, :, k], self.values[i, :, k], np.nan)

    # ------------------------------------------------------------------
    # Comparison and export
    # ------------------------------------------------------------------

    def equals(self, other: "PanelDataset", atol: float = 0.0) -> bool:
        """Same labels, same mask, and present values equal within ``atol``."""
        if (self.entities, self.years, self.variables) != (other.entities, other.years, other.variables):
            return False
        if not np.array_equal(self.mask, other.mask):
            return False
        a, b = self.values[self.mask], other.values[other.mask]
        return bool(np.array_equal(a, b)) if atol == 0.0 else bool(np.allclose(a, b, rtol=0.0, atol=atol))

    def to_frame(self) -> pd.DataFrame:
        """Long layout: entity, year, variable, value (NaN where missing)."""
        n, t, k = self.shape
        frame = pd.DataFrame({
            "entity": np.repeat(self.entities, t * k),
            "year": np.tile(np.repeat(self.years, k), n),
            "variable": np.tile(self.variables, n * t),
            "value": np.where(self.mask, self.values, np.nan).reshape(-1),
        })
        return frame
