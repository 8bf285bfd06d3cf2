# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Panel CSV I/O

Reads and writes PanelDataset as CSV (RFC 4180, UTF-8, header row).

Layouts:
    long (canonical):  entity,year,variable,value
    wide:              entity,year,<var1>,<var2>,...,<varK>

An empty cell is a missing observation. Non-empty cells that do not parse
as numbers also become missing and are counted in
``metadata["unparseable_cells"]``. Group maps are two-column CSVs
(entity,label).
"""

import logging
import time
from pathlib import Path
from typing import Literal, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from panel_causal.errors import DataError
from panel_causal.panel.dataset import IncomeGroup, PanelDataset

logger = logging.getLogger(__name__)

Layout = Literal["long", "wide"]

ENTITY_COLUMN = "entity"
YEAR_COLUMN = "year"
VARIABLE_COLUMN = "variable"
VALUE_COLUMN = "value"


def _read_csv(path: Path) -> pd.DataFrame:
    if not path.exists():
        raise DataError(f"Input file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DataError(f"Could not parse CSV {path}: {e}") from e
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame


def _require(frame: pd.DataFrame, columns: Sequence[str], path: Path) -> None:
    for column in columns:
        if column not in frame.columns:
            raise DataError(f"Missing mandatory column '{column}' in {path}")


def _parse_years(raw: pd.Series, path: Path) -> pd.Series:
    years = pd.to_numeric(raw.str.strip(), errors="coerce")
    bad = years.isna() | (years % 1 != 0)
    if bad.any():
        sample = raw[bad].iloc[0]
        raise DataError(f"Year column must parse as integer in {path} (got '{sample}')")
    return years.astype(int)


def _parse_numbers(raw: pd.Series) -> tuple[pd.Series, int, int]:
    """Numeric values plus (blank count, unparseable count); inf and nan text count as unparseable."""
    text = raw.str.strip()
    blank = text == ""
    numbers = pd.to_numeric(text.where(~blank), errors="coerce")
    unparseable = (numbers.isna() | ~np.isfinite(numbers)) & ~blank
    numbers = numbers.where(~unparseable)
    return numbers, int(blank.sum()), int(unparseable.sum())


def load_panel(
    path: Union[str, Path],
    layout: Layout = "long",
    *,
    variables: Optional[Sequence[str]] = None,
    group_column: Optional[str] = None,
    groups_path: Optional[Union[str, Path]] = None,
) -> PanelDataset:
    """
    Load a panel from CSV.

    Args:
        path: CSV file in the long or wide layout.
        layout: "long" (entity,year,variable,value) or "wide" (entity,year,var1..varK).
        variables: optional subset (and order) of variables to keep.
        group_column: optional column holding each entity's income group label.
        groups_path: optional two-column entity,label CSV.

    Returns:
        PanelDataset covering the full year range min..max; absent
        entity-years are missing.
    """
    path = Path(path)
    t0 = time.monotonic()
    frame = _read_csv(path)
    _require(frame, [ENTITY_COLUMN, YEAR_COLUMN], path)

    frame[ENTITY_COLUMN] = frame[ENTITY_COLUMN].str.strip()
    frame[YEAR_COLUMN] = _parse_years(frame[YEAR_COLUMN], path)

    groups: dict[str, IncomeGroup] = {}
    if group_column:
        _require(frame, [group_column], path)
        labelled = frame[[ENTITY_COLUMN, group_column]]
        labelled = labelled[labelled[group_column].str.strip() != ""].drop_duplicates()
        for entity, label in labelled.itertuples(index=False):
            group = IncomeGroup.parse(label)
            if groups.get(entity, group) != group:
                raise DataError(f"Entity '{entity}' carries more than one income group label")
            groups[entity] = group
        frame = frame.drop(columns=[group_column])

    if layout == "long":
        _require(frame, [VARIABLE_COLUMN, VALUE_COLUMN], path)
        frame[VARIABLE_COLUMN] = frame[VARIABLE_COLUMN].str.strip()
        keys = [ENTITY_COLUMN, YEAR_COLUMN, VARIABLE_COLUMN]
        dupes = frame.duplicated(subset=keys, keep=False)
        if dupes.any():
            first = frame.loc[dupes, keys].iloc[0].tolist()
            raise DataError(f"Duplicate (entity, year, variable) row {first} in {path}")
        numbers, blank, unparseable = _parse_numbers(frame[VALUE_COLUMN])
        frame = frame.assign(**{VALUE_COLUMN: numbers})
        var_names = list(dict.fromkeys(frame[VARIABLE_COLUMN]))
        wide = frame.pivot(index=[ENTITY_COLUMN, YEAR_COLUMN], columns=VARIABLE_COLUMN, values=VALUE_COLUMN)
    elif layout == "wide":
        dupes = frame.duplicated(subset=[ENTITY_COLUMN, YEAR_COLUMN], keep=False)
        if dupes.any():
            first = frame.loc[dupes, [ENTITY_COLUMN, YEAR_COLUMN]].iloc[0].tolist()
            raise DataError(f"Duplicate (entity, year) row {first} in {path}")
        var_names = [c for c in frame.columns if c not in (ENTITY_COLUMN, YEAR_COLUMN)]
        if not var_names:
            raise DataError(f"Wide layout needs at least one variable column in {path}")
        blank = unparseable = 0
        for column in var_names:
            numbers, b, u = _parse_numbers(frame[column])
            frame[column] = numbers
            blank += b
            unparseable += u
        wide = frame.set_index([ENTITY_COLUMN, YEAR_COLUMN])[var_names]
    else:
        raise DataError(f"Unknown CSV layout '{layout}' (expected 'long' or 'wide')")

    if variables is not None:
        unknown = [v for v in variables if v not in var_names]
        if unknown:
            raise DataError(f"Requested variables not found in {path}: {unknown}")
        var_names = list(variables)

    entities = list(dict.fromkeys(frame[ENTITY_COLUMN]))
    years = list(range(int(frame[YEAR_COLUMN].min()), int(frame[YEAR_COLUMN].max()) + 1))
    full_index = pd.MultiIndex.from_product([entities, years], names=[ENTITY_COLUMN, YEAR_COLUMN])
    cube = wide.reindex(index=full_index, columns=var_names).to_numpy(dtype=float)
    cube = cube.reshape(len(entities), len(years), len(var_names))
    mask = np.isfinite(cube)

    if groups_path is not None:
        groups.update(load_groups(groups_path))

    panel = PanelDataset(
        entities=tuple(entities),
        years=tuple(years),
        variables=tuple(var_names),
        values=np.where(mask, cube, 0.0),
        mask=mask,
        groups=groups,
        metadata={
            "source": str(path),
            "layout": layout,
            "blank_cells": blank,
            "unparseable_cells": unparseable,
        },
    )
    elapsed = (time.monotonic() - t0) * 1000
    if unparseable:
        logger.warning(f"⚠️ {unparseable} unparseable numeric cell(s) in {path} treated as missing")
    logger.info(
        f"📦 Loaded panel {path.name}: {panel.n_entities}×{panel.n_years}×{panel.n_variables}, "
        f"{panel.missing_count} missing ({elapsed:.0f}ms)"
    )
    return panel


def write_panel(data: PanelDataset, path: Union[str, Path], layout: Layout = "long") -> Path:
    """Write a panel as CSV; missing cells become empty cells."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = data.to_frame()
    if layout == "wide":
        frame = frame.pivot(index=[ENTITY_COLUMN, YEAR_COLUMN], columns=VARIABLE_COLUMN, values=VALUE_COLUMN)
        frame = frame.reindex(
            index=pd.MultiIndex.from_product([data.entities, data.years]),
            columns=list(data.variables),
        ).reset_index()
        frame.columns = [ENTITY_COLUMN, YEAR_COLUMN, *data.variables]
    elif layout != "long":
        raise DataError(f"Unknown CSV layout '{layout}'")
    frame.to_csv(path, index=False, float_format="%.17g", encoding="utf-8", lineterminator="\n")
    logger.info(f"💾 wrote panel {path.name} ({layout}, {len(frame)} rows)")
    return path


def load_groups(path: Union[str, Path]) -> dict[str, IncomeGroup]:
    """Read a two-column entity,label CSV."""
    path = Path(path)
    frame = _read_csv(path)
    if len(frame.columns) < 2:
        raise DataError(f"Group map {path} needs two columns (entity,label)")
    entity_col, label_col = frame.columns[:2]
    groups: dict[str, IncomeGroup] = {}
    for entity, label in frame[[entity_col, label_col]].itertuples(index=False):
        entity = entity.strip()
        if not entity or not label.strip():
            continue
        group = IncomeGroup.parse(label)
        if groups.get(entity, group) != group:
            raise DataError(f"Entity '{entity}' carries more than one income group label in {path}")
        groups[entity] = group
    logger.info(f"📦 Loaded {len(groups)} group label(s) from {path.name}")
    return groups


def write_groups(groups: Mapping[str, IncomeGroup], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        {"entity": list(groups), "label": [IncomeGroup(g).value for g in groups.values()]}
    )
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    return path
