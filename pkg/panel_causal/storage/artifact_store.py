# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Artifact Store Implementation

File-system storage for run outputs. CSV follows RFC 4180 (UTF-8, header
row, pandas quoting); JSON keeps full double precision, with non-finite
floats written as the strings "Infinity", "-Infinity" and "NaN" so every
document stays strict JSON.

Output directory configurable via PANEL_CAUSAL_OUTPUT_DIR, defaults to
``results/``.
"""

import json
import logging
import math
import time
from contextlib import contextmanager
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterator, Optional, Union

import numpy as np
import pandas as pd

from panel_causal.config import get_settings

logger = logging.getLogger(__name__)

# Cached instances keyed by resolved output directory
_instances: dict[Path, "ArtifactStore"] = {}


def get_store(output_dir: Optional[Union[str, Path]] = None) -> "ArtifactStore":
    """Get or create the ArtifactStore for an output directory."""
    root = Path(output_dir or get_settings().output_dir).resolve()
    if root not in _instances:
        _instances[root] = ArtifactStore(root)
    return _instances[root]


def to_jsonable(value: Any) -> Any:
    """Convert numpy/pandas/dataclass values into strict-JSON-safe Python objects."""
    if isinstance(value, float) or isinstance(value, np.floating):
        value = float(value)
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        return value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, pd.DataFrame):
        return [to_jsonable(row) for row in value.to_dict(orient="records")]
    if hasattr(value, "to_dict") and callable(value.to_dict):
        return to_jsonable(value.to_dict())
    if is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(to_jsonable(k)): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [to_jsonable(v) for v in value]
    return value


class ArtifactStore:
    """
    Output directory writer.

    Usage:
        store = get_store("results/run1")
        with store.transaction():
            store.write_csv("granger.csv", frame)
            store.write_json("graph.json", graph.to_dict())
    """

    def __init__(self, root: Union[str, Path], float_format: Optional[str] = None):
        self.root = Path(root)
        self.float_format = float_format or get_settings().float_format
        self._written: list[Path] = []

    # ------------------------------------------------------------------
    # Writers
    # ------------------------------------------------------------------

    def path(self, name: str) -> Path:
        return self.root / name

    def write_csv(self, name: str, frame: pd.DataFrame, index: bool = False) -> Path:
        """Write a DataFrame as UTF-8 CSV with full-precision floats."""
        t0 = time.monotonic()
        target = self._prepare(name)
        frame.to_csv(target, index=index, float_format=self.float_format, encoding="utf-8", lineterminator="\n")
        elapsed = (time.monotonic() - t0) * 1000
        logger.info(f"💾 wrote {target.name}: {len(frame)} row(s) ({elapsed:.0f}ms)")
        return target

    def write_json(self, name: str, payload: Any) -> Path:
        """Write strict JSON (non-finite floats encoded as strings)."""
        target = self._prepare(name)
        text = json.dumps(to_jsonable(payload), indent=2, allow_nan=False, ensure_ascii=False)
        target.write_text(text + "\n", encoding="utf-8")
        logger.info(f"💾 wrote {target.name}")
        return target

    def write_text(self, name: str, text: str) -> Path:
        target = self._prepare(name)
        target.write_text(text, encoding="utf-8")
        logger.info(f"💾 wrote {target.name}")
        return target

    @property
    def written(self) -> list[str]:
        """Names of files written by this store, in write order."""
        return [p.relative_to(self.root).as_posix() for p in self._written]

    # ------------------------------------------------------------------
    # Transactions
    # ------------------------------------------------------------------

    @contextmanager
    def transaction(self) -> Iterator["ArtifactStore"]:
        """
        Track the block's writes on a fresh list; remove them if the block
        raises (restoring the previous list), keep only them if it succeeds.
        """
        previous, self._written = self._written, []
        try:
            yield self
        except BaseException:
            self.rollback(0)
            self._written = previous
            raise

    def rollback(self, start: int = 0) -> None:
        """Delete files written since position ``start``."""
        doomed = self._written[start:]
        for target in doomed:
            try:
                target.unlink(missing_ok=True)
            except OSError as e:
                logger.warning(f"⚠️ Could not remove partial output {target}: {e}")
        del self._written[start:]
        if doomed:
            logger.warning(f"⚠️ Removed {len(doomed)} partial output(s) from {self.root}")

    def _prepare(self, name: str) -> Path:
        target = self.path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        if target not in self._written:
            self._written.append(target)
        return target
