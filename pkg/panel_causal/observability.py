# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Observability Module

Stage timing and reproducibility manifests for CLI runs.

Every run emits a manifest sufficient to reproduce it exactly: the config
hash, the seed, package versions, and SHA-256 checksums of every input file.

Usage:
    manifest = RunManifest.start("discover", config)
    with StageTimer("estimate_var", manifest):
        model = estimate_var(panel, p)
    store.write_json("manifest.json", manifest.to_dict())
"""

import hashlib
import logging
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any, Optional, Union

logger = logging.getLogger(__name__)

_TRACKED_PACKAGES = ("panel-causal", "numpy", "scipy", "pandas", "statsmodels", "networkx", "pydantic")


def collect_versions() -> dict[str, str]:
    """Installed versions of the packages that shape numerical output."""
    versions = {}
    for name in _TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "not-installed"
    return versions


def file_checksum(path: Union[str, Path], chunk_size: int = 1 << 16) -> str:
    """SHA-256 of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Reproducibility record written next to every set of outputs."""

    command: str
    config_hash: str
    seed: int
    config: dict[str, Any]
    started_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    versions: dict[str, str] = field(default_factory=collect_versions)
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    stages: dict[str, float] = field(default_factory=dict)
    notes: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def start(cls, command: str, config: Any) -> "RunManifest":
        """Create a manifest from a RunConfig and checksum its input files."""
        manifest = cls(
            command=command,
            config_hash=config.config_hash(),
            seed=config.seed,
            config=config.model_dump(mode="json"),
        )
        for attr in ("input_path", "groups_path"):
            path = getattr(config, attr, None)
            if path is not None and Path(path).exists():
                manifest.inputs[str(path)] = file_checksum(path)
        return manifest

    def record_output(self, name: str) -> None:
        if name not in self.outputs:
            self.outputs.append(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "config": self.config,
            "started_at": self.started_at,
            "versions": self.versions,
            "inputs": self.inputs,
            "outputs": sorted(self.outputs),
            "stages_ms": self.stages,
            "notes": self.notes,
        }


class StageTimer:
    """
    Context manager that logs a pipeline stage with its elapsed time.

    Usage:
        with StageTimer("bootstrap_irf", manifest):
            irf = bootstrap_irf(...)
    """

    def __init__(self, name: str, manifest: Optional[RunManifest] = None):
        self.name = name
        self.manifest = manifest
        self.elapsed_ms = 0.0
        self._t0 = 0.0

    def __enter__(self) -> "StageTimer":
        logger.info(f"🔄 {self.name} starting...")
        self._t0 = time.monotonic()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> bool:
        self.elapsed_ms = (time.monotonic() - self._t0) * 1000
        if exc_type is None:
            logger.info(f"✅ {self.name} completed ({self.elapsed_ms:.0f}ms)")
        else:
            logger.error(f"❌ {self.name} failed after {self.elapsed_ms:.0f}ms: {exc_val}")
        if self.manifest is not None:
            self.manifest.stages[self.name] = round(self.elapsed_ms, 3)
        return False
