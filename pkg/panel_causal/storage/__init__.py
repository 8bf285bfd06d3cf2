# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Artifact Storage Module

Writes run outputs (CSV tables, JSON reports, text summaries) into an output
directory, with transactional cleanup of partial outputs on failure.
"""

from panel_causal.storage.artifact_store import (
    ArtifactStore,
    get_store,
    to_jsonable,
)

__all__ = ["ArtifactStore", "get_store", "to_jsonable"]
