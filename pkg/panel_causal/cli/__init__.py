# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""Command-line front end: preprocess, discover, validate, analyze and sweep subcommands."""

from panel_causal.cli.app import build_parser, main
from panel_causal.cli.commands import COMMANDS, run_command

__all__ = ["COMMANDS", "build_parser", "main", "run_command"]
