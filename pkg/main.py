#!/usr/bin/env python3
# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Main Entry Point

Run one panel-causal subcommand.

Usage:
    python main.py discover --config run.cfg

    # Or with uv:
    uv run main.py validate --mc-reps 10
"""

import sys


def main() -> int:
    """Main entry point."""
    try:
        # Import here to ensure proper module loading
        from panel_causal.cli import main as cli_main
    except ImportError as e:
        print(f"❌ Import error: {e}")
        print("Please ensure all dependencies are installed:")
        print("  uv pip install -e .")
        return 1

    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
