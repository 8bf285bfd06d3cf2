# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Command-Line Front End

Usage:
    panel-causal preprocess --config run.cfg
    panel-causal discover --input data/sdr_long.csv --p auto --threads 4
    panel-causal validate --config run.cfg --mc-reps 10
    panel-causal analyze --config run.cfg --tracked Edu>Ineq
    panel-causal sweep --config run.cfg --tau-max-sweep 2,3,4

Flags override keys from the config file. Exit codes:
    0 success, 1 usage/config, 2 data, 3 numerical failure.
"""

import argparse
import logging
import sys
from typing import Any, Optional, Sequence

import numpy as np

from panel_causal.cli.commands import COMMANDS, run_command
from panel_causal.config import get_settings, load_run_config
from panel_causal.errors import NumericalError, PanelCausalError

logger = logging.getLogger(__name__)

# flag dest → RunConfig key
_OVERRIDES = (
    "input_path", "groups_path", "layout", "variables", "group_column", "preprocessed",
    "max_missing_fraction", "min_group_size", "p", "p_max", "tau_max", "tau_max_sweep",
    "alpha", "alpha_pc", "horizon", "ordering", "ridge", "bootstrap_reps", "permutation_reps",
    "mc_reps", "mc_entities", "mc_variables", "mc_years", "mc_estimator", "split_year", "tracked_pairs",
    "seed", "threads", "output_dir",
)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Flat key = value config file")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

    data = common.add_argument_group("data")
    data.add_argument("--input", dest="input_path", help="Panel CSV")
    data.add_argument("--groups", dest="groups_path", help="entity,label income group CSV")
    data.add_argument("--layout", choices=("long", "wide"))
    data.add_argument("--variables", help="Comma-separated variable subset")
    data.add_argument("--group-column", dest="group_column")
    data.add_argument("--preprocessed", action="store_true", default=None,
                      help="Input is already differenced and demeaned")
    data.add_argument("--max-missing-fraction", dest="max_missing_fraction", type=float)
    data.add_argument("--min-group-size", dest="min_group_size", type=int)

    model = common.add_argument_group("model")
    model.add_argument("--p", help="Lag order or 'auto'")
    model.add_argument("--p-max", dest="p_max", type=int)
    model.add_argument("--tau-max", dest="tau_max", type=int)
    model.add_argument("--tau-max-sweep", dest="tau_max_sweep", help="Comma-separated τ_max values")
    model.add_argument("--alpha", type=float)
    model.add_argument("--alpha-pc", dest="alpha_pc", type=float)
    model.add_argument("--horizon", type=int)
    model.add_argument("--ordering", help="Comma-separated Cholesky ordering")
    model.add_argument("--ridge", type=float)
    model.add_argument("--split-year", dest="split_year", type=int)
    model.add_argument("--tracked", dest="tracked_pairs", action="append",
                       help="Source>Target pair to report (repeatable)")

    reps = common.add_argument_group("replication")
    reps.add_argument("--bootstrap-reps", dest="bootstrap_reps", type=int)
    reps.add_argument("--permutation-reps", dest="permutation_reps", type=int)
    reps.add_argument("--mc-reps", dest="mc_reps", type=int)
    reps.add_argument("--mc-entities", dest="mc_entities", type=int)
    reps.add_argument("--mc-variables", dest="mc_variables", type=int)
    reps.add_argument("--mc-years", dest="mc_years", type=int)
    reps.add_argument("--mc-estimator", dest="mc_estimator", choices=("entity", "pooled"),
                      help="Per-entity VAR(1) fits or one pooled fit")
    reps.add_argument("--seed", type=int)
    reps.add_argument("--threads", type=int, help="Worker threads for replicate loops")
    reps.add_argument("--output-dir", dest="output_dir")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="panel-causal",
        description="Panel VAR and PCMCI+ causal discovery for entity-by-year panels",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()
    for name, command in COMMANDS.items():
        summary = (command.__doc__ or name).strip().splitlines()[0]
        subparsers.add_parser(name, parents=[common], help=summary, description=summary)
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {key: getattr(args, key, None) for key in _OVERRIDES}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; the contract maps usage to 1
        return 0 if not e.code else 1

    settings = get_settings()
    settings.configure_logging(args.log_level)

    try:
        config = load_run_config(args.config, _overrides(args))
        unset = {
            key: getattr(settings, key)
            for key in ("threads", "output_dir")
            if key not in config.model_fields_set
        }
        if unset:
            config = config.model_copy(update=unset)
        run_command(args.command, config)
        return 0
    except PanelCausalError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code
    except (np.linalg.LinAlgError, FloatingPointError) as e:
        error = NumericalError(f"{type(e).__name__}: {e}")
        logger.error(f"❌ NumericalError: {error}")
        print(f"❌ {error}", file=sys.stderr)
        return error.exit_code
    except KeyboardInterrupt:
        logger.warning("⚠️ Interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
