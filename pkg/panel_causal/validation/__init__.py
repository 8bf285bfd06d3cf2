# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""Monte Carlo validation, permutation falsification and robustness sweeps."""

from panel_causal.validation.dgp import (
    DgpSpec,
    draw_dgp_coefficients,
    simulate_dgp,
    simulate_var_panel,
    spectral_radius,
)
from panel_causal.validation.montecarlo import MonteCarloSummary, entity_var1_fits, monte_carlo_validate
from panel_causal.validation.permutation import (
    PermutationSummary,
    permutation_falsification,
    permute_panel,
    z_score,
)
from panel_causal.validation.report import ValidationReport
from panel_causal.validation.robustness import RobustnessSpec, default_robustness_specs, robustness_sweep

__all__ = [
    "DgpSpec",
    "MonteCarloSummary",
    "PermutationSummary",
    "RobustnessSpec",
    "ValidationReport",
    "default_robustness_specs",
    "draw_dgp_coefficients",
    "entity_var1_fits",
    "monte_carlo_validate",
    "permutation_falsification",
    "permute_panel",
    "robustness_sweep",
    "simulate_dgp",
    "simulate_var_panel",
    "spectral_radius",
    "z_score",
]
