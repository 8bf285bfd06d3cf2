# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Validation Report

Bundles the Monte Carlo, permutation and robustness results, serializes
them to JSON, and renders a plain-text summary laid out like the
estimator-validation and robustness tables.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

from panel_causal.validation.montecarlo import MonteCarloSummary
from panel_causal.validation.permutation import PermutationSummary


@dataclass
class ValidationReport:
    mc: Optional[MonteCarloSummary] = None
    permutation: Optional[PermutationSummary] = None
    robustness: list[dict[str, Any]] = field(default_factory=list)
    decisions: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "mc": self.mc.to_dict() if self.mc else None,
            "permutation": self.permutation.to_dict() if self.permutation else None,
            "robustness": self.robustness,
            "decisions": self.decisions,
        }

    def summary_text(self) -> str:
        lines: list[str] = []
        if self.mc:
            mc = self.mc
            lines += [
                "Estimator validation (Monte Carlo)",
                f"{'Metric':<24}{'Value':>12}{'Threshold':>16}",
                f"{'Mean Abs. Bias':<24}{mc.mean_abs_bias:>12.3f}{'<' + format(mc.bias_threshold, '.2f'):>16}",
                f"{'95% CI Coverage':<24}{mc.ci_coverage:>12.1%}"
                f"{f'{mc.coverage_band[0]:.0%}-{mc.coverage_band[1]:.0%}':>16}",
                f"{'Replications':<24}{mc.replications:>12d}{mc.requested:>16d}",
                "",
            ]
        if self.permutation:
            lines += ["Permutation falsification", f"  {self.permutation.describe()}", ""]
        if self.robustness:
            first_ok = next((row for row in self.robustness if row.get("status") == "ok"), {})
            tracked = [
                key for key in first_ok
                if ">" in key and not key.endswith("significant")
            ]
            header = f"{'Specification':<16}{'AIC':>12}{'BIC':>12}{'Links':>8}" + "".join(f"{t:>16}" for t in tracked)
            lines += ["Robustness", header]
            for row in self.robustness:
                if row.get("status") != "ok":
                    lines.append(f"{row['label']:<16}  failed: {row.get('error', '')}")
                    continue
                lines.append(
                    f"{row['label']:<16}{row['aic']:>12.1f}{row['bic']:>12.1f}{row['links']:>8d}"
                    + "".join(f"{row.get(t, float('nan')):>16.3f}" for t in tracked)
                )
        return "\n".join(lines) + "\n"
