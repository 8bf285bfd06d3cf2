# Copyright (c) Panel Causal Maintainers. All rights reserved.

"""
Error Types

Exception hierarchy shared by every module. Each class carries the CLI exit
code it maps to, so the front end can translate failures without guessing.

    0  success
    1  usage / configuration
    2  data (missing files, malformed CSV, empty panels)
    3  numerical failure (rank deficiency, non-PD covariance, failed replicates)
"""


class PanelCausalError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 1


class ConfigError(PanelCausalError, ValueError):
    """Invalid run configuration or parameter outside its documented range."""

    exit_code = 1


class DataError(PanelCausalError, ValueError):
    """Input data missing, malformed, or too small for the requested operation."""

    exit_code = 2


class NumericalError(PanelCausalError, ArithmeticError):
    """Estimation failed numerically (collinearity, non-PD sigma, degeneracy)."""

    exit_code = 3
