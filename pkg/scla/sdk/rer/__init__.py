"""Residual error rate calculator (IEC 61784-3 calculus and the SIL budget rule)."""

from .parameters import (
    SafetyParameters,
    ResidualProbability,
    SYMBOLS,
    MANDATORY_SYMBOLS,
    DEFAULT_BEP,
    DEFAULT_R_M,
    ANALYTIC,
    ASSERTED,
    per_second_to_per_hour,
)
from .rates import (
    ComponentRate,
    RerBreakdown,
    rr_authenticity,
    rr_timeliness,
    rr_masquerade,
    rr_integrity,
    lambda_scl,
)
from .budget import SilBudget, DEFAULT_SHARE, scl_limit, sil_budget_check

__all__ = [
    "SafetyParameters",
    "ResidualProbability",
    "SYMBOLS",
    "MANDATORY_SYMBOLS",
    "DEFAULT_BEP",
    "DEFAULT_R_M",
    "ANALYTIC",
    "ASSERTED",
    "per_second_to_per_hour",
    "ComponentRate",
    "RerBreakdown",
    "rr_authenticity",
    "rr_timeliness",
    "rr_masquerade",
    "rr_integrity",
    "lambda_scl",
    "SilBudget",
    "DEFAULT_SHARE",
    "scl_limit",
    "sil_budget_check",
]
