"""SIL budget rule: lambda_SCL must stay below a share (1 %) of the target PFH."""

import logging
import math
from dataclasses import dataclass
from decimal import Decimal
from typing import Any, Dict, Optional

from .rates import RerBreakdown
from ..exceptions import DomainError

logger = logging.getLogger(__name__)

DEFAULT_SHARE = 0.01


@dataclass(frozen=True)
class SilBudget:
    target_pfh: float
    share: float
    limit: float
    lambda_scl: float
    passed: bool
    margin: float
    sil: Optional[int] = None

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> Dict[str, Any]:
        infinite = math.isinf(self.margin)
        return {
            "schema": "scla/sil-budget/v1",
            "sil": self.sil,
            "target_pfh": self.target_pfh,
            "share": self.share,
            "limit": self.limit,
            "lambda_scl": self.lambda_scl,
            "verdict": self.verdict,
            "margin": None if infinite else self.margin,
            "margin_infinite": infinite,
        }


def scl_limit(target_pfh: float, share: float = DEFAULT_SHARE) -> float:
    """PFH x share, evaluated in decimal so 1e-7 x 0.01 gives exactly 1e-9."""
    if not isinstance(target_pfh, (int, float)) or math.isnan(target_pfh) or target_pfh <= 0:
        raise DomainError(f"Target PFH must be > 0, got {target_pfh}.")
    if not isinstance(share, (int, float)) or math.isnan(share) or not 0 < share <= 1:
        raise DomainError(f"Communication share must be in (0, 1], got {share}.")
    return float(Decimal(repr(float(target_pfh))) * Decimal(repr(float(share))))


def sil_budget_check(breakdown: RerBreakdown, target_pfh: float,
                     share: float = DEFAULT_SHARE, sil: Optional[int] = None) -> SilBudget:
    """Check lambda_SCL against target_pfh x share.

    margin = limit / lambda_SCL (infinite when lambda_SCL is 0).

    Raises:
        DomainError: target_pfh <= 0 or share outside (0, 1].
    """
    limit = scl_limit(target_pfh, share)
    value = breakdown.lambda_scl
    passed = value <= limit
    margin = math.inf if value == 0 else limit / value
    if passed:
        logger.debug(f"SIL budget pass: {value:.3e}/h <= {limit:.3e}/h (margin {margin:.3g})")
    else:
        logger.info(f"SIL budget fail: {value:.3e}/h > {limit:.3e}/h (margin {margin:.3g})")
    return SilBudget(float(target_pfh), float(share), limit, value, passed, margin, sil)
