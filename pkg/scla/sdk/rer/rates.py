"""Residual error rates of the safety communication layer.

    RR_A = 0
    RR_T = 2^-LT * w * R_T * RP_FSCP_T
    RR_M = 2^-LA * 2^-LT * w * 2^-r * RP_U * 2^-LR * R_M
    RR_I = RP_I * v * RP_FSCP_I
    lambda_SCL = (RR_T + RR_A + RR_M + RR_I) * m

Powers of two are applied with math.ldexp so they scale exactly.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .parameters import SafetyParameters, ResidualProbability
from ..exceptions import UnauditableInputError, SCLAError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComponentRate:
    """One residual error rate component (per hour) with its audit notes."""

    name: str
    value: float
    formula: str
    justification: str = ""
    warnings: tuple = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "formula": self.formula,
            "justification": self.justification,
            "warnings": list(self.warnings),
        }


def rr_authenticity(params: SafetyParameters) -> ComponentRate:
    """RR_A = 0: the A-code is sent explicitly and secured by the integrity measure."""
    warnings = []
    if params.la == 0:
        msg = ("LA = 0: no explicit A-code is configured, so the rationale for RR_A = 0 "
               "(explicit A-code secured by the integrity measures) may not hold.")
        logger.warning(msg)
        warnings.append(msg)
    return ComponentRate(
        name="RR_A",
        value=0.0,
        formula="RR_A = 0",
        justification=("Connection IDs are transmitted as an explicit A-code in every PDU and "
                       "covered by the CRC; the rate of misrouted messages does not exceed v."),
        warnings=tuple(warnings),
    )


def rr_timeliness(params: SafetyParameters) -> ComponentRate:
    """RR_T = 2^-LT * w * R_T * RP_FSCP_T (R_T defaults to v)."""
    r_t = params.effective_r_t
    value = math.ldexp(params.w * r_t * params.rp_fscp_t, -params.lt)
    justification = "R_T assumed in the worst case to v" if params.r_t is None else "R_T supplied"
    return ComponentRate("RR_T", value, "RR_T = 2^-LT * w * R_T * RP_FSCP_T", justification)


def rr_masquerade(params: SafetyParameters) -> ComponentRate:
    """RR_M = 2^-LA * 2^-LT * w * 2^-r * RP_U * 2^-LR * R_M."""
    exponent = params.la + params.lt + params.r + params.lr
    value = math.ldexp(params.w * params.rp_u * params.r_m, -exponent)
    return ComponentRate("RR_M", value, "RR_M = 2^-LA * 2^-LT * w * 2^-r * RP_U * 2^-LR * R_M")


def rr_integrity(rp_i: ResidualProbability, params: SafetyParameters) -> ComponentRate:
    """RR_I = RP_I * v * RP_FSCP_I.

    Raises:
        UnauditableInputError: rp_i is not a ResidualProbability with provenance.
    """
    if not isinstance(rp_i, ResidualProbability):
        raise UnauditableInputError(
            "RP_I must carry its provenance: pass a ResidualProbability built from a "
            "properness report (analytic) or asserted explicitly."
        )
    value = rp_i.value * params.v * params.rp_fscp_i
    return ComponentRate("RR_I", value, "RR_I = RP_I * v * RP_FSCP_I",
                         f"RP_I {rp_i.provenance}: {rp_i.source}")


@dataclass(frozen=True)
class RerBreakdown:
    """Residual error rate components and lambda_SCL, with a full input echo."""

    rr_a: ComponentRate
    rr_t: ComponentRate
    rr_m: ComponentRate
    rr_i: ComponentRate
    lambda_scl: float
    params: SafetyParameters
    rp_i: ResidualProbability

    @property
    def warnings(self) -> List[str]:
        return [w for c in (self.rr_a, self.rr_t, self.rr_m, self.rr_i) for w in c.warnings]

    def recompute(self) -> float:
        return (self.rr_t.value + self.rr_a.value + self.rr_m.value + self.rr_i.value) * self.params.m

    def verify(self) -> None:
        """Plausibility check: components and lambda_SCL follow from the inputs.

        Raises:
            SCLAError: on any mismatch.
        """
        expected = lambda_scl(self.params, self.rp_i)
        for name in ("rr_a", "rr_t", "rr_m", "rr_i"):
            if getattr(expected, name).value != getattr(self, name).value:
                raise SCLAError(f"Plausibility check failed: {name} does not follow from the inputs.")
        if self.recompute() != self.lambda_scl:
            raise SCLAError("Plausibility check failed: lambda_SCL does not match its components.")
        if any(c.value < 0 for c in (self.rr_a, self.rr_t, self.rr_m, self.rr_i)):
            raise SCLAError("Plausibility check failed: negative component.")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": "scla/rer-breakdown/v1",
            "unit": "per hour",
            "components": {
                "RR_A": self.rr_a.to_dict(),
                "RR_T": self.rr_t.to_dict(),
                "RR_M": self.rr_m.to_dict(),
                "RR_I": self.rr_i.to_dict(),
            },
            "lambda_scl": self.lambda_scl,
            "formula": "lambda_SCL = (RR_T + RR_A + RR_M + RR_I) * m",
            "inputs": self.params.to_dict(),
            "rp_i": self.rp_i.to_dict(),
            "warnings": self.warnings,
        }


def lambda_scl(params: SafetyParameters, rp_i: ResidualProbability) -> RerBreakdown:
    """Compute all four components and lambda_SCL = (RR_T + RR_A + RR_M + RR_I) * m."""
    rr_a = rr_authenticity(params)
    rr_t = rr_timeliness(params)
    rr_m = rr_masquerade(params)
    rr_i = rr_integrity(rp_i, params)
    total = (rr_t.value + rr_a.value + rr_m.value + rr_i.value) * params.m
    logger.debug(f"lambda_SCL = {total:.6e}/h (RR_T={rr_t.value:.3e}, RR_M={rr_m.value:.3e}, RR_I={rr_i.value:.3e})")
    return RerBreakdown(rr_a, rr_t, rr_m, rr_i, total, params, rp_i)
