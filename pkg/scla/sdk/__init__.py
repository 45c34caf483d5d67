"""SCLA SDK - Core library for safety communication layer analysis.

The SDK can be used by:
- The scla CLI
- Test harnesses and notebooks that need the numbers directly

Example usage:
    from scla.sdk import crc, rer

    poly = crc.parse_polynomial("r=16, 0x1021")
    report = crc.properness_check(poly, 1, 64)

    params = rer.SafetyParameters(la=16, lt=16, r=16, w=1, v=3600, m=1)
    breakdown = rer.lambda_scl(params, rer.ResidualProbability.from_report(report))
    print(rer.sil_budget_check(breakdown, target_pfh=1e-7).verdict)
"""

from . import config
from . import crc
from . import rer
from . import protocol
from . import roaming
from . import sim

__all__ = ["config", "crc", "rer", "protocol", "roaming", "sim"]
