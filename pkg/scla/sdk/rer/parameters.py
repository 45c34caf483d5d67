"""Safety parameter sets and RP_I provenance.

Symbol names follow IEC 61784-3 nomenclature. Rates are per hour.
"""

import logging
import math
from dataclasses import dataclass, field, fields
from typing import Any, Dict, Optional

from ..exceptions import ParameterError, UnauditableInputError

logger = logging.getLogger(__name__)

DEFAULT_BEP = 1e-2
DEFAULT_R_M = 1e-3
SECONDS_PER_HOUR = 3600

# symbol -> (attribute, description)
SYMBOLS = {
    "LA": ("la", "A-code length in bits"),
    "LT": ("lt", "T-code length in bits"),
    "LR": ("lr", "redundant cross-check part in bits (0 if unused)"),
    "r": ("r", "CRC signature length in bits"),
    "w": ("w", "number of accepted T-codes"),
    "v": ("v", "message rate of the system per hour"),
    "m": ("m", "maximum number of logical connections"),
    "R_T": ("r_t", "rate of not actual messages per hour (worst case v)"),
    "R_M": ("r_m", "rate of masked messages per hour (default 1e-3 per device)"),
    "RP_U": ("rp_u", "probability that other marker fields are correct by chance"),
    "RP_FSCP_T": ("rp_fscp_t", "residual error probability of additional timeliness measures"),
    "RP_FSCP_I": ("rp_fscp_i", "residual error probability of additional integrity measures"),
    "BEP": ("bep", "bit error probability"),
}

MANDATORY_SYMBOLS = ("LA", "LT", "r", "w", "v", "m")

# Eq. (2) of the source writes RP_FCSP_T; accepted as an alias.
_ALIASES = {"RP_FCSP_T": "RP_FSCP_T", "RP_FCSP_I": "RP_FSCP_I"}


@dataclass(frozen=True)
class SafetyParameters:
    """All symbols of the residual error rate equations."""

    la: int
    lt: int
    r: int
    w: int
    v: float
    m: int
    lr: int = 0
    r_t: Optional[float] = None
    r_m: float = DEFAULT_R_M
    rp_u: float = 1.0
    rp_fscp_t: float = 1.0
    rp_fscp_i: float = 1.0
    bep: float = DEFAULT_BEP

    def __post_init__(self):
        problems = []
        for symbol in ("LA", "LT", "LR", "r"):
            value = getattr(self, SYMBOLS[symbol][0])
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                problems.append((symbol, f"{symbol} must be a bit length >= 0, got {value!r}"))
        for symbol in ("w", "m"):
            value = getattr(self, SYMBOLS[symbol][0])
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                problems.append((symbol, f"{symbol} must be an integer >= 1, got {value!r}"))
        for symbol in ("v", "R_T", "R_M"):
            value = getattr(self, SYMBOLS[symbol][0])
            if value is None and symbol == "R_T":
                continue
            if not _is_number(value) or value < 0:
                problems.append((symbol, f"{symbol} must be a rate >= 0, got {value!r}"))
        for symbol in ("RP_U", "RP_FSCP_T", "RP_FSCP_I"):
            value = getattr(self, SYMBOLS[symbol][0])
            if not _is_number(value) or not 0.0 <= value <= 1.0:
                problems.append((symbol, f"{symbol} must be a probability in [0, 1], got {value!r}"))
        if not _is_number(self.bep) or not 0.0 <= self.bep <= 0.5:
            problems.append(("BEP", f"BEP must be in [0, 0.5], got {self.bep!r}"))
        if problems:
            raise ParameterError("; ".join(p[1] for p in problems), [p[0] for p in problems])

    @property
    def effective_r_t(self) -> float:
        """R_T, or the worst case v when it was not given."""
        return self.v if self.r_t is None else self.r_t

    def to_dict(self) -> Dict[str, Any]:
        """Serialize with the standard symbol names (LA, LT, RP_U, ...) as keys."""
        data = {symbol: getattr(self, attr) for symbol, (attr, _) in SYMBOLS.items()}
        data["R_T_assumed_worst_case"] = self.r_t is None
        data["R_T"] = self.effective_r_t
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SafetyParameters":
        """Build from a mapping keyed by symbol name (case-sensitive)."""
        data = {_ALIASES.get(k, k): v for k, v in data.items()}
        missing = [s for s in MANDATORY_SYMBOLS if data.get(s) is None]
        if missing:
            raise ParameterError(f"Missing mandatory parameter(s): {', '.join(missing)}", missing)
        kwargs = {}
        for symbol, (attr, _) in SYMBOLS.items():
            if data.get(symbol) is None:
                continue
            value = data[symbol]
            if symbol in ("LA", "LT", "LR", "r", "w", "m"):
                value = _as_int(symbol, value)
            else:
                value = _as_float(symbol, value)
            kwargs[attr] = value
        if data.get("R_T_assumed_worst_case"):
            kwargs.pop("r_t", None)
        return cls(**kwargs)

    def replace(self, **changes) -> "SafetyParameters":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return SafetyParameters(**values)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and not math.isnan(value)


def _as_int(symbol: str, value) -> int:
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{symbol} must be an integer, got {value!r}", [symbol])
    if not number.is_integer():
        raise ParameterError(f"{symbol} must be an integer, got {value!r}", [symbol])
    return int(number)


def _as_float(symbol: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{symbol} must be a number, got {value!r}", [symbol])


ANALYTIC = "analytic"
ASSERTED = "asserted"


@dataclass(frozen=True)
class ResidualProbability:
    """RP_I together with where it came from.

    ``provenance`` is ``analytic`` (from a properness report) or ``asserted``
    (supplied by the user, e.g. the conservative limit 2^-r).
    """

    value: float
    provenance: str
    source: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in (ANALYTIC, ASSERTED):
            raise UnauditableInputError(
                f"RP_I provenance must be '{ANALYTIC}' or '{ASSERTED}', got {self.provenance!r}."
            )
        if not _is_number(self.value) or not 0.0 <= self.value <= 1.0:
            raise ParameterError(f"RP_I must be a probability in [0, 1], got {self.value!r}", ["RP_I"])

    @classmethod
    def from_report(cls, report) -> "ResidualProbability":
        """Worst case over the configured length range of a PropernessReport."""
        return cls(
            value=report.rp_i(),
            provenance=ANALYTIC,
            source={
                "polynomial": report.polynomial.to_text(),
                "n_min": report.n_min,
                "n_max": report.n_max,
                "bep": report.configured_bep,
                "proper": report.proper,
                "proper_at_configured_bep": report.proper_at_configured_bep,
            },
        )

    @classmethod
    def conservative_limit(cls, r: int) -> "ResidualProbability":
        """Assert RP_I = 2^-r for a CRC known to be proper."""
        return cls(value=math.ldexp(1.0, -r), provenance=ASSERTED,
                   source={"rule": "conservative limit 2^-r", "r": r})

    @classmethod
    def asserted(cls, value: float, reference: str = "") -> "ResidualProbability":
        return cls(value=float(value), provenance=ASSERTED, source={"reference": reference})

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "provenance": self.provenance, "source": dict(self.source)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ResidualProbability":
        if "provenance" not in data:
            raise UnauditableInputError("RP_I needs a provenance tag ('analytic' or 'asserted').")
        return cls(float(data["value"]), data["provenance"], dict(data.get("source") or {}))


def per_second_to_per_hour(rate: float) -> float:
    return rate * SECONDS_PER_HOUR
