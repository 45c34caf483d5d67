"""Confidence intervals and summaries for simulation counts.

Intervals are two-sided at ``confidence``. Above ``NORMAL_MIN_EVENTS``
events the normal approximation is used, below it the exact
Clopper-Pearson interval; zero events give the one-sided rule-of-three
bound 3/n.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy import stats

from ..exceptions import DomainError

logger = logging.getLogger(__name__)

NORMAL_MIN_EVENTS = 30
CI_METHODS = ("auto", "normal", "exact")


@dataclass(frozen=True)
class ProportionEstimate:
    events: int
    trials: int
    value: float
    lower: float
    upper: float
    method: str
    confidence: float

    def scaled(self, factor: float) -> "ProportionEstimate":
        return ProportionEstimate(self.events, self.trials, self.value * factor,
                                  self.lower * factor, self.upper * factor, self.method, self.confidence)

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> Dict[str, Any]:
        return {
            "events": self.events,
            "trials": self.trials,
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "method": self.method,
            "confidence": self.confidence,
        }


def proportion_interval(events: int, trials: int, confidence: float = 0.95,
                        method: str = "auto") -> ProportionEstimate:
    """Point estimate and interval for ``events`` successes in ``trials``."""
    if method not in CI_METHODS:
        raise DomainError(f"CI method must be one of {CI_METHODS}, got {method!r}.")
    if not 0 < confidence < 1:
        raise DomainError(f"Confidence must be in (0, 1), got {confidence}.")
    if trials <= 0:
        return ProportionEstimate(events, trials, 0.0, 0.0, 1.0, "none", confidence)
    if not 0 <= events <= trials:
        raise DomainError(f"Need 0 <= events <= trials, got {events}/{trials}.")
    p = events / trials
    if events == 0:
        return ProportionEstimate(0, trials, 0.0, 0.0, min(1.0, 3.0 / trials), "rule_of_three", confidence)
    alpha = 1.0 - confidence
    if method == "normal" or (method == "auto" and events > NORMAL_MIN_EVENTS):
        z = stats.norm.ppf(1.0 - alpha / 2.0)
        half = z * math.sqrt(p * (1.0 - p) / trials)
        return ProportionEstimate(events, trials, p, max(0.0, p - half), min(1.0, p + half), "normal", confidence)
    lower = float(stats.beta.ppf(alpha / 2.0, events, trials - events + 1))
    upper = 1.0 if events == trials else float(stats.beta.ppf(1.0 - alpha / 2.0, events + 1, trials - events))
    return ProportionEstimate(events, trials, p, lower, upper, "exact", confidence)


def rate_interval(events: int, trials: int, hours: float, confidence: float = 0.95,
                  method: str = "auto") -> ProportionEstimate:
    """Rate per hour: the per-frame proportion scaled by frames per hour.

    With zero events this reduces to the rule of three, 3 / hours.
    """
    if hours <= 0:
        raise DomainError(f"Exposure must be > 0 hours, got {hours}.")
    estimate = proportion_interval(events, trials, confidence, method)
    if trials <= 0:
        return ProportionEstimate(events, trials, 0.0, 0.0, 3.0 / hours, "rule_of_three", confidence)
    return estimate.scaled(trials / hours)


def z_score(events: int, trials: int, expected: float) -> Optional[float]:
    """Distance of the observed fraction from ``expected`` in binomial sigmas."""
    if trials <= 0 or not 0 < expected < 1:
        return None
    sigma = math.sqrt(expected * (1.0 - expected) / trials)
    return (events / trials - expected) / sigma


def summarize_us(samples: Sequence[int]) -> Dict[str, Optional[int]]:
    """min / median / p99 / max of integer microsecond samples (observed values only)."""
    if len(samples) == 0:
        return {"count": 0, "min": None, "median": None, "p99": None, "max": None}
    values = np.asarray(samples, dtype=np.int64)
    return {
        "count": int(values.size),
        "min": int(values.min()),
        "median": int(np.percentile(values, 50, method="lower")),
        "p99": int(np.percentile(values, 99, method="lower")),
        "max": int(values.max()),
    }
