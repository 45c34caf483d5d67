"""Simulation reports: raw counts plus everything derived from them.

A report keeps counts, not estimates, so reports merge by summing
(:func:`merge_reports` is associative and commutative). Intervals and
summaries are derived in :meth:`SimReport.to_dict`.
"""

import csv
import io
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..exceptions import DomainError
from ..protocol import FaultClass, VerdictReason
from .channel import HopLedger
from .stats import proportion_interval, rate_interval, summarize_us, z_score

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "scla/sim-report/v1"

FRAME_COUNTERS = ("emitted", "offered", "accepted", "suppressed", "unroutable", "in_flight")
CLASS_COUNTERS = ("injected", "detected", "undetected_dangerous", "harmless")


def _class_table() -> Dict[str, Counter]:
    return {fault.value: Counter() for fault in FaultClass}


@dataclass
class SimReport:
    name: str
    seeds: List[int]
    horizon_hours: float
    rate_per_hour: float
    frame_bits: int
    composed_bep: float
    analytic_p_ud: Optional[float] = None
    confidence: float = 0.95
    ci_method: str = "auto"
    latency_bound_us: int = 5_000
    frames: Counter = field(default_factory=Counter)
    verdicts: Counter = field(default_factory=Counter)
    classes: Dict[str, Counter] = field(default_factory=_class_table)
    crc: Counter = field(default_factory=Counter)
    dangerous_frames: int = 0
    response_samples: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    safe_state_events: List[Dict[str, Any]] = field(default_factory=list)
    roaming_events: List[Dict[str, Any]] = field(default_factory=list)
    hops: Dict[str, HopLedger] = field(default_factory=dict)
    annotation: Dict[str, Any] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def undetected_dangerous(self) -> int:
        return sum(c["undetected_dangerous"] for c in self.classes.values())

    def residual_rate(self):
        """Dangerous accepted frames per hour with its interval."""
        return rate_interval(self.dangerous_frames, self.frames["offered"], self.horizon_hours,
                             self.confidence, self.ci_method)

    def crc_escape_fraction(self):
        return proportion_interval(self.crc["escapes"], self.crc["offered"], self.confidence, self.ci_method)

    def conservation_ok(self) -> bool:
        """Every hop balances and no class scores more than it injected."""
        if not all(ledger.balanced() for ledger in self.hops.values()):
            return False
        return all(c["injected"] >= c["detected"] + c["undetected_dangerous"] for c in self.classes.values())

    def to_dict(self) -> Dict[str, Any]:
        rate = self.residual_rate()
        escapes = self.crc_escape_fraction()
        response = summarize_us(self.response_samples)
        response["latency_bound_us"] = self.latency_bound_us
        response["within_bound"] = int(np.count_nonzero(self.response_samples <= self.latency_bound_us))
        classes = {}
        for name, counts in sorted(self.classes.items()):
            entry = {k: int(counts[k]) for k in CLASS_COUNTERS}
            classes[name] = entry
        return {
            "schema": REPORT_SCHEMA,
            "name": self.name,
            "seeds": list(self.seeds),
            "exposure_hours": self.horizon_hours,
            "rate_per_hour": self.rate_per_hour,
            "frames": {k: int(self.frames[k]) for k in FRAME_COUNTERS},
            "verdicts": {r.value: int(self.verdicts[r.value]) for r in VerdictReason},
            "classes": classes,
            "undetected_dangerous": self.undetected_dangerous,
            "dangerous_frames": self.dangerous_frames,
            "residual_rate": rate.to_dict(),
            "crc": {
                "frame_bits": self.frame_bits,
                "composed_bep": self.composed_bep,
                "offered": int(self.crc["offered"]),
                "corrupted": int(self.crc["corrupted"]),
                "escapes": int(self.crc["escapes"]),
                "empirical_p_ud": escapes.to_dict(),
                "analytic_p_ud": self.analytic_p_ud,
                "z_score": (None if self.analytic_p_ud is None
                            else z_score(self.crc["escapes"], self.crc["offered"], self.analytic_p_ud)),
            },
            "response_time_us": response,
            "safe_state_events": list(self.safe_state_events),
            "roaming_events": list(self.roaming_events),
            "hops": {label: ledger.to_dict() for label, ledger in self.hops.items()},
            "annotation": dict(self.annotation),
            "config": self.config,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        """Canonical JSON: sorted keys, so equal reports are byte-identical."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def flat_row(self) -> Dict[str, Any]:
        """One flat row of headline metrics (CSV bridge for external tools)."""
        data = self.to_dict()
        rate = data["residual_rate"]
        row = {
            "name": self.name,
            "seeds": " ".join(str(s) for s in self.seeds),
            "exposure_hours": self.horizon_hours,
        }
        row.update({f"frames_{k}": v for k, v in data["frames"].items()})
        row.update({f"verdict_{k}": v for k, v in data["verdicts"].items()})
        for name, counts in data["classes"].items():
            row.update({f"{name}_{k}": v for k, v in counts.items()})
        row.update({
            "dangerous_frames": self.dangerous_frames,
            "residual_rate": rate["value"],
            "residual_rate_lower": rate["lower"],
            "residual_rate_upper": rate["upper"],
            "ci_method": rate["method"],
            "crc_offered": data["crc"]["offered"],
            "crc_escapes": data["crc"]["escapes"],
            "composed_bep": self.composed_bep,
            "analytic_p_ud": self.analytic_p_ud,
            "response_min_us": data["response_time_us"]["min"],
            "response_median_us": data["response_time_us"]["median"],
            "response_p99_us": data["response_time_us"]["p99"],
            "response_max_us": data["response_time_us"]["max"],
            "safe_state_events": len(self.safe_state_events),
        })
        return row


def reports_to_csv(rows: Sequence[Dict[str, Any]]) -> str:
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
    return buffer.getvalue()


def merge_reports(reports: Sequence[SimReport]) -> SimReport:
    """Sum the counts of independent runs of the same scenario.

    Raises:
        DomainError: nothing to merge, or the reports differ in frame layout.
    """
    if not reports:
        raise DomainError("merge_reports needs at least one report.")
    first = reports[0]
    if any(r.frame_bits != first.frame_bits for r in reports):
        raise DomainError("Cannot merge reports with different frame layouts.")
    merged = SimReport(
        name=first.name,
        seeds=[s for r in reports for s in r.seeds],
        horizon_hours=math.fsum(r.horizon_hours for r in reports),
        rate_per_hour=first.rate_per_hour,
        frame_bits=first.frame_bits,
        composed_bep=first.composed_bep,
        analytic_p_ud=first.analytic_p_ud,
        confidence=first.confidence,
        ci_method=first.ci_method,
        latency_bound_us=first.latency_bound_us,
        annotation=dict(first.annotation),
        config=first.config,
    )
    for report in reports:
        merged.frames.update(report.frames)
        merged.verdicts.update(report.verdicts)
        merged.crc.update(report.crc)
        merged.dangerous_frames += report.dangerous_frames
        for name, counts in report.classes.items():
            merged.classes.setdefault(name, Counter()).update(counts)
        for label, ledger in report.hops.items():
            merged.hops[label] = merged.hops[label].merge(ledger) if label in merged.hops else ledger
        merged.safe_state_events.extend(report.safe_state_events)
        merged.roaming_events.extend(report.roaming_events)
        merged.warnings.extend(w for w in report.warnings if w not in merged.warnings)
    merged.response_samples = np.sort(np.concatenate([r.response_samples for r in reports]))
    return merged
