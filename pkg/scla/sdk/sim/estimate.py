"""Batch estimation and parameter sweeps over independent seeded runs."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DomainError
from ..timing import time_call
from .engine import run_scenario
from .report import SimReport, merge_reports
from .scenario import Scenario

logger = logging.getLogger(__name__)


def derive_seeds(seed: int, count: int) -> List[int]:
    """64-bit child seeds; child i does not depend on ``count``."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def _run_with_seed(args: Tuple[Scenario, int]) -> SimReport:
    scenario, seed = args
    return run_scenario(scenario.with_seed(seed))


def _run_all(jobs: Sequence[Tuple[Scenario, int]], workers: int) -> List[SimReport]:
    if workers <= 1 or len(jobs) <= 1:
        return [_run_with_seed(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map keeps submission order, so results do not depend on completion order
        return list(pool.map(_run_with_seed, jobs))


@dataclass
class ResidualRateEstimate:
    report: SimReport
    batch_seeds: List[int]

    @property
    def rate(self):
        return self.report.residual_rate()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "batches": len(self.batch_seeds),
            "batch_seeds": list(self.batch_seeds),
            "residual_rate": self.rate.to_dict(),
            "report": self.report.to_dict(),
        }


@time_call
def estimate_residual_rate(scenario: Scenario, batches: int, seeds: Optional[Sequence[int]] = None,
                           workers: int = 1) -> ResidualRateEstimate:
    """Run ``batches`` independent copies of a scenario and merge their counts.

    Per-batch seeds are derived from the scenario seed unless given.
    """
    if seeds is None:
        if batches < 1:
            raise DomainError(f"batches must be >= 1, got {batches}.")
        seeds = derive_seeds(scenario.seed, batches)
    seeds = list(seeds)
    if not seeds:
        raise DomainError("At least one batch seed is needed.")
    reports = _run_all([(scenario, s) for s in seeds], workers)
    merged = merge_reports(reports)
    logger.info(f"Merged {len(seeds)} batches: {merged.dangerous_frames} undetected dangerous "
                f"in {merged.horizon_hours:.3g} h")
    return ResidualRateEstimate(merged, seeds)


@dataclass
class SweepPoint:
    value: Any
    report: SimReport

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "report": self.report.to_dict()}


def log_axis(start: float, stop: float, points: int) -> List[float]:
    """Log-spaced axis values, e.g. bep from 1e-4 to 0.5."""
    if points < 1 or start <= 0 or stop <= 0:
        raise DomainError("A log axis needs points >= 1 and positive bounds.")
    return [float(v) for v in np.geomspace(start, stop, points)]


def sweep(scenario: Scenario, path: str, values: Sequence[Any], workers: int = 1) -> List[SweepPoint]:
    """One run per axis value; point i runs with the i-th seed derived from the scenario seed.

    Results are ordered by axis value. Each point is validated against the
    scenario schema, so a field the file leaves at its default can be swept.
    """
    if not values:
        raise DomainError("A sweep needs at least one value.")
    values = sorted(values)
    seeds = derive_seeds(scenario.seed, len(values))
    jobs = [(scenario.with_value(path, v), s) for v, s in zip(values, seeds)]
    reports = _run_all(jobs, workers)
    return [SweepPoint(v, r) for v, r in zip(values, reports)]
