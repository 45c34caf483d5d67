"""Seeded black-channel fault-injection simulator."""

from .channel import (
    ChannelModel,
    ChannelChain,
    Impairment,
    Delivery,
    HopChannel,
    HopLedger,
    US_PER_HOUR,
    US_PER_MS,
    compose,
    compose_bep,
    carry,
    transmit,
    flip_mask,
    forge_frame,
    injection_times,
    ms_to_us,
)
from .scenario import (
    Scenario,
    ScoringConfig,
    RoamingPlan,
    RoamingAction,
    DEFAULT_LATENCY_BOUND_MS,
    DEFAULT_ANNOTATION,
    load_scenario,
    scenario_from_dict,
    set_path,
)
from .stats import ProportionEstimate, proportion_interval, rate_interval, summarize_us, z_score
from .report import SimReport, merge_reports, reports_to_csv
from .engine import Simulation, run_scenario
from .estimate import ResidualRateEstimate, SweepPoint, derive_seeds, estimate_residual_rate, log_axis, sweep

__all__ = [
    "ChannelModel",
    "ChannelChain",
    "Impairment",
    "Delivery",
    "HopChannel",
    "HopLedger",
    "US_PER_HOUR",
    "US_PER_MS",
    "compose",
    "compose_bep",
    "carry",
    "transmit",
    "flip_mask",
    "forge_frame",
    "injection_times",
    "ms_to_us",
    "Scenario",
    "ScoringConfig",
    "RoamingPlan",
    "RoamingAction",
    "DEFAULT_LATENCY_BOUND_MS",
    "DEFAULT_ANNOTATION",
    "load_scenario",
    "scenario_from_dict",
    "set_path",
    "ProportionEstimate",
    "proportion_interval",
    "rate_interval",
    "summarize_us",
    "z_score",
    "SimReport",
    "merge_reports",
    "reports_to_csv",
    "Simulation",
    "run_scenario",
    "ResidualRateEstimate",
    "SweepPoint",
    "derive_seeds",
    "estimate_residual_rate",
    "log_axis",
    "sweep",
]
