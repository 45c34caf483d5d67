"""Scenario files: YAML documents validated against ``scenario.schema.json``.

Times in the file are milliseconds, rates are per hour (``rate_per_second``
is accepted for traffic). Everything is converted to integer microseconds
on load.
"""

import copy
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from ..crc import CrcConfig, parse_polynomial, find_catalog_entry
from ..exceptions import DomainError, PolynomialParseError, ScenarioError, SimulationOverflowError, RoamingError
from ..protocol import ProtocolConfig
from ..roaming import Cell, RoamingConfig, DEFAULT_COMMISSIONING_DELAY_US
from ..schemas import validation_errors
from .channel import ChannelChain, ChannelModel, Impairment, US_PER_HOUR, compose, ms_to_us
from .stats import CI_METHODS

logger = logging.getLogger(__name__)

SCENARIO_SCHEMA = "scla/scenario/v1"
MAX_EVENTS = 1 << 63

# Field-trial figures used as defaults only.
DEFAULT_LATENCY_BOUND_MS = 5.0
DEFAULT_ANNOTATION = {"remaining_failure_probability": 1.0e-9}

ROAMING_ACTIONS = ("handover", "move", "reset")


@dataclass(frozen=True)
class RoamingAction:
    at_us: int
    action: str
    target: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"at_us": self.at_us, "action": self.action, "target": self.target}


@dataclass(frozen=True)
class RoamingPlan:
    config: RoamingConfig
    start_location: Optional[str] = None
    start_connected: Optional[str] = None
    schedule: Tuple[RoamingAction, ...] = ()


@dataclass(frozen=True)
class ScoringConfig:
    confidence: float = 0.95
    ci_method: str = "auto"
    latency_bound_us: int = ms_to_us(DEFAULT_LATENCY_BOUND_MS)
    stale_after_us: Optional[int] = None
    reset_after_us: Optional[int] = None


@dataclass(frozen=True)
class Scenario:
    """A validated, fully resolved scenario."""

    seed: int
    protocol: ProtocolConfig
    chain: ChannelChain
    rate_per_hour: float
    horizon_hours: float
    name: str = "scenario"
    reverse: Optional[ChannelChain] = None
    roaming: Optional[RoamingPlan] = None
    scoring: ScoringConfig = field(default_factory=ScoringConfig)
    annotation: Dict[str, Any] = field(default_factory=lambda: dict(DEFAULT_ANNOTATION))
    document: Dict[str, Any] = field(default_factory=dict)

    @property
    def horizon_us(self) -> int:
        return int(round(self.horizon_hours * US_PER_HOUR))

    @property
    def stale_after_us(self) -> int:
        return self.scoring.stale_after_us or self.protocol.watchdog_timeout_us

    def expected_events(self) -> float:
        """Rough upper estimate of scheduled events, for the overflow guard."""
        injections = sum(h.insertion_rate + h.masquerade_rate + h.misroute_rate for h in self.chain.hops)
        per_frame = 2 * len(self.chain.hops) + 4
        return (self.rate_per_hour + injections) * self.horizon_hours * per_frame

    def check_capacity(self) -> None:
        """Raises SimulationOverflowError beyond 2^63 events or microseconds."""
        if self.horizon_hours * US_PER_HOUR >= MAX_EVENTS:
            raise SimulationOverflowError(
                f"Horizon of {self.horizon_hours} h does not fit a 64-bit microsecond clock."
            )
        if self.expected_events() >= MAX_EVENTS:
            raise SimulationOverflowError(
                f"Scenario would schedule about {self.expected_events():.3e} events (limit 2^63)."
            )

    def with_seed(self, seed: int) -> "Scenario":
        document = copy.deepcopy(self.document)
        document["seed"] = seed
        return scenario_from_dict(document)

    def with_value(self, path: str, value: Any) -> "Scenario":
        """Copy with one document field replaced, e.g. ``hops[0].bep``."""
        document = copy.deepcopy(self.document)
        set_path(document, path, value)
        return scenario_from_dict(document)

    def config_echo(self) -> Dict[str, Any]:
        return copy.deepcopy(self.document)


_PATH_TOKEN = re.compile(r"([^.\[\]]+)|\[(\d+)\]")


def _path_tokens(path: str) -> List[Union[str, int]]:
    tokens = []
    for match in _PATH_TOKEN.finditer(path):
        name, index = match.groups()
        tokens.append(int(index) if index is not None else name)
    if not tokens:
        raise ScenarioError("Empty field path.", path)
    return tokens


def set_path(document: Dict[str, Any], path: str, value: Any) -> None:
    """Set ``document`` at a path like ``hops[1].bep``, creating mappings as needed."""
    tokens = _path_tokens(path)
    node: Any = document
    for token, following in zip(tokens, tokens[1:]):
        try:
            if isinstance(token, int):
                node = node[token]
            else:
                node = node.setdefault(token, [] if isinstance(following, int) else {})
        except (IndexError, KeyError, TypeError, AttributeError):
            raise ScenarioError("Field path does not exist in the scenario.", path)
    last = tokens[-1]
    try:
        node[last] = value
    except (IndexError, TypeError):
        raise ScenarioError("Field path does not exist in the scenario.", path)


def _crc_config(data: Dict[str, Any], path: str) -> CrcConfig:
    text = data["polynomial"]
    entry = find_catalog_entry(text)
    if entry is not None and not set(data) - {"polynomial"}:
        return CrcConfig.from_catalog(entry)
    try:
        polynomial = parse_polynomial(text)
    except PolynomialParseError as e:
        raise ScenarioError(str(e), f"{path}.polynomial")
    return CrcConfig(
        polynomial=polynomial,
        init=data.get("init", 0),
        reflect_in=data.get("reflect_in", False),
        reflect_out=data.get("reflect_out", False),
        xor_out=data.get("xor_out", 0),
    )


def _protocol(data: Dict[str, Any]) -> ProtocolConfig:
    kwargs = {k: v for k, v in data.items() if k not in ("crc", "watchdog_timeout_ms")}
    if "crc" in data:
        kwargs["crc"] = _crc_config(data["crc"], "protocol.crc")
    if "watchdog_timeout_ms" in data:
        kwargs["watchdog_timeout_us"] = ms_to_us(data["watchdog_timeout_ms"])
    return ProtocolConfig(**kwargs)


def _hop(data: Dict[str, Any], index: int, prefix: str) -> ChannelModel:
    path = f"{prefix}[{index}]"
    impairments = []
    for i, window in enumerate(data.get("impairments", [])):
        try:
            impairments.append(Impairment(window["kind"], ms_to_us(window["start_ms"]), ms_to_us(window["end_ms"])))
        except DomainError as e:
            raise ScenarioError(str(e), f"{path}.impairments[{i}]")
    try:
        return ChannelModel(
            label=data.get("label", f"{prefix.rstrip('s')}{index}"),
            bep=data.get("bep", 0.0),
            loss_prob=data.get("loss_prob", 0.0),
            dup_prob=data.get("dup_prob", 0.0),
            reorder_prob=data.get("reorder_prob", 0.0),
            base_latency_us=ms_to_us(data.get("latency_ms", 0.0)),
            jitter_us=ms_to_us(data.get("jitter_ms", 0.0)),
            delay_prob=data.get("delay_prob", 0.0),
            delay_extra_us=ms_to_us(data.get("delay_extra_ms", 0.0)),
            insertion_rate=data.get("insertion_rate", 0.0),
            masquerade_rate=data.get("masquerade_rate", 0.0),
            misroute_rate=data.get("misroute_rate", 0.0),
            impairments=tuple(impairments),
        )
    except DomainError as e:
        raise ScenarioError(str(e), path)


def _roaming(data: Dict[str, Any]) -> RoamingPlan:
    try:
        config = RoamingConfig.build(
            cells=[Cell(c["id"], c["a_code"], c.get("safety", True)) for c in data["cells"]],
            transitions=[tuple(t) for t in data.get("transitions", [])],
            device=data.get("device", "fs-w-device"),
            commissioning_delay_us=ms_to_us(data["commissioning_delay_ms"])
            if "commissioning_delay_ms" in data else DEFAULT_COMMISSIONING_DELAY_US,
            transition_delays={tuple(d["between"]): ms_to_us(d["delay_ms"])
                               for d in data.get("transition_delays", [])},
        )
    except (DomainError, RoamingError) as e:
        raise ScenarioError(str(e), "topology")
    start = data.get("start", {})
    for key in ("connected",):
        if start.get(key) is not None and start[key] not in config.cell_ids:
            raise ScenarioError(f"Unknown cell '{start[key]}'.", f"topology.start.{key}")
    schedule = []
    for i, item in enumerate(data.get("schedule", [])):
        action = item["action"]
        target = item.get("location") if action == "move" else item.get("cell")
        if action in ("handover", "reset") and target not in config.cell_ids:
            raise ScenarioError(f"Action '{action}' needs a known cell, got {target!r}.",
                                f"topology.schedule[{i}].cell")
        schedule.append(RoamingAction(ms_to_us(item["at_ms"]), action, target))
    schedule.sort(key=lambda a: a.at_us)
    return RoamingPlan(
        config=config,
        start_location=start.get("location"),
        start_connected=start.get("connected"),
        schedule=tuple(schedule),
    )


def _scoring(data: Dict[str, Any]) -> ScoringConfig:
    method = data.get("ci_method", "auto")
    if method not in CI_METHODS:
        raise ScenarioError(f"Unknown CI method {method!r}.", "scoring.ci_method")
    stale = data.get("stale_after_ms")
    reset = data.get("reset_after_ms")
    return ScoringConfig(
        confidence=data.get("confidence", 0.95),
        ci_method=method,
        latency_bound_us=ms_to_us(data.get("latency_bound_ms", DEFAULT_LATENCY_BOUND_MS)),
        stale_after_us=ms_to_us(stale) if stale is not None else None,
        reset_after_us=ms_to_us(reset) if reset is not None else None,
    )


def scenario_from_dict(document: Dict[str, Any]) -> Scenario:
    """Validate and resolve a scenario document.

    Raises:
        ScenarioError: schema violations (all of them, with field paths) or
            semantically invalid values.
    """
    if not isinstance(document, dict):
        raise ScenarioError("A scenario must be a mapping.", "<root>")
    errors = validation_errors(document, "scenario")
    if errors:
        detail = "; ".join(f"{path}: {message}" for path, message in errors)
        error = ScenarioError(detail)
        error.path = errors[0][0]
        raise error

    try:
        protocol = _protocol(document.get("protocol", {}))
    except DomainError as e:
        raise ScenarioError(str(e), "protocol")
    try:
        chain = compose([_hop(h, i, "hops") for i, h in enumerate(document["hops"])])
        reverse = None
        if "reverse_hops" in document:
            reverse = compose([_hop(h, i, "reverse_hops") for i, h in enumerate(document["reverse_hops"])])
    except DomainError as e:
        raise ScenarioError(str(e), "hops")

    traffic = document["traffic"]
    rate = traffic["rate_per_hour"] if "rate_per_hour" in traffic else traffic["rate_per_second"] * 3600
    annotation = dict(DEFAULT_ANNOTATION)
    annotation.update(document.get("annotation", {}))

    scenario = Scenario(
        seed=document["seed"],
        protocol=protocol,
        chain=chain,
        rate_per_hour=float(rate),
        horizon_hours=float(traffic["horizon_hours"]),
        name=document.get("name", "scenario"),
        reverse=reverse,
        roaming=_roaming(document["topology"]) if "topology" in document else None,
        scoring=_scoring(document.get("scoring", {})),
        annotation=annotation,
        document=copy.deepcopy(document),
    )
    scenario.check_capacity()
    return scenario


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read a YAML (or JSON) scenario file."""
    path = Path(path)
    try:
        with open(path, "r") as f:
            document = yaml.safe_load(f)
    except FileNotFoundError:
        raise ScenarioError(f"Scenario file not found: {path}")
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ScenarioError(f"Invalid YAML in {path}{where}: {getattr(e, 'problem', e)}")
    logger.debug(f"Loaded scenario {path}")
    return scenario_from_dict(document)
