"""Roaming of one safety device between safety cells.

The device holds at most one master connection. A handover always
disconnects first and connects only once commissioning of the target cell
is complete. Physical location and connection are separate: a device
inside a safety cell it is not connected to forces that cell into safe
state.

Handover adjacency is checked from the current connection, falling back to
the last connected cell; a device that was never connected may commission
into any cell.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

from ..exceptions import DomainError, TransitionNotAllowedError, UnknownCellError
from ..protocol import Mode

logger = logging.getLogger(__name__)

DEFAULT_COMMISSIONING_DELAY_US = 100_000


@dataclass(frozen=True)
class Cell:
    cell_id: str
    a_code: int
    safety: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.cell_id, "a_code": self.a_code, "safety": self.safety}


@dataclass(frozen=True)
class RoamingConfig:
    """Cells, their master A-codes and the allowed transitions."""

    cells: Tuple[Cell, ...]
    device: str = "fs-w-device"
    commissioning_delay_us: int = DEFAULT_COMMISSIONING_DELAY_US
    transitions: FrozenSet[FrozenSet[str]] = frozenset()
    # per-transition override keyed by the unordered pair
    transition_delays: Tuple[Tuple[FrozenSet[str], int], ...] = ()

    def __post_init__(self):
        ids = [c.cell_id for c in self.cells]
        if not ids:
            raise DomainError("A roaming configuration needs at least one cell.")
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise DomainError(f"Duplicate cell IDs: {', '.join(duplicates)}")
        known = set(ids)
        for pair in list(self.transitions) + [p for p, _ in self.transition_delays]:
            unknown = sorted(set(pair) - known)
            if unknown:
                raise UnknownCellError(f"Transition references unknown cell(s): {', '.join(unknown)}")
            if len(pair) != 2:
                raise DomainError(f"A transition needs two distinct cells, got {sorted(pair)}.")
        if self.commissioning_delay_us < 0 or any(d < 0 for _, d in self.transition_delays):
            raise DomainError("Commissioning delays must be >= 0.")

    @classmethod
    def build(cls, cells: Iterable[Cell], transitions: Iterable[Tuple[str, str]] = (),
              device: str = "fs-w-device", commissioning_delay_us: int = DEFAULT_COMMISSIONING_DELAY_US,
              transition_delays: Optional[Dict[Tuple[str, str], int]] = None) -> "RoamingConfig":
        return cls(
            cells=tuple(cells),
            device=device,
            commissioning_delay_us=commissioning_delay_us,
            transitions=frozenset(frozenset(t) for t in transitions),
            transition_delays=tuple(sorted(
                ((frozenset(k), v) for k, v in (transition_delays or {}).items()),
                key=lambda item: sorted(item[0]),
            )),
        )

    @property
    def cell_ids(self) -> List[str]:
        return [c.cell_id for c in self.cells]

    def cell(self, cell_id: str) -> Cell:
        for c in self.cells:
            if c.cell_id == cell_id:
                return c
        raise UnknownCellError(f"Unknown cell '{cell_id}'. Known cells: {', '.join(self.cell_ids)}")

    def is_safety_cell(self, location: Optional[str]) -> bool:
        return any(c.cell_id == location and c.safety for c in self.cells)

    def allowed(self, source: str, target: str) -> bool:
        return frozenset((source, target)) in self.transitions

    def delay(self, source: Optional[str], target: str) -> int:
        if source is not None:
            pair = frozenset((source, target))
            for key, value in self.transition_delays:
                if key == pair:
                    return value
        return self.commissioning_delay_us

    def to_dict(self) -> Dict[str, Any]:
        return {
            "device": self.device,
            "cells": [c.to_dict() for c in self.cells],
            "transitions": sorted(sorted(t) for t in self.transitions),
            "commissioning_delay_us": self.commissioning_delay_us,
        }


@dataclass(frozen=True)
class RoamingEvent:
    time_us: int
    kind: str
    cell: Optional[str] = None
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"time_us": self.time_us, "kind": self.kind, "cell": self.cell, "detail": self.detail}


@dataclass(frozen=True)
class PendingCommissioning:
    target: str
    ready_us: int


@dataclass
class RoamingState:
    config: RoamingConfig
    location: Optional[str] = None
    current: Optional[str] = None
    last_connected: Optional[str] = None
    pending: Optional[PendingCommissioning] = None
    cell_modes: Dict[str, Mode] = field(default_factory=dict)
    events: List[RoamingEvent] = field(default_factory=list)

    def connections(self) -> List[str]:
        return [self.current] if self.current is not None else []

    def mode(self, cell_id: str) -> Mode:
        return self.cell_modes[cell_id]

    def _log(self, event: RoamingEvent) -> RoamingEvent:
        self.events.append(event)
        logger.debug(f"roaming {event.kind} cell={event.cell} at {event.time_us} us {event.detail}")
        return event


def new_roaming_state(config: RoamingConfig, location: Optional[str] = None,
                      connected: Optional[str] = None, now: int = 0) -> RoamingState:
    """Initial state; a device starting inside a safety cell should start connected to it."""
    if connected is not None:
        config.cell(connected)
    state = RoamingState(config=config, location=location, current=connected, last_connected=connected,
                         cell_modes={c: Mode.OPERATIONAL for c in config.cell_ids})
    _enforce_entry_rule(state, now, "initial placement")
    return state


def _enforce_entry_rule(state: RoamingState, now: int, detail: str) -> List[RoamingEvent]:
    location = state.location
    if not state.config.is_safety_cell(location) or state.current == location:
        return []
    if state.cell_modes[location] is Mode.SAFE_STATE:
        return []
    state.cell_modes[location] = Mode.SAFE_STATE
    logger.warning(f"Device {state.config.device} inside cell {location} without a connection: safe state")
    return [state._log(RoamingEvent(now, "safe_state", location, detail))]


def advance(state: RoamingState, now: int) -> List[RoamingEvent]:
    """Complete a pending commissioning whose ready time has passed."""
    pending = state.pending
    if pending is None or now < pending.ready_us:
        return []
    state.pending = None
    state.current = pending.target
    state.last_connected = pending.target
    events = [state._log(RoamingEvent(pending.ready_us, "connect", pending.target))]
    events += _enforce_entry_rule(state, pending.ready_us, "connect")
    return events


def request_handover(state: RoamingState, target: str, now: int) -> List[RoamingEvent]:
    """Disconnect from the current cell and commission into ``target``.

    Raises:
        UnknownCellError: target is not a configured cell.
        TransitionNotAllowedError: target is not adjacent; state is unchanged.
    """
    config = state.config
    config.cell(target)
    events = advance(state, now)
    if state.current == target or (state.pending is not None and state.pending.target == target):
        return events
    source = state.current or state.last_connected
    if source is not None and not config.allowed(source, target):
        raise TransitionNotAllowedError(f"Handover {source} -> {target} is not an allowed transition.")
    if state.pending is not None:
        events.append(state._log(RoamingEvent(now, "handover_cancelled", state.pending.target)))
        state.pending = None
    if state.current is not None:
        events.append(state._log(RoamingEvent(now, "disconnect", state.current)))
        state.current = None
        events += _enforce_entry_rule(state, now, "disconnect")
    ready = now + config.delay(source, target)
    state.pending = PendingCommissioning(target, ready)
    events.append(state._log(RoamingEvent(now, "commissioning", target, f"ready at {ready} us")))
    return events + advance(state, now)


def move_device(state: RoamingState, new_location: Optional[str], now: int) -> List[RoamingEvent]:
    """Physical movement; unconstrained, but may force the entered cell into safe state."""
    events = advance(state, now)
    state.location = new_location
    events.append(state._log(RoamingEvent(now, "move", new_location)))
    return events + _enforce_entry_rule(state, now, "accidental entry")


def cell_safe_state(state: RoamingState, cell_id: str, now: int, reason: str) -> List[RoamingEvent]:
    """Put a cell into safe state for a reason raised elsewhere (e.g. its watchdog)."""
    state.config.cell(cell_id)
    events = advance(state, now)
    if state.cell_modes[cell_id] is Mode.SAFE_STATE:
        return events
    state.cell_modes[cell_id] = Mode.SAFE_STATE
    return events + [state._log(RoamingEvent(now, "safe_state", cell_id, reason))]


def cell_reset(state: RoamingState, cell_id: str, now: int) -> List[RoamingEvent]:
    """Commissioning reset of a cell in safe state.

    Resetting an operational cell is a no-op with a warning. A reset that
    would immediately violate the accidental-entry rule is refused the same
    way.
    """
    state.config.cell(cell_id)
    events = advance(state, now)
    if state.cell_modes[cell_id] is Mode.OPERATIONAL:
        logger.warning(f"Reset of operational cell {cell_id} at {now} us ignored")
        return events + [state._log(RoamingEvent(now, "reset_ignored", cell_id, "cell is operational"))]
    if state.config.is_safety_cell(cell_id) and state.location == cell_id and state.current != cell_id:
        logger.warning(f"Reset of cell {cell_id} refused: device inside without a connection")
        return events + [state._log(RoamingEvent(now, "reset_ignored", cell_id, "device inside without connection"))]
    state.cell_modes[cell_id] = Mode.OPERATIONAL
    return events + [state._log(RoamingEvent(now, "reset", cell_id))]


def check_invariants(state: RoamingState) -> List[str]:
    """Violated roaming invariants, empty when the state is sound."""
    problems = []
    if len(state.connections()) > 1:
        problems.append("more than one connection")
    location = state.location
    if (state.config.is_safety_cell(location) and state.current != location
            and state.cell_modes[location] is not Mode.SAFE_STATE):
        problems.append(f"device inside {location} without connection but cell is operational")
    if state.pending is not None and state.current is not None:
        problems.append("connected while a commissioning is pending")
    return problems
