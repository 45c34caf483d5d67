"""Roaming topology: single-connection discipline across safety cells."""

from .topology import (
    Cell,
    RoamingConfig,
    RoamingEvent,
    RoamingState,
    PendingCommissioning,
    DEFAULT_COMMISSIONING_DELAY_US,
    new_roaming_state,
    advance,
    request_handover,
    move_device,
    cell_safe_state,
    cell_reset,
    check_invariants,
)

__all__ = [
    "Cell",
    "RoamingConfig",
    "RoamingEvent",
    "RoamingState",
    "PendingCommissioning",
    "DEFAULT_COMMISSIONING_DELAY_US",
    "new_roaming_state",
    "advance",
    "request_handover",
    "move_device",
    "cell_safe_state",
    "cell_reset",
    "check_invariants",
]
