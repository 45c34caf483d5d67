"""Consumer side of the safety communication layer.

Checks run in a fixed order so rejection counters mean the same thing in
every run:

    safe state -> watchdog -> parse -> CRC -> A-code (+ marker) -> cross-check -> T-code

A T-code is accepted when ``(t_code - last) mod 2^LT`` lies in ``[1, w]``.
"""

import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Deque, Dict, List, Optional

from .pdu import Frame, ProtocolConfig, SafetyPdu, decode_frame, derive_cross_check, prefix_crc_of_frame

logger = logging.getLogger(__name__)

REJECTION_LOG_SIZE = 1000


class Mode(str, Enum):
    OPERATIONAL = "operational"
    SAFE_STATE = "safe_state"


class VerdictReason(str, Enum):
    ACCEPTED = "accepted"
    BAD_AUTHENTICITY = "bad_authenticity"
    STALE_OR_REPLAYED = "stale_or_replayed"
    CRC_MISMATCH = "crc_mismatch"
    CROSS_CHECK_MISMATCH = "cross_check_mismatch"
    WATCHDOG_EXPIRED = "watchdog_expired"
    MALFORMED = "malformed"
    SAFE_STATE = "safe_state"


@dataclass(frozen=True)
class Verdict:
    reason: VerdictReason
    time_us: int
    crc_ok: bool = False
    t_code: Optional[int] = None

    @property
    def accepted(self) -> bool:
        return self.reason is VerdictReason.ACCEPTED

    def to_dict(self) -> Dict[str, Any]:
        return {"reason": self.reason.value, "time_us": self.time_us,
                "crc_ok": self.crc_ok, "t_code": self.t_code}


@dataclass(frozen=True)
class SafeStateEvent:
    """One transition into safe state."""

    time_us: int
    source: str
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {"time_us": self.time_us, "source": self.source, "reason": self.reason}


@dataclass
class ConsumerState:
    """Mutable consumer state; owned by exactly one caller."""

    config: ProtocolConfig
    last_t_code: int
    watchdog_deadline: int
    name: str = "consumer"
    mode: Mode = Mode.OPERATIONAL
    armed: bool = True
    accepted: int = 0
    rejections: Counter = field(default_factory=Counter)
    rejection_log: Deque[Verdict] = field(default_factory=lambda: deque(maxlen=REJECTION_LOG_SIZE))
    events: List[SafeStateEvent] = field(default_factory=list)

    @property
    def window(self) -> int:
        return self.config.w

    def in_window(self, t_code: int) -> bool:
        delta = (t_code - self.last_t_code) % self.config.t_modulus
        return 1 <= delta <= self.config.w


def new_consumer(config: ProtocolConfig, now: int = 0, name: str = "consumer") -> ConsumerState:
    """Operational consumer expecting the first T-code after ``config.initial_t_code``."""
    return ConsumerState(
        config=config,
        last_t_code=config.initial_t_code,
        watchdog_deadline=now + config.watchdog_timeout_us,
        name=name,
    )


def enter_safe_state(state: ConsumerState, now: int, reason: str) -> Optional[SafeStateEvent]:
    """Force safe state; returns the event, or None if already there."""
    if state.mode is Mode.SAFE_STATE:
        return None
    state.mode = Mode.SAFE_STATE
    event = SafeStateEvent(now, state.name, reason)
    state.events.append(event)
    logger.info(f"{state.name} entered safe state at {now} us ({reason})")
    return event


def watchdog_tick(state: ConsumerState, now: int) -> Optional[SafeStateEvent]:
    """Enter safe state when ``now >= deadline``; idempotent afterwards."""
    if state.armed and state.mode is Mode.OPERATIONAL and now >= state.watchdog_deadline:
        return enter_safe_state(state, now, VerdictReason.WATCHDOG_EXPIRED.value)
    return None


def _reject(state: ConsumerState, reason: VerdictReason, now: int,
            crc_ok: bool = False, t_code: Optional[int] = None) -> Verdict:
    verdict = Verdict(reason, now, crc_ok, t_code)
    state.rejections[reason] += 1
    state.rejection_log.append(verdict)
    return verdict


def _check_pdu(state: ConsumerState, pdu: SafetyPdu, now: int) -> Verdict:
    config = state.config
    if pdu.a_code != config.a_code or (config.marker_bits and pdu.marker != config.marker_value):
        return _reject(state, VerdictReason.BAD_AUTHENTICITY, now, True, pdu.t_code)
    if config.lr_bits and pdu.cross_check != derive_cross_check(config, pdu.payload):
        return _reject(state, VerdictReason.CROSS_CHECK_MISMATCH, now, True, pdu.t_code)
    if config.inverted_counter and pdu.t_code_inv != pdu.t_code ^ (config.t_modulus - 1):
        return _reject(state, VerdictReason.MALFORMED, now, True, pdu.t_code)
    if not state.in_window(pdu.t_code):
        return _reject(state, VerdictReason.STALE_OR_REPLAYED, now, True, pdu.t_code)
    state.last_t_code = pdu.t_code
    state.watchdog_deadline = now + config.watchdog_timeout_us
    state.accepted += 1
    return Verdict(VerdictReason.ACCEPTED, now, True, pdu.t_code)


def consumer_accept(state: ConsumerState, frame: Frame, now: int) -> Verdict:
    """Run the fixed check sequence on a received frame.

    Failures are verdicts and bump ``state.rejections``; nothing raises.
    """
    if state.mode is Mode.SAFE_STATE:
        return _reject(state, VerdictReason.SAFE_STATE, now)
    if watchdog_tick(state, now) is not None:
        return _reject(state, VerdictReason.WATCHDOG_EXPIRED, now)
    pdu = decode_frame(state.config, frame)
    if pdu is None:
        return _reject(state, VerdictReason.MALFORMED, now)
    if not prefix_crc_of_frame(state.config, frame):
        return _reject(state, VerdictReason.CRC_MISMATCH, now)
    return _check_pdu(state, pdu, now)


def commission_reset(state: ConsumerState, now: int, t_code: Optional[int] = None) -> bool:
    """Explicit out-of-band commissioning: leave safe state and re-arm the watchdog.

    ``t_code`` resynchronizes the counter to the producer's last sent value.
    Returns False (and logs a warning) when the consumer was operational.
    """
    if state.mode is Mode.OPERATIONAL:
        logger.warning(f"Commissioning reset of operational {state.name} at {now} us ignored")
        return False
    state.mode = Mode.OPERATIONAL
    state.watchdog_deadline = now + state.config.watchdog_timeout_us
    if t_code is not None:
        state.last_t_code = t_code % state.config.t_modulus
    logger.info(f"{state.name} commissioned at {now} us")
    return True


def disarm(state: ConsumerState) -> None:
    """Stop supervising the connection (the device disconnected)."""
    state.armed = False


def rearm(state: ConsumerState, now: int, t_code: int) -> None:
    """Supervise a newly commissioned connection starting after ``t_code``.

    Safe state is left untouched; only ``commission_reset`` clears it.
    """
    state.armed = True
    state.last_t_code = t_code % state.config.t_modulus
    state.watchdog_deadline = now + state.config.watchdog_timeout_us
