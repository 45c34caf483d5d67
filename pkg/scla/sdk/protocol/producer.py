"""Producer side: PDU construction and the optional receipt watchdog."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

from .consumer import (
    ConsumerState,
    Mode,
    SafeStateEvent,
    Verdict,
    VerdictReason,
)
from .pdu import (
    Frame,
    ProtocolConfig,
    SafetyPdu,
    compute_pdu_crc,
    decode_frame,
    derive_cross_check,
    encode_pdu,
    pad_payload,
    prefix_crc_of_frame,
)
from ..exceptions import ProtocolStateError

logger = logging.getLogger(__name__)


@dataclass
class ProducerState:
    config: ProtocolConfig
    t_code: int
    receipt_deadline: Optional[int] = None
    last_ack: Optional[int] = None
    name: str = "producer"
    mode: Mode = Mode.OPERATIONAL
    built: int = 0
    acks: int = 0
    events: List[SafeStateEvent] = field(default_factory=list)


def new_producer(config: ProtocolConfig, now: int = 0, name: str = "producer") -> ProducerState:
    deadline = now + config.watchdog_timeout_us if config.receipt else None
    return ProducerState(config=config, t_code=config.initial_t_code,
                         receipt_deadline=deadline, last_ack=config.initial_t_code, name=name)


def build_pdu(config: ProtocolConfig, t_code: int, payload: bytes = b"",
              a_code: Optional[int] = None) -> SafetyPdu:
    """Assemble a PDU with every derived field filled in and the CRC computed last."""
    payload = pad_payload(config, payload)
    mask = config.t_modulus - 1
    pdu = SafetyPdu(
        a_code=config.a_code if a_code is None else a_code,
        t_code=t_code & mask,
        payload=payload,
        crc=0,
        t_code_inv=(t_code & mask) ^ mask if config.inverted_counter else None,
        marker=config.marker_value if config.marker_bits else None,
        cross_check=derive_cross_check(config, payload),
    )
    return SafetyPdu(pdu.a_code, pdu.t_code, pdu.payload, compute_pdu_crc(config, pdu),
                     pdu.t_code_inv, pdu.marker, pdu.cross_check)


def producer_build(state: ProducerState, payload: bytes, now: int) -> SafetyPdu:
    """Increment the T-code modulo 2^LT and build the next PDU.

    Raises:
        FrameTooLargeError: payload longer than ``config.payload_bytes``.
        ProtocolStateError: the producer is in safe state.
    """
    if state.mode is not Mode.OPERATIONAL:
        raise ProtocolStateError(f"{state.name} is in safe state and cannot build PDUs.")
    config = state.config
    next_t_code = (state.t_code + 1) % config.t_modulus
    pdu = build_pdu(config, next_t_code, payload)
    state.t_code = next_t_code
    state.built += 1
    return pdu


def producer_frame(state: ProducerState, payload: bytes, now: int) -> Frame:
    return encode_pdu(state.config, producer_build(state, payload, now))


def build_receipt(consumer: ConsumerState, verdict: Verdict) -> Frame:
    """Acknowledgement PDU echoing the accepted T-code back to the producer."""
    return encode_pdu(consumer.config, build_pdu(consumer.config, verdict.t_code or 0))


def producer_watchdog_tick(state: ProducerState, now: int) -> Optional[SafeStateEvent]:
    """Enter safe state when no valid receipt arrived before the deadline."""
    if state.receipt_deadline is None or state.mode is Mode.SAFE_STATE:
        return None
    if now < state.receipt_deadline:
        return None
    state.mode = Mode.SAFE_STATE
    event = SafeStateEvent(now, state.name, "receipt_timeout")
    state.events.append(event)
    logger.info(f"{state.name} entered safe state at {now} us (no receipt)")
    return event


def producer_receipt(state: ProducerState, frame: Frame, now: int) -> Verdict:
    """Check a receipt; a valid one refreshes the receipt watchdog.

    A receipt is valid when it parses, its CRC and A-code match and it
    acknowledges a T-code sent after the last acknowledged one.
    """
    if state.mode is Mode.SAFE_STATE:
        return Verdict(VerdictReason.SAFE_STATE, now)
    if producer_watchdog_tick(state, now) is not None:
        return Verdict(VerdictReason.WATCHDOG_EXPIRED, now)
    config = state.config
    pdu = decode_frame(config, frame)
    if pdu is None:
        return Verdict(VerdictReason.MALFORMED, now)
    if not prefix_crc_of_frame(config, frame):
        return Verdict(VerdictReason.CRC_MISMATCH, now)
    if pdu.a_code != config.a_code:
        return Verdict(VerdictReason.BAD_AUTHENTICITY, now, True, pdu.t_code)
    outstanding = (state.t_code - state.last_ack) % config.t_modulus
    acked = (pdu.t_code - state.last_ack) % config.t_modulus
    if not 1 <= acked <= outstanding:
        return Verdict(VerdictReason.STALE_OR_REPLAYED, now, True, pdu.t_code)
    state.last_ack = pdu.t_code
    state.acks += 1
    if state.receipt_deadline is not None:
        state.receipt_deadline = now + config.watchdog_timeout_us
    return Verdict(VerdictReason.ACCEPTED, now, True, pdu.t_code)


def producer_reset(state: ProducerState, now: int) -> bool:
    """Commissioning reset of the producer; False if it was operational."""
    if state.mode is Mode.OPERATIONAL:
        logger.warning(f"Commissioning reset of operational {state.name} at {now} us ignored")
        return False
    state.mode = Mode.OPERATIONAL
    state.last_ack = state.t_code
    if state.config.receipt:
        state.receipt_deadline = now + state.config.watchdog_timeout_us
    logger.info(f"{state.name} commissioned at {now} us")
    return True
