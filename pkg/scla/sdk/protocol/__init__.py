"""Safety communication layer state machines (producer, consumer, scoring)."""

from .pdu import (
    Frame,
    ProtocolConfig,
    SafetyPdu,
    CROSS_CHECK_MODES,
    encode_pdu,
    decode_frame,
    derive_cross_check,
    compute_pdu_crc,
    prefix_crc_of_frame,
)
from .consumer import (
    Mode,
    VerdictReason,
    Verdict,
    SafeStateEvent,
    ConsumerState,
    new_consumer,
    consumer_accept,
    watchdog_tick,
    enter_safe_state,
    commission_reset,
    disarm,
    rearm,
)
from .producer import (
    ProducerState,
    new_producer,
    build_pdu,
    producer_build,
    producer_frame,
    build_receipt,
    producer_receipt,
    producer_watchdog_tick,
    producer_reset,
)
from .scoring import (
    FaultClass,
    Outcome,
    FaultLabel,
    GroundTruth,
    FORGED_CLASSES,
    classify_undetected,
    worst,
)

__all__ = [
    "Frame",
    "ProtocolConfig",
    "SafetyPdu",
    "CROSS_CHECK_MODES",
    "encode_pdu",
    "decode_frame",
    "derive_cross_check",
    "compute_pdu_crc",
    "prefix_crc_of_frame",
    "Mode",
    "VerdictReason",
    "Verdict",
    "SafeStateEvent",
    "ConsumerState",
    "new_consumer",
    "consumer_accept",
    "watchdog_tick",
    "enter_safe_state",
    "commission_reset",
    "disarm",
    "rearm",
    "ProducerState",
    "new_producer",
    "build_pdu",
    "producer_build",
    "producer_frame",
    "build_receipt",
    "producer_receipt",
    "producer_watchdog_tick",
    "producer_reset",
    "FaultClass",
    "Outcome",
    "FaultLabel",
    "GroundTruth",
    "FORGED_CLASSES",
    "classify_undetected",
    "worst",
]
