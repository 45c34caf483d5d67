"""Safety PDU layout, encoding and decoding.

Field order on the wire (every field MSB first, no padding between fields):

    | A-code (LA) | T-code (LT) | [~T-code (LT)] | [marker (LU)] | payload (8*P) | [cross-check (LR)] | CRC (r) |

The CRC covers every bit before it. Optional fields are present only when
configured. See docs/PDU-LAYOUT.md.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from ..crc import CrcConfig, GeneratorPolynomial, crc_compute_int
from ..exceptions import DomainError, FrameTooLargeError

logger = logging.getLogger(__name__)

CROSS_CHECK_MODES = ("inverted", "copy")


@dataclass(frozen=True)
class Frame:
    """Serialized PDU as an integer of `nbits` bits (first wire bit is the MSB)."""

    value: int
    nbits: int

    def flip(self, mask: int) -> "Frame":
        return Frame(self.value ^ mask, self.nbits)

    def hex(self) -> str:
        return f"{self.value:0{max(1, (self.nbits + 3) // 4)}x}"


@dataclass(frozen=True)
class ProtocolConfig:
    """Parameterization of the safety communication layer for one connection."""

    a_code: int = 1
    la_bits: int = 16
    lt_bits: int = 16
    w: int = 1
    payload_bytes: int = 4
    crc: CrcConfig = field(default_factory=lambda: CrcConfig(GeneratorPolynomial(16, 0x1021)))
    watchdog_timeout_us: int = 50_000
    inverted_counter: bool = False
    marker_bits: int = 0
    marker_value: int = 0
    lr_bits: int = 0
    cross_check: str = "inverted"
    receipt: bool = False
    initial_t_code: int = 0

    def __post_init__(self):
        if self.la_bits < 0 or self.lt_bits < 1:
            raise DomainError("LA must be >= 0 and LT >= 1 bits.")
        if not 0 <= self.a_code < (1 << self.la_bits) and not (self.la_bits == 0 and self.a_code == 0):
            raise DomainError(f"A-code {self.a_code} does not fit in LA = {self.la_bits} bits.")
        if not 1 <= self.w < (1 << self.lt_bits):
            raise DomainError(f"w must be in [1, 2^LT - 1], got {self.w}.")
        if self.payload_bytes < 0:
            raise DomainError("payload_bytes must be >= 0.")
        if self.watchdog_timeout_us <= 0:
            raise DomainError("Watchdog timeout must be > 0.")
        if self.marker_bits < 0 or not 0 <= self.marker_value < max(1, 1 << self.marker_bits):
            raise DomainError(f"Marker value {self.marker_value} does not fit in {self.marker_bits} bits.")
        if not 0 <= self.lr_bits <= 8 * self.payload_bytes:
            raise DomainError(f"LR must be in [0, 8 * payload_bytes], got {self.lr_bits}.")
        if self.cross_check not in CROSS_CHECK_MODES:
            raise DomainError(f"cross_check must be one of {CROSS_CHECK_MODES}, got {self.cross_check!r}.")
        if not 0 <= self.initial_t_code < (1 << self.lt_bits):
            raise DomainError(f"Initial T-code does not fit in LT = {self.lt_bits} bits.")

    @property
    def r(self) -> int:
        return self.crc.width

    @property
    def t_modulus(self) -> int:
        return 1 << self.lt_bits

    @property
    def prefix_bits(self) -> int:
        """Bits covered by the CRC."""
        return (self.la_bits + self.lt_bits * (2 if self.inverted_counter else 1)
                + self.marker_bits + 8 * self.payload_bytes + self.lr_bits)

    @property
    def frame_bits(self) -> int:
        return self.prefix_bits + self.r

    def with_a_code(self, a_code: int) -> "ProtocolConfig":
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values["a_code"] = a_code
        return ProtocolConfig(**values)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a_code": self.a_code,
            "la_bits": self.la_bits,
            "lt_bits": self.lt_bits,
            "w": self.w,
            "payload_bytes": self.payload_bytes,
            "crc": self.crc.to_dict(),
            "watchdog_timeout_us": self.watchdog_timeout_us,
            "inverted_counter": self.inverted_counter,
            "marker_bits": self.marker_bits,
            "marker_value": self.marker_value,
            "lr_bits": self.lr_bits,
            "cross_check": self.cross_check,
            "receipt": self.receipt,
            "initial_t_code": self.initial_t_code,
            "frame_bits": self.frame_bits,
        }


@dataclass(frozen=True)
class SafetyPdu:
    a_code: int
    t_code: int
    payload: bytes
    crc: int
    t_code_inv: Optional[int] = None
    marker: Optional[int] = None
    cross_check: Optional[int] = None


def derive_cross_check(config: ProtocolConfig, payload: bytes) -> Optional[int]:
    """Redundant LR-bit part derived from the leading LR payload bits."""
    if config.lr_bits == 0:
        return None
    value = int.from_bytes(payload, "big") >> (8 * config.payload_bytes - config.lr_bits)
    if config.cross_check == "inverted":
        value ^= (1 << config.lr_bits) - 1
    return value


def pad_payload(config: ProtocolConfig, payload: bytes) -> bytes:
    if len(payload) > config.payload_bytes:
        raise FrameTooLargeError(
            f"Payload of {len(payload)} bytes exceeds the configured maximum of {config.payload_bytes}."
        )
    return bytes(payload) + bytes(config.payload_bytes - len(payload))


def _pack_prefix(config: ProtocolConfig, pdu: SafetyPdu) -> int:
    value = pdu.a_code
    value = (value << config.lt_bits) | pdu.t_code
    if config.inverted_counter:
        value = (value << config.lt_bits) | (pdu.t_code_inv or 0)
    if config.marker_bits:
        value = (value << config.marker_bits) | (pdu.marker or 0)
    if config.payload_bytes:
        value = (value << (8 * config.payload_bytes)) | int.from_bytes(pdu.payload, "big")
    if config.lr_bits:
        value = (value << config.lr_bits) | (pdu.cross_check or 0)
    return value


def compute_pdu_crc(config: ProtocolConfig, pdu: SafetyPdu) -> int:
    return crc_compute_int(config.crc, _pack_prefix(config, pdu), config.prefix_bits)


def encode_pdu(config: ProtocolConfig, pdu: SafetyPdu) -> Frame:
    value = (_pack_prefix(config, pdu) << config.r) | pdu.crc
    return Frame(value, config.frame_bits)


def decode_frame(config: ProtocolConfig, frame: Frame) -> Optional[SafetyPdu]:
    """Split a frame into its fields; None when the length does not match."""
    if frame.nbits != config.frame_bits or frame.value >> frame.nbits:
        return None
    value = frame.value

    def take(nbits: int) -> int:
        nonlocal value
        part = value & ((1 << nbits) - 1)
        value >>= nbits
        return part

    crc = take(config.r)
    cross_check = take(config.lr_bits) if config.lr_bits else None
    payload_int = take(8 * config.payload_bytes) if config.payload_bytes else 0
    marker = take(config.marker_bits) if config.marker_bits else None
    t_code_inv = take(config.lt_bits) if config.inverted_counter else None
    t_code = take(config.lt_bits)
    a_code = take(config.la_bits) if config.la_bits else 0
    return SafetyPdu(
        a_code=a_code,
        t_code=t_code,
        payload=payload_int.to_bytes(config.payload_bytes, "big"),
        crc=crc,
        t_code_inv=t_code_inv,
        marker=marker,
        cross_check=cross_check,
    )


def prefix_crc_of_frame(config: ProtocolConfig, frame: Frame) -> bool:
    """True if the CRC field matches the CRC over the frame's prefix."""
    prefix = frame.value >> config.r
    field_value = frame.value & ((1 << config.r) - 1)
    return crc_compute_int(config.crc, prefix, config.prefix_bits) == field_value
