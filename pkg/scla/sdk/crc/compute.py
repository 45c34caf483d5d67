"""Bit-exact CRC computation over arbitrary generator polynomials."""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Union

from .polynomial import GeneratorPolynomial, CatalogEntry
from ..exceptions import DomainError

logger = logging.getLogger(__name__)

Message = Union[bytes, bytearray, Sequence[int]]


@dataclass(frozen=True)
class CrcConfig:
    """Rocksoft-style CRC parameters.

    ``init`` is the register value before the first message bit (direct
    algorithm). ``reflect_in`` only affects byte input: each byte is fed
    LSB first. ``reflect_out`` reverses the r-bit register before ``xor_out``.
    """

    polynomial: GeneratorPolynomial
    init: int = 0
    reflect_in: bool = False
    reflect_out: bool = False
    xor_out: int = 0

    def __post_init__(self):
        mask = self.polynomial.mask
        if not 0 <= self.init <= mask:
            raise DomainError(f"Initial value 0x{self.init:x} does not fit in {self.width} bits.")
        if not 0 <= self.xor_out <= mask:
            raise DomainError(f"Final xor 0x{self.xor_out:x} does not fit in {self.width} bits.")

    @property
    def width(self) -> int:
        return self.polynomial.degree

    @classmethod
    def from_catalog(cls, entry: CatalogEntry) -> "CrcConfig":
        return cls(entry.polynomial, entry.init, entry.reflect_in, entry.reflect_out, entry.xor_out)

    def to_dict(self) -> dict:
        return {
            "polynomial": self.polynomial.to_dict(),
            "init": f"0x{self.init:x}",
            "reflect_in": self.reflect_in,
            "reflect_out": self.reflect_out,
            "xor_out": f"0x{self.xor_out:x}",
        }


def reflect(value: int, width: int) -> int:
    """Reverse the low `width` bits of value."""
    result = 0
    for _ in range(width):
        result = (result << 1) | (value & 1)
        value >>= 1
    return result


def message_bits(config: CrcConfig, message: Message) -> List[int]:
    """Turn a message into the bit sequence fed to the register.

    Bytes are expanded MSB first, or LSB first when ``reflect_in`` is set.
    Any other sequence is taken as bits already in wire order.
    """
    if isinstance(message, (bytes, bytearray)):
        bits = []
        for byte in message:
            if config.reflect_in:
                bits.extend((byte >> i) & 1 for i in range(8))
            else:
                bits.extend((byte >> i) & 1 for i in range(7, -1, -1))
        return bits
    return [1 if b else 0 for b in message]


def bits_to_int(bits: Sequence[int]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | (1 if b else 0)
    return value


def int_to_bits(value: int, nbits: int) -> List[int]:
    return [(value >> i) & 1 for i in range(nbits - 1, -1, -1)]


def poly_mod(dividend: int, divisor: int) -> int:
    """Remainder of carry-less (GF(2)) polynomial long division."""
    degree = divisor.bit_length() - 1
    while dividend.bit_length() > degree:
        dividend ^= divisor << (dividend.bit_length() - 1 - degree)
    return dividend


def crc_register(config: CrcConfig, value: int, nbits: int) -> int:
    """Register content after feeding `nbits` bits of `value` (MSB first).

    The direct shift register computes (init * x^n + M(x) * x^r) mod g(x),
    which is what this evaluates by long division.
    """
    r = config.width
    dividend = (config.init << nbits) ^ (value << r)
    return poly_mod(dividend, config.polynomial.full)


def finalize(config: CrcConfig, register: int) -> int:
    if config.reflect_out:
        register = reflect(register, config.width)
    return register ^ config.xor_out


def crc_compute(config: CrcConfig, message: Message) -> int:
    """Compute the r-bit checksum of a message.

    Args:
        config: CRC parameters.
        message: bytes, or a sequence of bits in wire order.

    Returns:
        The checksum as an integer in [0, 2^r).
    """
    bits = message_bits(config, message)
    return finalize(config, crc_register(config, bits_to_int(bits), len(bits)))


def crc_compute_int(config: CrcConfig, value: int, nbits: int) -> int:
    """Checksum of the `nbits`-bit integer `value`, MSB first."""
    return finalize(config, crc_register(config, value, nbits))


def checksum_bits(config: CrcConfig, checksum: int) -> List[int]:
    """Wire order of an appended checksum: LSB first for reflected output."""
    if config.reflect_out:
        return [(checksum >> i) & 1 for i in range(config.width)]
    return int_to_bits(checksum, config.width)


def append_checksum(config: CrcConfig, message: Message) -> List[int]:
    """Return the message bits followed by their checksum in wire order."""
    bits = message_bits(config, message)
    return bits + checksum_bits(config, crc_compute(config, bits))


def crc_residue(config: CrcConfig) -> int:
    """The constant CRC of any error-free frame built with append_checksum."""
    return crc_compute(config, append_checksum(config, []))


def frame_is_valid(config: CrcConfig, frame_bits: Sequence[int]) -> bool:
    """True if a frame built by append_checksum verifies."""
    return crc_compute(config, list(frame_bits)) == crc_residue(config)
