"""Generator polynomials: representation, parsing and the shipped catalog.

A polynomial of degree r is stored as the bitmask of its r low-order
coefficients in normal (MSB-first) notation; the leading x^r term is implicit.
Bit 0 of the mask is the constant term x^0. Example: CRC-16/CCITT
x^16 + x^12 + x^5 + 1 is ``GeneratorPolynomial(16, 0x1021)``.
"""

import re
import logging
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Dict, Optional

import yaml

from ..exceptions import PolynomialParseError, DomainError

logger = logging.getLogger(__name__)

MAX_CRC_DEGREE = 64

# "r=16, 0x1021" ; "r = 3 , 0b011" ; "16:0x1021"
_POLY_PATTERN = re.compile(
    r'^\s*(?:r\s*=\s*)?(?P<degree>\d+)\s*[,:]\s*(?P<mask>0[xX][0-9a-fA-F]+|0[bB][01]+|\d+)\s*$'
)


@dataclass(frozen=True)
class GeneratorPolynomial:
    """Binary generator polynomial of degree r (leading term implicit)."""

    degree: int
    coefficients: int

    def __post_init__(self):
        if not isinstance(self.degree, int) or not 1 <= self.degree <= MAX_CRC_DEGREE:
            raise DomainError(f"Polynomial degree must be in [1, {MAX_CRC_DEGREE}], got {self.degree}.")
        if not 0 <= self.coefficients < (1 << self.degree):
            raise DomainError(
                f"Coefficient mask 0x{self.coefficients:x} does not fit in {self.degree} bits."
            )

    @property
    def mask(self) -> int:
        """All-ones word of r bits."""
        return (1 << self.degree) - 1

    @property
    def full(self) -> int:
        """The polynomial including its x^r term, as an (r+1)-bit integer."""
        return (1 << self.degree) | self.coefficients

    @property
    def has_constant_term(self) -> bool:
        return bool(self.coefficients & 1)

    @property
    def term_count(self) -> int:
        return bin(self.full).count("1")

    def to_text(self) -> str:
        width = max(1, (self.degree + 3) // 4)
        return f"r={self.degree}, 0x{self.coefficients:0{width}x}"

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coefficients": f"0x{self.coefficients:x}",
            "constant_term": self.has_constant_term,
            "notation": "normal (MSB-first), x^r implicit, bit 0 = x^0",
        }

    def __str__(self) -> str:
        return self.to_text()


def parse_polynomial(text: str, line: int = 1) -> GeneratorPolynomial:
    """Parse the textual polynomial form ``r=<degree>, <mask>``.

    The mask may be hex (0x...), binary (0b...) or decimal. A catalog name
    (e.g. ``CRC-16/XMODEM``) is accepted as well.

    Raises:
        PolynomialParseError: with the line and 1-based column of the problem.
    """
    if not isinstance(text, str) or not text.strip():
        raise PolynomialParseError("Empty polynomial", text or "", line, 1)

    entry = find_catalog_entry(text.strip())
    if entry is not None:
        return entry.polynomial

    match = _POLY_PATTERN.match(text)
    if not match:
        raise PolynomialParseError(
            "Expected 'r=<degree>, <hex mask>' or a catalog name",
            text, line, _error_column(text),
        )

    degree = int(match.group("degree"))
    mask_text = match.group("mask")
    mask = int(mask_text, 0) if mask_text[:2].lower() in ("0x", "0b") else int(mask_text)
    try:
        return GeneratorPolynomial(degree, mask)
    except DomainError as e:
        column = match.start("mask") + 1 if degree >= 1 and degree <= MAX_CRC_DEGREE else match.start("degree") + 1
        raise PolynomialParseError(str(e), text, line, column) from e


def _error_column(text: str) -> int:
    """Best-effort 1-based column of the first character that breaks the grammar."""
    i = 0
    n = len(text)
    while i < n and text[i].isspace():
        i += 1
    if text[i:i + 1].lower() == "r":
        i += 1
        while i < n and text[i].isspace():
            i += 1
        if text[i:i + 1] != "=":
            return i + 1
        i += 1
        while i < n and text[i].isspace():
            i += 1
    start = i
    while i < n and text[i].isdigit():
        i += 1
    if i == start:
        return i + 1
    while i < n and text[i].isspace():
        i += 1
    if text[i:i + 1] not in (",", ":"):
        return i + 1
    i += 1
    while i < n and text[i].isspace():
        i += 1
    token_start = i
    if text[i:i + 2].lower() == "0x":
        i += 2
        allowed = "0123456789abcdefABCDEF"
    elif text[i:i + 2].lower() == "0b":
        i += 2
        allowed = "01"
    else:
        allowed = "0123456789"
    digits_start = i
    while i < n and text[i] in allowed:
        i += 1
    if i == digits_start:
        return (i + 1) if i < n else token_start + 1
    return i + 1


@dataclass(frozen=True)
class CatalogEntry:
    """A named CRC variant shipped as data."""

    name: str
    polynomial: GeneratorPolynomial
    init: int
    reflect_in: bool
    reflect_out: bool
    xor_out: int
    check: Optional[int]
    note: str = ""


@lru_cache(maxsize=1)
def load_catalog() -> Dict[str, CatalogEntry]:
    """Load the shipped CRC catalog (catalog.yaml), keyed by upper-case name."""
    text = resources.files(__package__).joinpath("catalog.yaml").read_text()
    raw = yaml.safe_load(text) or {}
    catalog = {}
    for item in raw.get("crcs", []):
        poly = GeneratorPolynomial(int(item["width"]), int(item["poly"]))
        entry = CatalogEntry(
            name=item["name"],
            polynomial=poly,
            init=int(item.get("init", 0)),
            reflect_in=bool(item.get("refin", False)),
            reflect_out=bool(item.get("refout", False)),
            xor_out=int(item.get("xorout", 0)),
            check=int(item["check"]) if item.get("check") is not None else None,
            note=item.get("note", ""),
        )
        catalog[entry.name.upper()] = entry
    logger.debug(f"Loaded {len(catalog)} CRC catalog entries.")
    return catalog


def find_catalog_entry(name: str) -> Optional[CatalogEntry]:
    return load_catalog().get(name.upper())
