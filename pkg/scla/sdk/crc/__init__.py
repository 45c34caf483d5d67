"""CRC engine.

Bit-exact CRC computation and the exact undetected-error probability of a
CRC over the binary symmetric channel, with the properness verdict.
"""

from .polynomial import (
    GeneratorPolynomial,
    CatalogEntry,
    parse_polynomial,
    load_catalog,
    find_catalog_entry,
)
from .compute import (
    CrcConfig,
    crc_compute,
    crc_compute_int,
    append_checksum,
    crc_residue,
    frame_is_valid,
    message_bits,
    reflect,
)
from .residual import (
    MAX_EXACT_DEGREE,
    MAX_BRUTEFORCE_LENGTH,
    residual_error_probability,
    residual_error_probability_bruteforce,
    residual_error_curve,
    syndrome_distribution,
    weight_distribution,
)
from .properness import (
    DEFAULT_BEP_GRID,
    REFERENCE_BEP,
    PropernessReport,
    properness_check,
)

__all__ = [
    "GeneratorPolynomial",
    "CatalogEntry",
    "parse_polynomial",
    "load_catalog",
    "find_catalog_entry",
    "CrcConfig",
    "crc_compute",
    "crc_compute_int",
    "append_checksum",
    "crc_residue",
    "frame_is_valid",
    "message_bits",
    "reflect",
    "MAX_EXACT_DEGREE",
    "MAX_BRUTEFORCE_LENGTH",
    "residual_error_probability",
    "residual_error_probability_bruteforce",
    "residual_error_curve",
    "syndrome_distribution",
    "weight_distribution",
    "DEFAULT_BEP_GRID",
    "REFERENCE_BEP",
    "PropernessReport",
    "properness_check",
]
