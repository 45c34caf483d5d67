"""Exact undetected-error probability of a CRC over the binary symmetric channel.

For a codeword of n bits and bit error probability p the CRC misses an error
pattern e exactly when the generator divides e(x). The syndrome map is linear,
so the result does not depend on init, reflection or final xor; everything
here works on error patterns with a zero-initialized register.
"""

import logging
import math
from typing import List, Tuple

import numpy as np

from .polynomial import GeneratorPolynomial
from .compute import poly_mod
from ..exceptions import DegreeTooLargeError, DomainError, LengthTooLargeError

logger = logging.getLogger(__name__)

MAX_EXACT_DEGREE = 20
MAX_BRUTEFORCE_LENGTH = 24


def _check_probability(p: float) -> None:
    if not isinstance(p, (int, float)) or math.isnan(p) or not 0.0 <= p <= 0.5:
        raise DomainError(f"Bit error probability must be in [0, 0.5], got {p}.")


def _check_degree(poly: GeneratorPolynomial) -> None:
    if poly.degree > MAX_EXACT_DEGREE:
        raise DegreeTooLargeError(
            f"Exact residual-error analysis supports r <= {MAX_EXACT_DEGREE} "
            f"(2^r register states); r = {poly.degree}. "
            f"Estimate it by Monte Carlo instead: 'scla sim run' with a corruption-only scenario."
        )


def syndrome_step_table(poly: GeneratorPolynomial) -> np.ndarray:
    """Next register state for every state when a 0 error bit is shifted in.

    Shifting in a 1 yields the same state with bit 0 flipped.
    """
    r = poly.degree
    states = np.arange(1 << r, dtype=np.int64)
    shifted = (states << 1) & poly.mask
    overflow = (states >> (r - 1)) & 1
    return shifted ^ (overflow * poly.coefficients)


def syndrome_distribution(poly: GeneratorPolynomial, n: int, p: float) -> Tuple[np.ndarray, float]:
    """Distribution of the register state after n error bits.

    Returns ``(nonzero, zero_mass)``: ``nonzero[s]`` is the probability that
    the error pattern is nonzero and leaves syndrome s; ``zero_mass`` is the
    probability (1-p)^n of the all-zero pattern (which sits in state 0).
    Keeping the all-zero pattern apart avoids subtracting (1-p)^n from a
    nearly equal number when p is tiny.
    """
    _check_degree(poly)
    _check_probability(p)
    if n < 0:
        raise DomainError(f"Length must be >= 0, got {n}.")

    size = 1 << poly.degree
    step0 = syndrome_step_table(poly)
    step1 = step0 ^ 1
    q = 1.0 - p
    nonzero = np.zeros(size, dtype=np.float64)
    zero_mass = 1.0
    for _ in range(n):
        nonzero = (np.bincount(step0, weights=nonzero * q, minlength=size)
                   + np.bincount(step1, weights=nonzero * p, minlength=size))
        # the first error bit of an all-zero prefix lands in state 1
        nonzero[1] += zero_mass * p
        zero_mass *= q
    return nonzero, zero_mass


def residual_error_curve(poly: GeneratorPolynomial, n_max: int, p: float) -> List[float]:
    """P_ud(n, p) for n = 1 .. n_max in a single pass.

    Element i of the result is the value for n = i + 1.
    """
    _check_degree(poly)
    _check_probability(p)
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}.")

    size = 1 << poly.degree
    step0 = syndrome_step_table(poly)
    step1 = step0 ^ 1
    q = 1.0 - p
    nonzero = np.zeros(size, dtype=np.float64)
    zero_mass = 1.0
    curve = []
    for _ in range(n_max):
        nonzero = (np.bincount(step0, weights=nonzero * q, minlength=size)
                   + np.bincount(step1, weights=nonzero * p, minlength=size))
        nonzero[1] += zero_mass * p
        zero_mass *= q
        curve.append(min(1.0, max(0.0, float(nonzero[0]))))
    return curve


def residual_error_probability(poly: GeneratorPolynomial, n: int, p: float) -> float:
    """Probability that a nonzero BSC error pattern of n bits goes undetected.

    Args:
        poly: generator polynomial, r <= 20.
        n: codeword length in bits (protected data plus signature), n >= 1.
        p: bit error probability in [0, 0.5].

    Raises:
        DegreeTooLargeError: r > 20; use the simulator's Monte Carlo estimate.
        DomainError: p outside [0, 0.5] or n < 1.
    """
    if n < 1:
        _check_degree(poly)
        raise DomainError(f"Length must be >= 1, got {n}.")
    if p == 0:
        _check_degree(poly)
        return 0.0
    nonzero, _ = syndrome_distribution(poly, n, p)
    return min(1.0, max(0.0, float(nonzero[0])))


def _pattern_syndromes(poly: GeneratorPolynomial, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Syndrome and Hamming weight of every error pattern of length n.

    Pattern index bit k (LSB = last transmitted bit) stands for x^k; its
    syndrome is x^k mod g computed by long division.
    """
    size = 1 << n
    syndromes = np.zeros(size, dtype=np.int64)
    weights = np.zeros(size, dtype=np.int64)
    for k in range(n):
        s_k = poly_mod(1 << k, poly.full)
        half = 1 << k
        syndromes[half:2 * half] = syndromes[:half] ^ s_k
        weights[half:2 * half] = weights[:half] + 1
    return syndromes, weights


def weight_distribution(poly: GeneratorPolynomial, n: int) -> List[int]:
    """Number A_w of undetected (nonzero, zero-syndrome) patterns of weight w.

    Element w of the result is A_w for w = 0 .. n (A_0 is always 0).
    """
    if n > MAX_BRUTEFORCE_LENGTH:
        raise LengthTooLargeError(
            f"Enumeration supports n <= {MAX_BRUTEFORCE_LENGTH} (2^n patterns); n = {n}."
        )
    if n < 0:
        raise DomainError(f"Length must be >= 0, got {n}.")
    syndromes, weights = _pattern_syndromes(poly, n)
    undetected = weights[(syndromes == 0)]
    counts = np.bincount(undetected, minlength=n + 1)
    counts[0] = 0
    return [int(c) for c in counts]


def residual_error_probability_bruteforce(poly: GeneratorPolynomial, n: int, p: float) -> float:
    """Same quantity as residual_error_probability, by enumerating all 2^n patterns.

    Raises:
        LengthTooLargeError: n > 24.
    """
    if n > MAX_BRUTEFORCE_LENGTH:
        raise LengthTooLargeError(
            f"Brute-force enumeration supports n <= {MAX_BRUTEFORCE_LENGTH}; n = {n}."
        )
    _check_probability(p)
    if p == 0:
        return 0.0
    counts = weight_distribution(poly, n)
    q = 1.0 - p
    return float(sum(a * p ** w * q ** (n - w) for w, a in enumerate(counts) if a))
