"""Properness of a generator polynomial against the conservative limit 2^-r."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .polynomial import GeneratorPolynomial
from .residual import residual_error_curve, _check_degree
from ..exceptions import DomainError
from ..timing import time_call

logger = logging.getLogger(__name__)

DEFAULT_BEP_GRID = (1e-4, 1e-3, 1e-2, 0.1, 0.25, 0.5)
REFERENCE_BEP = 1e-2

# Relative slack when comparing against 2^-r, so that p = 0.5 values equal to
# 2^-r - 2^-n within rounding are not flagged.
_LIMIT_TOLERANCE = 1e-12


@dataclass
class PropernessReport:
    """Result of evaluating P_ud(n, p) over a length range and a BEP grid."""

    polynomial: GeneratorPolynomial
    n_min: int
    n_max: int
    bep_grid: List[float]
    limit: float
    worst_rp_i: float
    worst_n: int
    worst_p: float
    proper: bool
    configured_bep: Optional[float]
    proper_at_configured_bep: Optional[bool]
    worst_rp_i_at_configured_bep: Optional[float]
    grid_sufficient: bool
    curves: Dict[float, List[float]] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def lengths(self) -> List[int]:
        return list(range(self.n_min, self.n_max + 1))

    def rp_i(self) -> float:
        """RP_I for the rate calculus: worst case over the length range.

        Taken at the configured BEP when one was given, otherwise over the grid.
        """
        if self.worst_rp_i_at_configured_bep is not None:
            return self.worst_rp_i_at_configured_bep
        return self.worst_rp_i

    def to_dict(self) -> dict:
        return {
            "schema": "scla/properness-report/v1",
            "polynomial": self.polynomial.to_dict(),
            "polynomial_text": self.polynomial.to_text(),
            "n_min": self.n_min,
            "n_max": self.n_max,
            "length_convention": "n counts every bit of the codeword: protected data plus signature",
            "bep_grid": list(self.bep_grid),
            "limit": self.limit,
            "worst_case": {"rp_i": self.worst_rp_i, "n": self.worst_n, "p": self.worst_p},
            "proper": self.proper,
            "configured_bep": self.configured_bep,
            "proper_at_configured_bep": self.proper_at_configured_bep,
            "worst_rp_i_at_configured_bep": self.worst_rp_i_at_configured_bep,
            "grid_sufficient": self.grid_sufficient,
            "assumptions": [
                "binary symmetric channel",
                "linear syndrome map (zero-init equivalent); init, reflection and final xor do not change P_ud",
            ],
            "curves": [
                {"p": p, "p_ud": values} for p, values in sorted(self.curves.items())
            ],
            "warnings": list(self.warnings),
        }


def _normalize_grid(bep_grid: Sequence[float], configured_bep: Optional[float]) -> List[float]:
    grid = set()
    for p in bep_grid:
        p = float(p)
        if math.isnan(p) or not 0.0 < p <= 0.5:
            raise DomainError(f"BEP grid values must be in (0, 0.5], got {p}.")
        grid.add(p)
    if configured_bep is not None:
        if not 0.0 < configured_bep <= 0.5:
            raise DomainError(f"Configured BEP must be in (0, 0.5], got {configured_bep}.")
        grid.add(float(configured_bep))
    if not grid:
        raise DomainError("BEP grid is empty.")
    return sorted(grid)


def _worst(curves: Dict[float, List[float]], n_min: int, ps: Sequence[float]) -> Tuple[float, int, float]:
    worst = (-1.0, n_min, ps[0])
    for p in ps:
        for offset, value in enumerate(curves[p]):
            if value > worst[0]:
                worst = (value, n_min + offset, p)
    return worst


@time_call
def properness_check(poly: GeneratorPolynomial,
                     n_min: int,
                     n_max: int,
                     bep_grid: Sequence[float] = DEFAULT_BEP_GRID,
                     configured_bep: Optional[float] = REFERENCE_BEP) -> PropernessReport:
    """Evaluate P_ud on every (n, p) of [n_min, n_max] x grid.

    The polynomial is proper iff no value exceeds 2^-r. The configured BEP
    (default 10^-2) is added to the grid and gets its own verdict as well.

    Raises:
        DegreeTooLargeError: r > 20.
        DomainError: bad range or grid values.
    """
    _check_degree(poly)
    if n_min < 1 or n_max < n_min:
        raise DomainError(f"Length range must satisfy 1 <= n_min <= n_max, got [{n_min}, {n_max}].")

    grid = _normalize_grid(bep_grid, configured_bep)
    limit = math.ldexp(1.0, -poly.degree)
    threshold = limit * (1.0 + _LIMIT_TOLERANCE)

    curves = {}
    for p in grid:
        curve = residual_error_curve(poly, n_max, p)
        curves[p] = curve[n_min - 1:]
        logger.debug(f"{poly}: p={p} max P_ud={max(curves[p]):.3e}")

    worst_value, worst_n, worst_p = _worst(curves, n_min, grid)
    proper = worst_value <= threshold

    proper_cfg = None
    worst_cfg = None
    if configured_bep is not None:
        worst_cfg = max(curves[float(configured_bep)])
        proper_cfg = worst_cfg <= threshold

    warnings = []
    grid_sufficient = any(math.isclose(p, REFERENCE_BEP) for p in grid)
    if not grid_sufficient:
        msg = f"BEP grid does not include the reference BEP {REFERENCE_BEP}; the verdict may be optimistic."
        logger.warning(msg)
        warnings.append(msg)

    if not proper:
        logger.info(f"{poly} is not proper: P_ud({worst_n}, {worst_p}) = {worst_value:.3e} > 2^-{poly.degree}")

    return PropernessReport(
        polynomial=poly,
        n_min=n_min,
        n_max=n_max,
        bep_grid=grid,
        limit=limit,
        worst_rp_i=worst_value,
        worst_n=worst_n,
        worst_p=worst_p,
        proper=proper,
        configured_bep=float(configured_bep) if configured_bep is not None else None,
        proper_at_configured_bep=proper_cfg,
        worst_rp_i_at_configured_bep=worst_cfg,
        grid_sufficient=grid_sufficient,
        curves=curves,
        warnings=warnings,
    )
