"""Wall-clock accounting for the expensive analysis and simulation calls."""

import time
import logging
from functools import wraps
from typing import Dict

logger = logging.getLogger(__name__)

# function name -> {"calls": int, "seconds": float}
_call_stats: Dict[str, Dict[str, float]] = {}


def get_call_stats() -> Dict[str, Dict[str, float]]:
    """Call counts and cumulative seconds per timed function."""
    return {name: dict(s) for name, s in _call_stats.items()}


def reset_call_stats():
    _call_stats.clear()


def time_call(func):
    """Count calls to `func` and accumulate their duration, logged at DEBUG."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        name = func.__name__
        stats = _call_stats.setdefault(name, {"calls": 0, "seconds": 0.0})
        stats["calls"] += 1
        start = time.perf_counter()
        outcome = "failed"
        try:
            result = func(*args, **kwargs)
            outcome = "completed"
            return result
        finally:
            duration = time.perf_counter() - start
            stats["seconds"] += duration
            logger.debug(f"{name} {outcome} in {duration:.4f}s")
    return wrapper
