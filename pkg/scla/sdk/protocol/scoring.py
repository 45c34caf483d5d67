"""Bridge between injector ground truth and consumer verdicts."""

from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Optional, Tuple

from .consumer import Verdict
from ..exceptions import AccountingError


class FaultClass(str, Enum):
    """The eight communication error classes."""

    REPETITION = "repetition"
    DELETION = "deletion"
    INSERTION = "insertion"
    INCORRECT_SEQUENCE = "incorrect_sequence"
    CORRUPTION = "corruption"
    DELAY = "delay"
    MASQUERADE = "masquerade"
    MISROUTING = "misrouting"


class Outcome(str, Enum):
    DETECTED = "detected"
    UNDETECTED_DANGEROUS = "undetected_dangerous"
    HARMLESS = "harmless"


# Frames that never came from the producer are dangerous whenever accepted.
FORGED_CLASSES = frozenset({FaultClass.INSERTION, FaultClass.MASQUERADE, FaultClass.MISROUTING})

# worst first
OUTCOME_SEVERITY = {Outcome.HARMLESS: 0, Outcome.DETECTED: 1, Outcome.UNDETECTED_DANGEROUS: 2}


@dataclass(frozen=True)
class FaultLabel:
    fault: FaultClass
    injection_id: int
    hop: str = ""


@dataclass(frozen=True)
class GroundTruth:
    """What actually happened to one delivered frame.

    ``corrupted`` compares the delivered bits with the bits the producer sent;
    ``stale`` means the frame was older than the watchdog timeout on arrival.
    """

    labels: Tuple[FaultLabel, ...] = ()
    corrupted: bool = False
    stale: bool = False

    @property
    def faults(self) -> FrozenSet[FaultClass]:
        return frozenset(label.fault for label in self.labels)


def classify_undetected(truth: Optional[GroundTruth], verdict: Verdict) -> Outcome:
    """Score one consumer verdict against the frame's ground truth.

    Raises:
        AccountingError: the frame carries no ground truth.
    """
    if truth is None:
        raise AccountingError("Frame reached the consumer without ground-truth labels.")
    faults = truth.faults
    if verdict.accepted:
        if truth.corrupted or truth.stale or faults & FORGED_CLASSES:
            return Outcome.UNDETECTED_DANGEROUS
        return Outcome.HARMLESS
    if not faults or faults == {FaultClass.REPETITION}:
        return Outcome.HARMLESS
    return Outcome.DETECTED


def worst(a: Optional[Outcome], b: Outcome) -> Outcome:
    if a is None or OUTCOME_SEVERITY[b] > OUTCOME_SEVERITY[a]:
        return b
    return a
