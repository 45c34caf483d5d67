"""Black channel hops as parameterized error processes.

A hop applies, in this order, to every frame it carries:

1. impairment windows (``silence`` loses the frame, ``hold`` delays it to the window end)
2. loss with ``loss_prob``
3. duplication with ``dup_prob`` (the extra copy is labeled repetition)
4. per copy: BSC bit flips with ``bep``
5. per copy: latency ``base + U{0..jitter}`` plus ``delay_extra`` with ``delay_prob``
6. per copy: with ``reorder_prob`` the copy is held and released just after
   the next frame the hop carries (delay-swap of adjacent frames)

Insertion, masquerade and misrouting are Poisson processes in simulated
time (see :func:`injection_times` and :func:`forge_frame`).

Times are integer microseconds.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DomainError
from ..protocol import FaultClass, FaultLabel, Frame, ProtocolConfig, build_pdu, encode_pdu

logger = logging.getLogger(__name__)

US_PER_MS = 1_000
US_PER_HOUR = 3_600_000_000

IMPAIRMENT_KINDS = ("silence", "hold")

# injection ids carry their fault class: id % 8 indexes this tuple
FAULT_ORDER = tuple(FaultClass)


def fault_of(injection_id: int) -> FaultClass:
    return FAULT_ORDER[injection_id % len(FAULT_ORDER)]


def ms_to_us(value_ms: float) -> int:
    return int(round(value_ms * US_PER_MS))


@dataclass(frozen=True)
class Impairment:
    """Deterministic window on a hop: frames sent in [start, end) are lost or held."""

    kind: str
    start_us: int
    end_us: int

    def __post_init__(self):
        if self.kind not in IMPAIRMENT_KINDS:
            raise DomainError(f"Impairment kind must be one of {IMPAIRMENT_KINDS}, got {self.kind!r}.")
        if not 0 <= self.start_us < self.end_us:
            raise DomainError(f"Impairment window needs 0 <= start < end, got [{self.start_us}, {self.end_us}).")

    def covers(self, now: int) -> bool:
        return self.start_us <= now < self.end_us

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "start_us": self.start_us, "end_us": self.end_us}


@dataclass(frozen=True)
class ChannelModel:
    label: str = "hop"
    bep: float = 0.0
    loss_prob: float = 0.0
    dup_prob: float = 0.0
    reorder_prob: float = 0.0
    base_latency_us: int = 0
    jitter_us: int = 0
    delay_prob: float = 0.0
    delay_extra_us: int = 0
    insertion_rate: float = 0.0
    masquerade_rate: float = 0.0
    misroute_rate: float = 0.0
    impairments: Tuple[Impairment, ...] = ()

    def __post_init__(self):
        for name in ("loss_prob", "dup_prob", "reorder_prob", "delay_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{self.label}.{name} must be in [0, 1], got {value}.")
        if not 0.0 <= self.bep <= 0.5:
            raise DomainError(f"{self.label}.bep must be in [0, 0.5], got {self.bep}.")
        for name in ("base_latency_us", "jitter_us", "delay_extra_us"):
            if getattr(self, name) < 0:
                raise DomainError(f"{self.label}.{name} must be >= 0.")
        for name in ("insertion_rate", "masquerade_rate", "misroute_rate"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise DomainError(f"{self.label}.{name} must be a finite rate >= 0 per hour, got {value}.")

    @property
    def is_identity(self) -> bool:
        return (self.bep == 0 and self.loss_prob == 0 and self.dup_prob == 0 and self.reorder_prob == 0
                and self.jitter_us == 0 and self.delay_prob == 0 and not self.impairments
                and self.insertion_rate == 0 and self.masquerade_rate == 0 and self.misroute_rate == 0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "bep": self.bep,
            "loss_prob": self.loss_prob,
            "dup_prob": self.dup_prob,
            "reorder_prob": self.reorder_prob,
            "base_latency_us": self.base_latency_us,
            "jitter_us": self.jitter_us,
            "delay_prob": self.delay_prob,
            "delay_extra_us": self.delay_extra_us,
            "insertion_rate": self.insertion_rate,
            "masquerade_rate": self.masquerade_rate,
            "misroute_rate": self.misroute_rate,
            "impairments": [i.to_dict() for i in self.impairments],
        }


@dataclass(frozen=True)
class Delivery:
    """A frame in transit together with its ground truth.

    ``origin`` is the frame as the producer sent it (None for forged frames);
    ``sent_us`` is the producer emission time, or the injection time.
    """

    arrival_us: int
    frame: Frame
    labels: Tuple[FaultLabel, ...] = ()
    origin: Optional[Frame] = None
    sent_us: int = 0
    seq: int = 0

    def with_label(self, fault: FaultClass, injection_id: int, hop: str) -> "Delivery":
        return replace(self, labels=self.labels + (FaultLabel(fault, injection_id, hop),))

    @property
    def corrupted(self) -> bool:
        return self.origin is not None and self.frame != self.origin


@dataclass
class HopLedger:
    """Conservation per hop: received + duplicated + injected == delivered + lost + held."""

    received: int = 0
    duplicated: int = 0
    injected: int = 0
    delivered: int = 0
    lost: int = 0
    held: int = 0
    corrupted: int = 0
    bit_flips: int = 0

    def balanced(self) -> bool:
        return self.received + self.duplicated + self.injected == self.delivered + self.lost + self.held

    def merge(self, other: "HopLedger") -> "HopLedger":
        return HopLedger(**{k: getattr(self, k) + getattr(other, k) for k in self.__dataclass_fields__})

    def to_dict(self) -> Dict[str, int]:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def flip_mask(rng: np.random.Generator, nbits: int, bep: float) -> Tuple[int, int]:
    """Return (mask, flips) for one BSC pass over ``nbits`` bits."""
    if bep <= 0 or nbits == 0:
        return 0, 0
    flips = int(rng.binomial(nbits, bep))
    if flips == 0:
        return 0, 0
    mask = 0
    for position in rng.choice(nbits, size=flips, replace=False):
        mask |= 1 << int(position)
    return mask, flips


def random_bits(rng: np.random.Generator, nbits: int) -> int:
    if nbits <= 0:
        return 0
    return int.from_bytes(rng.bytes((nbits + 7) // 8), "big") & ((1 << nbits) - 1)


class HopChannel:
    """Runtime of one hop: its model, its random stream and its ledger."""

    def __init__(self, model: ChannelModel, rng: np.random.Generator,
                 next_id: Optional[Callable[[], int]] = None):
        self.model = model
        self.rng = rng
        self.ledger = HopLedger()
        self.deletions: List[Tuple[FaultLabel, Delivery]] = []
        self._held: List[Delivery] = []
        self._next_id = next_id or itertools.count(1).__next__
        self.injections: Counter = Counter()

    @property
    def label(self) -> str:
        return self.model.label

    def _new_injection(self, fault: FaultClass) -> int:
        self.injections[fault] += 1
        return self._next_id() * len(FAULT_ORDER) + FAULT_ORDER.index(fault)

    def _label(self, delivery: Delivery, fault: FaultClass) -> Delivery:
        return delivery.with_label(fault, self._new_injection(fault), self.label)

    def _lose(self, delivery: Delivery) -> None:
        self.ledger.lost += 1
        if delivery.origin is not None:
            label = FaultLabel(FaultClass.DELETION, self._new_injection(FaultClass.DELETION), self.label)
            self.deletions.append((label, delivery))

    def transmit(self, delivery: Delivery, now: int) -> List[Delivery]:
        """Carry one frame entering the hop at ``now``; returns what leaves it.

        The returned list may also contain a previously held (reordered)
        frame, released just after this one.
        """
        model = self.model
        rng = self.rng
        self.ledger.received += 1
        window = next((w for w in model.impairments if w.covers(now)), None)
        if window is not None and window.kind == "silence":
            self._lose(delivery)
            return self._release_held([])
        if model.loss_prob and rng.random() < model.loss_prob:
            self._lose(delivery)
            return self._release_held([])
        copies = [delivery]
        if model.dup_prob and rng.random() < model.dup_prob:
            self.ledger.duplicated += 1
            copies.append(self._label(delivery, FaultClass.REPETITION))
        out = []
        for copy in copies:
            mask, flips = flip_mask(rng, copy.frame.nbits, model.bep)
            if flips:
                copy = self._label(replace(copy, frame=copy.frame.flip(mask)), FaultClass.CORRUPTION)
                self.ledger.corrupted += 1
                self.ledger.bit_flips += flips
            arrival = now + model.base_latency_us
            if model.jitter_us:
                arrival += int(rng.integers(0, model.jitter_us + 1))
            if model.delay_prob and rng.random() < model.delay_prob:
                arrival += model.delay_extra_us
                copy = self._label(copy, FaultClass.DELAY)
            if window is not None and window.kind == "hold" and arrival < window.end_us:
                arrival = window.end_us
                copy = self._label(copy, FaultClass.DELAY)
            copy = replace(copy, arrival_us=arrival)
            if model.reorder_prob and rng.random() < model.reorder_prob:
                self._held.append(copy)
                self.ledger.held += 1
                continue
            out.append(copy)
        return self._release_held(out)

    def _release_held(self, out: List[Delivery]) -> List[Delivery]:
        if not out or not self._held:
            self.ledger.delivered += len(out)
            return out
        latest = max(d.arrival_us for d in out)
        released = [
            self._label(replace(d, arrival_us=max(d.arrival_us, latest + 1)), FaultClass.INCORRECT_SEQUENCE)
            for d in self._held
        ]
        self.ledger.held -= len(self._held)
        self._held = []
        out = out + released
        self.ledger.delivered += len(out)
        return out

    def flush(self) -> List[Delivery]:
        """Release frames still held for reordering, at their own arrival times."""
        released = self._held
        self._held = []
        self.ledger.held -= len(released)
        self.ledger.delivered += len(released)
        return released

    def inject(self, delivery: Delivery, fault: FaultClass) -> Delivery:
        """Account a forged frame appearing at this hop's output."""
        self.ledger.injected += 1
        self.ledger.delivered += 1
        return self._label(delivery, fault)

    def drain_deletions(self) -> List[Tuple[FaultLabel, Delivery]]:
        drained = self.deletions
        self.deletions = []
        return drained


def transmit(hop: HopChannel, delivery: Delivery, now: int) -> List[Delivery]:
    return hop.transmit(delivery, now)


@dataclass(frozen=True)
class ChannelChain:
    """Ordered hops; delays add and labels accumulate along the path."""

    hops: Tuple[ChannelModel, ...]

    @property
    def base_latency_us(self) -> int:
        return sum(h.base_latency_us for h in self.hops)

    @property
    def labels(self) -> List[str]:
        return [h.label for h in self.hops]

    def composed_bep(self) -> float:
        return compose_bep([h.bep for h in self.hops])

    def delivery_probability(self) -> float:
        """End-to-end probability that a frame is not lost (ignoring impairment windows)."""
        probability = 1.0
        for hop in self.hops:
            probability *= 1.0 - hop.loss_prob
        return probability

    def to_dict(self) -> List[Dict[str, Any]]:
        return [h.to_dict() for h in self.hops]


def compose(hops: Sequence[ChannelModel]) -> ChannelChain:
    """Chain hops in order.

    Raises:
        DomainError: empty chain or duplicate hop labels.
    """
    hops = tuple(hops)
    if not hops:
        raise DomainError("A channel chain needs at least one hop.")
    labels = [h.label for h in hops]
    if len(set(labels)) != len(labels):
        raise DomainError(f"Hop labels must be unique, got {labels}.")
    return ChannelChain(hops)


def compose_bep(beps: Sequence[float]) -> float:
    """Per-bit flip probability after several BSC passes: b1(1-b2) + b2(1-b1), folded."""
    total = 0.0
    for b in beps:
        total = total * (1.0 - b) + b * (1.0 - total)
    return total


def carry(hops: Sequence[HopChannel], delivery: Delivery, now: int, start: int = 0) -> List[Delivery]:
    """Send a frame through ``hops[start:]``; each hop sees the frame at its arrival time."""
    in_transit = [replace(delivery, arrival_us=now)]
    for hop in hops[start:]:
        out = []
        for item in in_transit:
            out.extend(hop.transmit(item, item.arrival_us))
        in_transit = out
    return in_transit


def injection_times(rate_per_hour: float, rng: np.random.Generator,
                    start_us: int, until_us: int) -> Iterator[int]:
    """Arrival times (integer us) of a Poisson process over [start, until)."""
    if rate_per_hour <= 0:
        return
    mean_gap_us = US_PER_HOUR / rate_per_hour
    now = float(start_us)
    while True:
        now += rng.exponential(mean_gap_us)
        if now >= until_us:
            return
        yield int(now)


def forge_frame(kind: FaultClass, config: ProtocolConfig, rng: np.random.Generator) -> Frame:
    """Build a frame that never came from the producer.

    insertion  : own A-code, random T-code and payload, valid CRC
    masquerade : every field drawn at random
    misrouting : another connection's A-code, random T-code, valid CRC
    """
    if kind is FaultClass.MASQUERADE:
        return Frame(random_bits(rng, config.frame_bits), config.frame_bits)
    t_code = random_bits(rng, config.lt_bits)
    payload = bytes(int(b) for b in rng.integers(0, 256, size=config.payload_bytes))
    if kind is FaultClass.INSERTION:
        return encode_pdu(config, build_pdu(config, t_code, payload))
    if kind is FaultClass.MISROUTING:
        return encode_pdu(config, build_pdu(config, t_code, payload, a_code=_other_a_code(config, rng)))
    raise DomainError(f"Cannot forge a frame for fault class {kind.value}.")


def _other_a_code(config: ProtocolConfig, rng: np.random.Generator) -> int:
    if config.la_bits == 0:
        return config.a_code
    while True:
        a_code = random_bits(rng, config.la_bits)
        if a_code != config.a_code:
            return a_code
