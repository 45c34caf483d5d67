"""Discrete-event run of one scenario.

The event clock is a simpy environment counting integer microseconds.
The producer emits at ``t_k = floor(k * 3.6e9 / v)``; every frame is
carried through the hop chain when it is sent and its deliveries are
scheduled at their arrival times. Watchdogs are processes sleeping until
the current deadline, so expiry happens exactly at ``last refresh + timeout``.

Random streams (numpy PCG64) are split from the scenario seed with
``SeedSequence(seed).spawn(1 + 2H + R)`` for H forward and R reverse hops:

    stream 0          producer payloads
    stream 1 + i      forward hop i (loss, duplication, BSC, jitter, reorder)
    stream 1 + H + i  Poisson injectors of forward hop i, spawned again into
                      insertion / masquerade / misrouting
    stream 1 + 2H + j reverse hop j (receipts)

A lost frame (deletion) is scored by what its route does next. It is
detected when the consumer rejects a later frame as stale or replayed,
when the consumer enters safe state, or when it is already in safe state at
the time of the loss. It is harmless when the next accepted frame bridges
the gap, and also when it is still pending at a disconnect or at the end of
the run.
"""

import itertools
import json
import logging
from dataclasses import replace
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, TextIO

import numpy as np
import simpy

from ..crc import MAX_EXACT_DEGREE, residual_error_probability
from ..exceptions import RoamingError
from ..protocol import (
    ConsumerState,
    FaultClass,
    GroundTruth,
    Mode,
    Outcome,
    VerdictReason,
    build_receipt,
    classify_undetected,
    commission_reset,
    consumer_accept,
    disarm,
    enter_safe_state,
    new_consumer,
    new_producer,
    prefix_crc_of_frame,
    producer_frame,
    producer_receipt,
    producer_reset,
    producer_watchdog_tick,
    rearm,
    watchdog_tick,
    worst,
)
from ..roaming import (
    RoamingEvent,
    advance,
    cell_reset,
    cell_safe_state,
    move_device,
    new_roaming_state,
    request_handover,
)
from ..timing import time_call
from .channel import ChannelChain, Delivery, HopChannel, US_PER_HOUR, carry, fault_of, forge_frame, injection_times
from .report import SimReport
from .scenario import Scenario

logger = logging.getLogger(__name__)

SINGLE_ROUTE = ""
INJECTED_CLASSES = (
    (FaultClass.INSERTION, "insertion_rate"),
    (FaultClass.MASQUERADE, "masquerade_rate"),
    (FaultClass.MISROUTING, "misroute_rate"),
)


def _generator(seed_sequence: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence))


def reverse_chain(scenario: Scenario) -> ChannelChain:
    """Receipt path: ``reverse_hops`` if given, else the forward hops without injectors."""
    if scenario.reverse is not None:
        hops = scenario.reverse.hops
    else:
        hops = tuple(replace(h, label=f"{h.label}-reverse") for h in scenario.chain.hops)
    return ChannelChain(tuple(replace(h, insertion_rate=0.0, masquerade_rate=0.0, misroute_rate=0.0)
                              for h in hops))


class Simulation:
    """One deterministic run; build, then call :meth:`run` once."""

    def __init__(self, scenario: Scenario, trace: Optional[TextIO] = None):
        self.scenario = scenario
        self.protocol = scenario.protocol
        self.horizon = scenario.horizon_us
        self.env = simpy.Environment()
        self.trace = trace

        forward = scenario.chain.hops
        backward = reverse_chain(scenario).hops if scenario.protocol.receipt else ()
        streams = np.random.SeedSequence(scenario.seed).spawn(1 + 2 * len(forward) + len(backward))
        self.payload_rng = _generator(streams[0])
        next_id = itertools.count(1).__next__
        self.hops = [HopChannel(model, _generator(streams[1 + i]), next_id) for i, model in enumerate(forward)]
        self.injector_rngs = [
            [_generator(s) for s in streams[1 + len(forward) + i].spawn(len(INJECTED_CLASSES))]
            for i in range(len(forward))
        ]
        self.reverse_hops = [
            HopChannel(model, _generator(streams[1 + 2 * len(forward) + j]), next_id)
            for j, model in enumerate(backward)
        ]

        self.producer = new_producer(self.protocol)
        self.wake: Dict[str, simpy.Event] = {}
        self.producer_wake: Optional[simpy.Event] = None
        self.roaming = None
        self.consumers: Dict[str, ConsumerState] = {}
        if scenario.roaming is None:
            self.consumers[SINGLE_ROUTE] = new_consumer(self.protocol)
        else:
            plan = scenario.roaming
            for cell in plan.config.cells:
                consumer = new_consumer(self.protocol.with_a_code(cell.a_code), name=f"consumer:{cell.cell_id}")
                consumer.armed = False
                self.consumers[cell.cell_id] = consumer
            self.roaming = new_roaming_state(plan.config, plan.start_location, plan.start_connected)
            if plan.start_connected is not None:
                self._connect(plan.start_connected, 0)
            else:
                self.producer.config = self.protocol.with_a_code(plan.config.cells[0].a_code)

        self.report = SimReport(
            name=scenario.name,
            seeds=[scenario.seed],
            horizon_hours=scenario.horizon_hours,
            rate_per_hour=scenario.rate_per_hour,
            frame_bits=self.protocol.frame_bits,
            composed_bep=scenario.chain.composed_bep(),
            confidence=scenario.scoring.confidence,
            ci_method=scenario.scoring.ci_method,
            latency_bound_us=scenario.scoring.latency_bound_us,
            annotation=dict(scenario.annotation),
            config=scenario.config_echo(),
        )
        self.outcomes: Dict[int, Outcome] = {}
        self.pending_deletions: Dict[str, List[int]] = {route: [] for route in self.consumers}
        self.seen_events: Dict[str, int] = {route: 0 for route in self.consumers}
        self.seen_producer_events = 0
        self.in_transit = 0
        self.samples: List[int] = []
        if self.roaming is not None:
            self._handle_roaming(list(self.roaming.events))

    # -- bookkeeping -------------------------------------------------------

    def _trace(self, event: str, **fields: Any) -> None:
        if self.trace is not None:
            record = {"t": self.env.now, "event": event}
            record.update(fields)
            self.trace.write(json.dumps(record, sort_keys=True) + "\n")

    def _score(self, labels, outcome: Outcome) -> None:
        for label in labels:
            self.outcomes[label.injection_id] = worst(self.outcomes.get(label.injection_id), outcome)

    def _resolve_deletions(self, route: str, outcome: Outcome) -> None:
        for injection_id in self.pending_deletions[route]:
            self.outcomes[injection_id] = worst(self.outcomes.get(injection_id), outcome)
        self.pending_deletions[route] = []

    def _collect_deletions(self, hops: List[HopChannel], route: str) -> None:
        for hop in hops:
            for label, delivery in hop.drain_deletions():
                self.pending_deletions[route].append(label.injection_id)
                self._trace("lost", hop=label.hop, seq=delivery.seq)
        if self.consumers[route].mode is Mode.SAFE_STATE:
            self._resolve_deletions(route, Outcome.DETECTED)

    def _kick(self, route: str) -> None:
        event = self.wake.get(route)
        if event is not None and not event.triggered:
            event.succeed()

    def _current_route(self) -> str:
        if self.roaming is None:
            return SINGLE_ROUTE
        return self.roaming.current

    # -- producer ----------------------------------------------------------

    def producer_process(self):
        period = Fraction(US_PER_HOUR) / Fraction(self.scenario.rate_per_hour)
        for k in itertools.count():
            t = int(k * period)
            if t >= self.horizon:
                return
            if t > self.env.now:
                yield self.env.timeout(t - self.env.now)
            self._emit(k)

    def _emit(self, seq: int) -> None:
        now = self.env.now
        frames = self.report.frames
        route = self._current_route()
        if route is None or self.producer.mode is Mode.SAFE_STATE:
            frames["suppressed"] += 1
            return
        payload = self.payload_rng.bytes(self.protocol.payload_bytes)
        frame = producer_frame(self.producer, payload, now)
        frames["emitted"] += 1
        self._trace("emit", seq=seq, t_code=self.producer.t_code, route=route)
        delivery = Delivery(now, frame, (), origin=frame, sent_us=now, seq=seq)
        self._send(carry(self.hops, delivery, now), route)
        self._collect_deletions(self.hops, route)

    def _send(self, deliveries: List[Delivery], route: str) -> None:
        for delivery in deliveries:
            self.in_transit += 1
            timeout = self.env.timeout(delivery.arrival_us - self.env.now)
            timeout.callbacks.append(lambda _, d=delivery, r=route: self._arrive(d, r))

    def producer_watchdog(self):
        while True:
            producer = self.producer
            if producer.mode is Mode.OPERATIONAL and producer.receipt_deadline is not None:
                if self.env.now < producer.receipt_deadline:
                    yield self.env.timeout(producer.receipt_deadline - self.env.now)
                    continue
                producer_watchdog_tick(producer, self.env.now)
                self._after_producer()
            self.producer_wake = self.env.event()
            yield self.producer_wake

    def _after_producer(self) -> None:
        for event in self.producer.events[self.seen_producer_events:]:
            self.report.safe_state_events.append(event.to_dict())
            self._trace("safe_state", source=event.source, reason=event.reason)
            self._schedule_reset(lambda now: self._reset_producer(now))
        self.seen_producer_events = len(self.producer.events)

    def _reset_producer(self, now: int) -> None:
        if producer_reset(self.producer, now):
            if self.producer_wake is not None and not self.producer_wake.triggered:
                self.producer_wake.succeed()

    def _receipt(self, delivery: Delivery) -> None:
        self.in_transit -= 1
        verdict = producer_receipt(self.producer, delivery.frame, self.env.now)
        self._trace("receipt", reason=verdict.reason.value, t_code=verdict.t_code)
        self._after_producer()

    # -- consumer ----------------------------------------------------------

    def _arrive(self, delivery: Delivery, route: str) -> None:
        self.in_transit -= 1
        now = self.env.now
        frames = self.report.frames
        consumer = self.consumers[route]
        if not consumer.armed:
            frames["unroutable"] += 1
            self._trace("unroutable", seq=delivery.seq, route=route)
            return
        frames["offered"] += 1
        if delivery.origin is not None:
            crc = self.report.crc
            crc["offered"] += 1
            if delivery.corrupted:
                crc["corrupted"] += 1
                if prefix_crc_of_frame(consumer.config, delivery.frame):
                    crc["escapes"] += 1
        verdict = consumer_accept(consumer, delivery.frame, now)
        self.report.verdicts[verdict.reason.value] += 1
        truth = GroundTruth(delivery.labels, delivery.corrupted, now - delivery.sent_us > self.scenario.stale_after_us)
        outcome = classify_undetected(truth, verdict)
        self._score(delivery.labels, outcome)
        if verdict.accepted:
            self._resolve_deletions(route, Outcome.HARMLESS)
        elif verdict.reason is VerdictReason.STALE_OR_REPLAYED:
            self._resolve_deletions(route, Outcome.DETECTED)
        if outcome is Outcome.UNDETECTED_DANGEROUS:
            self.report.dangerous_frames += 1
        self._trace("verdict", seq=delivery.seq, route=route, reason=verdict.reason.value,
                    outcome=outcome.value, labels=[l.fault.value for l in delivery.labels])
        if verdict.accepted:
            frames["accepted"] += 1
            if delivery.origin is not None:
                self.samples.append(now - delivery.sent_us)
            if self.protocol.receipt:
                ack = build_receipt(consumer, verdict)
                back = carry(self.reverse_hops, Delivery(now, ack, (), origin=ack, sent_us=now), now)
                for hop in self.reverse_hops:
                    hop.drain_deletions()
                for item in back:
                    self.in_transit += 1
                    timeout = self.env.timeout(item.arrival_us - now)
                    timeout.callbacks.append(lambda _, d=item: self._receipt(d))
        self._after_consumer(route)

    def consumer_watchdog(self, route: str):
        consumer = self.consumers[route]
        while True:
            if consumer.armed and consumer.mode is Mode.OPERATIONAL:
                if self.env.now < consumer.watchdog_deadline:
                    yield self.env.timeout(consumer.watchdog_deadline - self.env.now)
                    continue
                watchdog_tick(consumer, self.env.now)
                self._after_consumer(route)
            self.wake[route] = self.env.event()
            yield self.wake[route]

    def _after_consumer(self, route: str) -> None:
        consumer = self.consumers[route]
        new_events = consumer.events[self.seen_events[route]:]
        self.seen_events[route] = len(consumer.events)
        for event in new_events:
            self.report.safe_state_events.append(event.to_dict())
            self._trace("safe_state", source=event.source, reason=event.reason)
            self._resolve_deletions(route, Outcome.DETECTED)
            if self.roaming is not None:
                self._handle_roaming(cell_safe_state(self.roaming, route, event.time_us, event.reason))
            self._schedule_reset(lambda now, r=route: self._reset_route(r, now))

    def _schedule_reset(self, action: Callable[[int], None]) -> None:
        delay = self.scenario.scoring.reset_after_us
        if delay is None:
            return
        timeout = self.env.timeout(delay)
        timeout.callbacks.append(lambda _: action(self.env.now))

    def _reset_route(self, route: str, now: int) -> None:
        if self.roaming is not None:
            self._handle_roaming(cell_reset(self.roaming, route, now))
            return
        if commission_reset(self.consumers[route], now, self.producer.t_code):
            self._kick(route)

    # -- injectors ---------------------------------------------------------

    def injector(self, index: int, kind: FaultClass, rate: float, rng: np.random.Generator):
        hop = self.hops[index]
        for t in injection_times(rate, rng, 0, self.horizon):
            if t > self.env.now:
                yield self.env.timeout(t - self.env.now)
            route = self._current_route()
            if route is None:
                route = self.roaming.last_connected or self.roaming.config.cells[0].cell_id
            frame = forge_frame(kind, self.consumers[route].config, rng)
            delivery = hop.inject(Delivery(self.env.now, frame, (), origin=None, sent_us=self.env.now), kind)
            self._trace("inject", hop=hop.label, fault=kind.value, route=route)
            self._send(carry(self.hops, delivery, self.env.now, start=index + 1), route)
            self._collect_deletions(self.hops, route)

    # -- roaming -----------------------------------------------------------

    def roaming_process(self):
        state = self.roaming
        for action in self.scenario.roaming.schedule:
            if action.at_us >= self.horizon:
                return
            if action.at_us > self.env.now:
                yield self.env.timeout(action.at_us - self.env.now)
            now = self.env.now
            try:
                if action.action == "handover":
                    self._handle_roaming(request_handover(state, action.target, now))
                    if state.pending is not None:
                        self._schedule_connect(state.pending.ready_us)
                elif action.action == "move":
                    self._handle_roaming(move_device(state, action.target, now))
                else:
                    self._handle_roaming(cell_reset(state, action.target, now))
            except RoamingError as e:
                logger.warning(f"Roaming action {action.action} at {now} us rejected: {e}")
                self.report.warnings.append(f"{now} us: {action.action} rejected: {e}")
                self._record_roaming([RoamingEvent(now, "rejected", action.target, str(e))])

    def _schedule_connect(self, ready_us: int) -> None:
        timeout = self.env.timeout(ready_us - self.env.now)
        timeout.callbacks.append(lambda _: self._handle_roaming(advance(self.roaming, self.env.now)))

    def _record_roaming(self, events: List[RoamingEvent]) -> None:
        for event in events:
            self.report.roaming_events.append(event.to_dict())
            self._trace("roaming", kind=event.kind, cell=event.cell)

    def _connect(self, cell_id: str, now: int) -> None:
        cell = self.roaming.config.cell(cell_id)
        self.producer.config = self.protocol.with_a_code(cell.a_code)
        rearm(self.consumers[cell_id], now, self.producer.t_code)
        self._kick(cell_id)

    def _handle_roaming(self, events: List[RoamingEvent]) -> None:
        self._record_roaming(events)
        for event in events:
            if event.kind == "disconnect":
                disarm(self.consumers[event.cell])
                self.pending_deletions[event.cell] = []
            elif event.kind == "connect":
                self._connect(event.cell, event.time_us)
            elif event.kind == "safe_state":
                enter_safe_state(self.consumers[event.cell], event.time_us, event.detail or "cell safe state")
                self._after_consumer(event.cell)
            elif event.kind == "reset":
                if commission_reset(self.consumers[event.cell], event.time_us, self.producer.t_code):
                    self._kick(event.cell)

    # -- run ---------------------------------------------------------------

    def run(self) -> SimReport:
        env = self.env
        env.process(self.producer_process())
        for route in self.consumers:
            env.process(self.consumer_watchdog(route))
        if self.protocol.receipt:
            env.process(self.producer_watchdog())
        for index, hop in enumerate(self.hops):
            for (kind, attr), rng in zip(INJECTED_CLASSES, self.injector_rngs[index]):
                rate = getattr(hop.model, attr)
                if rate > 0:
                    env.process(self.injector(index, kind, rate, rng))
        if self.roaming is not None and self.scenario.roaming.schedule:
            env.process(self.roaming_process())
        env.run(until=self.horizon)
        return self._finish()

    def _finish(self) -> SimReport:
        report = self.report
        held = sum(len(hop.flush()) for hop in self.hops)
        for hop in self.reverse_hops:
            hop.flush()
        report.frames["in_flight"] = self.in_transit + held
        for hop in self.hops + self.reverse_hops:
            report.hops[hop.label] = hop.ledger
        for hop in self.hops:
            for fault, count in hop.injections.items():
                report.classes[fault.value]["injected"] += count
        for injection_id, outcome in self.outcomes.items():
            if outcome is not Outcome.HARMLESS:
                report.classes[fault_of(injection_id).value][outcome.value] += 1
        for counts in report.classes.values():
            counts["harmless"] = counts["injected"] - counts["detected"] - counts["undetected_dangerous"]
        report.response_samples = np.sort(np.asarray(self.samples, dtype=np.int64))
        polynomial = self.protocol.crc.polynomial
        if polynomial.degree <= MAX_EXACT_DEGREE:
            report.analytic_p_ud = residual_error_probability(polynomial, self.protocol.frame_bits,
                                                              report.composed_bep)
        else:
            report.warnings.append(
                f"r = {polynomial.degree} exceeds the exact analysis limit; analytic P_ud omitted."
            )
        if not report.conservation_ok():
            logger.error("Conservation check failed: ledger or class counts do not balance")
            report.warnings.append("conservation check failed")
        logger.info(
            f"Simulated {report.frames['emitted']} frames over {self.scenario.horizon_hours} h "
            f"(seed {self.scenario.seed}): {report.dangerous_frames} undetected dangerous, "
            f"{len(report.safe_state_events)} safe-state events"
        )
        return report


@time_call
def run_scenario(scenario: Scenario, trace: Optional[TextIO] = None) -> SimReport:
    """Run one scenario; ``trace`` receives NDJSON event records when given.

    Raises:
        SimulationOverflowError: the scenario would exceed 2^63 events.
    """
    scenario.check_capacity()
    return Simulation(scenario, trace).run()
