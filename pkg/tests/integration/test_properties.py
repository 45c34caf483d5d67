"""
Integration tests: randomized property runs of the protocol and roaming machines.

Each test draws ``sizes.property_runs`` independent cases from a fixed
seed, so failures reproduce. A failing case reports its index and the
parameters that produced it.
"""

import numpy as np
import pytest

from scla.sdk.exceptions import TransitionNotAllowedError
from scla.sdk.protocol import (
    Mode,
    ProtocolConfig,
    VerdictReason,
    build_pdu,
    consumer_accept,
    encode_pdu,
    enter_safe_state,
    new_consumer,
    new_producer,
    producer_frame,
)
from scla.sdk.roaming import (
    Cell,
    RoamingConfig,
    advance,
    cell_reset,
    cell_safe_state,
    check_invariants,
    move_device,
    new_roaming_state,
    request_handover,
)


def random_config(rng: np.random.Generator) -> ProtocolConfig:
    la_bits = int(rng.integers(0, 17))
    lt_bits = int(rng.integers(1, 17))
    payload_bytes = int(rng.integers(0, 9))
    marker_bits = int(rng.integers(0, 5))
    return ProtocolConfig(
        a_code=int(rng.integers(0, 1 << la_bits)) if la_bits else 0,
        la_bits=la_bits,
        lt_bits=lt_bits,
        w=int(rng.integers(1, 1 << lt_bits)) if lt_bits > 1 else 1,
        payload_bytes=payload_bytes,
        inverted_counter=bool(rng.integers(0, 2)),
        marker_bits=marker_bits,
        marker_value=int(rng.integers(0, 1 << marker_bits)) if marker_bits else 0,
        lr_bits=int(rng.integers(0, 8 * payload_bytes + 1)),
        cross_check=("inverted", "copy")[int(rng.integers(0, 2))],
        watchdog_timeout_us=10 ** 12,
        initial_t_code=int(rng.integers(0, 1 << lt_bits)),
    )


@pytest.mark.integration
@pytest.mark.slow
def test_built_pdus_pass_on_a_perfect_channel(sizes):
    """
    Every frame the producer builds is accepted by a matching consumer,
    while a single-bit corruption of it or a copy carrying another A-code
    is always rejected. Safe state then rejects everything.
    """
    rng = np.random.default_rng(20240101)
    for case in range(sizes["property_runs"]):
        config = random_config(rng)
        producer = new_producer(config)
        consumer = new_consumer(config)
        for step in range(3):
            payload = rng.bytes(int(rng.integers(0, config.payload_bytes + 1)))
            frame = producer_frame(producer, payload, step)

            flipped = frame.flip(1 << int(rng.integers(0, frame.nbits)))
            verdict = consumer_accept(consumer, flipped, step)
            assert not verdict.accepted, f"case {case}: {config} single-bit flip accepted"

            if config.la_bits:
                other = (config.a_code + 1 + int(rng.integers(0, (1 << config.la_bits) - 1))) % (1 << config.la_bits)
                forged = encode_pdu(config, build_pdu(config, producer.t_code, payload, a_code=other))
                verdict = consumer_accept(consumer, forged, step)
                assert verdict.reason is VerdictReason.BAD_AUTHENTICITY, f"case {case}: {config} -> {verdict.reason}"

            verdict = consumer_accept(consumer, frame, step)
            assert verdict.accepted, f"case {case}: {config} step {step} -> {verdict.reason}"
        assert consumer.last_t_code == producer.t_code

        enter_safe_state(consumer, 10, "test")
        verdict = consumer_accept(consumer, producer_frame(producer, b"", 11), 11)
        assert verdict.reason is VerdictReason.SAFE_STATE
        assert consumer.mode is Mode.SAFE_STATE


@pytest.mark.integration
@pytest.mark.slow
def test_acceptance_window_matches_reference_model(sizes):
    """
    Validly signed frames with arbitrary T-codes are accepted exactly when
    the code lies in (last, last + w] modulo 2^LT, and only acceptance
    moves the window.
    """
    rng = np.random.default_rng(77)
    for case in range(sizes["property_runs"]):
        lt_bits = int(rng.integers(1, 9))
        modulus = 1 << lt_bits
        w = int(rng.integers(1, modulus))
        config = ProtocolConfig(a_code=3, la_bits=4, lt_bits=lt_bits, w=w, payload_bytes=1,
                                watchdog_timeout_us=10 ** 12)
        consumer = new_consumer(config)
        last = config.initial_t_code
        for step in range(4):
            t_code = int(rng.integers(0, modulus))
            verdict = consumer_accept(consumer, encode_pdu(config, build_pdu(config, t_code, b"\x00")), step)
            expected = 1 <= (t_code - last) % modulus <= w
            assert verdict.accepted == expected, f"case {case}: LT={lt_bits} w={w} last={last} t={t_code}"
            if expected:
                last = t_code
            else:
                assert verdict.reason is VerdictReason.STALE_OR_REPLAYED
            assert consumer.last_t_code == last
            assert consumer.mode is Mode.OPERATIONAL


@pytest.mark.integration
@pytest.mark.slow
def test_roaming_invariants_hold(sizes):
    """At most one connection; a device inside an unconnected safety cell finds it in safe state."""
    config = RoamingConfig.build(
        [Cell("C1", 11), Cell("C2", 12), Cell("C3", 13), Cell("C4", 14), Cell("hall", 0, safety=False)],
        transitions=[("C1", "C2"), ("C2", "C3"), ("C3", "C4"), ("C1", "C4")],
        commissioning_delay_us=80_000,
    )
    cells = config.cell_ids
    locations = [None] + cells
    rng = np.random.default_rng(31337)
    for case in range(sizes["property_runs"]):
        start = cells[int(rng.integers(0, len(cells)))]
        state = new_roaming_state(config, location=None, connected=start)
        now = 0
        for _ in range(8):
            now += int(rng.integers(0, 120_000))
            action = int(rng.integers(0, 5))
            if action == 0:
                try:
                    request_handover(state, cells[int(rng.integers(0, len(cells)))], now)
                except TransitionNotAllowedError:
                    pass
            elif action == 1:
                move_device(state, locations[int(rng.integers(0, len(locations)))], now)
            elif action == 2:
                cell_reset(state, cells[int(rng.integers(0, len(cells)))], now)
            elif action == 3:
                cell_safe_state(state, cells[int(rng.integers(0, len(cells)))], now, "watchdog_expired")
            else:
                advance(state, now)
            assert check_invariants(state) == [], f"case {case}: {[e.to_dict() for e in state.events]}"
        times = [e.time_us for e in state.events]
        assert times == sorted(times), f"case {case}"
