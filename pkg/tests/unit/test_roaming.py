"""
Unit tests for roaming between safety cells.
"""

import numpy as np
import pytest

from scla.sdk.exceptions import DomainError, TransitionNotAllowedError, UnknownCellError
from scla.sdk.protocol import Mode
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


@pytest.fixture
def roaming_config():
    """Three safety cells in a row plus a non-safety corridor."""
    return RoamingConfig.build(
        [Cell("C1", 11), Cell("C2", 12), Cell("C3", 13), Cell("corridor", 0, safety=False)],
        transitions=[("C1", "C2"), ("C2", "C3")],
        commissioning_delay_us=100_000,
    )


def kinds(events):
    return [(e.kind, e.cell) for e in events]


class TestRoamingConfig:
    """Configuration validation."""

    def test_duplicate_cells(self):
        with pytest.raises(DomainError):
            RoamingConfig.build([Cell("C1", 1), Cell("C1", 2)])

    def test_transition_to_unknown_cell(self):
        with pytest.raises(UnknownCellError):
            RoamingConfig.build([Cell("C1", 1)], transitions=[("C1", "C9")])

    def test_self_transition(self):
        with pytest.raises(DomainError):
            RoamingConfig.build([Cell("C1", 1)], transitions=[("C1", "C1")])

    def test_transitions_are_unordered(self, roaming_config):
        assert roaming_config.allowed("C2", "C1")
        assert not roaming_config.allowed("C1", "C3")

    def test_per_transition_delay(self):
        config = RoamingConfig.build([Cell("C1", 1), Cell("C2", 2)], transitions=[("C1", "C2")],
                                     transition_delays={("C2", "C1"): 5_000})
        assert config.delay("C1", "C2") == 5_000
        assert config.delay(None, "C2") == config.commissioning_delay_us


class TestHandover:
    """Break-before-make handover."""

    def test_disconnect_precedes_connect(self, roaming_config):
        state = new_roaming_state(roaming_config, location=None, connected="C1")
        events = request_handover(state, "C2", 1_000)
        assert kinds(events) == [("disconnect", "C1"), ("commissioning", "C2")]
        assert state.connections() == []
        assert advance(state, 100_999) == []
        connect = advance(state, 101_000)
        assert kinds(connect) == [("connect", "C2")]
        assert connect[0].time_us == 101_000
        assert state.connections() == ["C2"]

    def test_never_two_connections(self, roaming_config):
        state = new_roaming_state(roaming_config, connected="C1")
        request_handover(state, "C2", 0)
        for now in range(0, 200_000, 10_000):
            advance(state, now)
            assert len(state.connections()) <= 1
            assert not (state.pending and state.current)

    def test_handover_to_current_cell_is_a_no_op(self, roaming_config):
        state = new_roaming_state(roaming_config, connected="C1")
        assert request_handover(state, "C1", 0) == []
        assert state.current == "C1"

    def test_repeated_request_for_pending_target(self, roaming_config):
        state = new_roaming_state(roaming_config, connected="C1")
        request_handover(state, "C2", 0)
        assert request_handover(state, "C2", 10) == []
        assert state.pending.ready_us == 100_000

    def test_non_adjacent_target_leaves_state_unchanged(self, roaming_config):
        state = new_roaming_state(roaming_config, connected="C1")
        with pytest.raises(TransitionNotAllowedError):
            request_handover(state, "C3", 0)
        assert state.current == "C1"
        assert state.pending is None
        assert state.events == []

    def test_adjacency_uses_last_connected_cell_while_pending(self, roaming_config):
        state = new_roaming_state(roaming_config, connected="C1")
        request_handover(state, "C2", 0)
        with pytest.raises(TransitionNotAllowedError):
            request_handover(state, "C3", 10)

    def test_unknown_target(self, roaming_config):
        state = new_roaming_state(roaming_config, connected="C1")
        with pytest.raises(UnknownCellError):
            request_handover(state, "C9", 0)

    def test_unconnected_device_may_commission_anywhere(self, roaming_config):
        state = new_roaming_state(roaming_config)
        events = request_handover(state, "C3", 0)
        assert kinds(events) == [("commissioning", "C3")]

    def test_zero_delay_connects_immediately(self):
        config = RoamingConfig.build([Cell("C1", 1), Cell("C2", 2)], transitions=[("C1", "C2")],
                                     commissioning_delay_us=0)
        state = new_roaming_state(config, connected="C1")
        events = request_handover(state, "C2", 500)
        assert kinds(events)[-1] == ("connect", "C2")
        assert state.current == "C2"


class TestAccidentalEntry:
    """A device inside a safety cell it is not connected to forces safe state."""

    def test_entering_unconnected_cell(self, roaming_config):
        state = new_roaming_state(roaming_config, location="C1", connected="C1")
        events = move_device(state, "C2", 5_000)
        assert kinds(events) == [("move", "C2"), ("safe_state", "C2")]
        assert state.mode("C2") is Mode.SAFE_STATE
        assert state.mode("C1") is Mode.OPERATIONAL
        assert check_invariants(state) == []

    def test_entering_connected_cell(self, roaming_config):
        state = new_roaming_state(roaming_config, location="C2", connected="C1")
        assert state.mode("C2") is Mode.SAFE_STATE
        state = new_roaming_state(roaming_config, location=None, connected="C1")
        assert kinds(move_device(state, "C1", 0)) == [("move", "C1")]

    def test_non_safety_cell_never_trips(self, roaming_config):
        state = new_roaming_state(roaming_config, connected="C1")
        assert kinds(move_device(state, "corridor", 0)) == [("move", "corridor")]

    def test_disconnect_while_inside(self, roaming_config):
        state = new_roaming_state(roaming_config, location="C1", connected="C1")
        events = request_handover(state, "C2", 0)
        assert ("safe_state", "C1") in kinds(events)


class TestCellReset:
    """Commissioning reset of a cell."""

    def test_reset_operational_cell_is_ignored(self, roaming_config):
        state = new_roaming_state(roaming_config, connected="C1")
        assert kinds(cell_reset(state, "C1", 0)) == [("reset_ignored", "C1")]

    def test_reset_refused_while_device_inside_unconnected(self, roaming_config):
        state = new_roaming_state(roaming_config, location="C2", connected="C1")
        assert kinds(cell_reset(state, "C2", 0)) == [("reset_ignored", "C2")]
        assert state.mode("C2") is Mode.SAFE_STATE

    def test_reset_after_device_left(self, roaming_config):
        state = new_roaming_state(roaming_config, location="C2", connected="C1")
        move_device(state, None, 10)
        assert kinds(cell_reset(state, "C2", 20)) == [("reset", "C2")]
        assert state.mode("C2") is Mode.OPERATIONAL
        assert kinds(cell_reset(state, "C2", 30)) == [("reset_ignored", "C2")]

    def test_external_safe_state(self, roaming_config):
        state = new_roaming_state(roaming_config, connected="C1")
        assert kinds(cell_safe_state(state, "C1", 0, "watchdog_expired")) == [("safe_state", "C1")]
        assert cell_safe_state(state, "C1", 1, "watchdog_expired") == []


class TestRandomizedSequences:
    """Invariants hold after every step of random operation sequences."""

    def test_invariants(self, roaming_config):
        rng = np.random.default_rng(4711)
        locations = [None, "C1", "C2", "C3", "corridor"]
        cells = ["C1", "C2", "C3", "corridor"]
        for _ in range(200):
            state = new_roaming_state(roaming_config, location=None, connected="C1")
            now = 0
            for _ in range(40):
                now += int(rng.integers(0, 150_000))
                action = int(rng.integers(0, 4))
                if action == 0:
                    try:
                        request_handover(state, cells[int(rng.integers(0, len(cells)))], now)
                    except TransitionNotAllowedError:
                        pass
                elif action == 1:
                    move_device(state, locations[int(rng.integers(0, len(locations)))], now)
                elif action == 2:
                    cell_reset(state, cells[int(rng.integers(0, len(cells)))], now)
                else:
                    advance(state, now)
                assert check_invariants(state) == []
                assert len(state.connections()) <= 1
            times = [e.time_us for e in state.events]
            assert times == sorted(times)
