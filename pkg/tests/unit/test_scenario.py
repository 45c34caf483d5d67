"""
Unit tests for scenario loading and validation.
"""

from pathlib import Path

import pytest

from scla.sdk.exceptions import ScenarioError, SimulationOverflowError
from scla.sdk.sim.scenario import load_scenario, scenario_from_dict, set_path


def minimal(**overrides):
    document = {
        "seed": 1,
        "traffic": {"rate_per_hour": 3600, "horizon_hours": 1},
        "hops": [{"label": "wired"}],
    }
    document.update(overrides)
    return document


class TestScenarioFromDict:
    """Schema validation and resolution to microseconds."""

    def test_minimal_document_uses_defaults(self):
        scenario = scenario_from_dict(minimal())
        assert scenario.rate_per_hour == 3600.0
        assert scenario.horizon_us == 3_600_000_000
        assert scenario.protocol.watchdog_timeout_us == 50_000
        assert scenario.stale_after_us == 50_000
        assert scenario.scoring.latency_bound_us == 5_000
        assert scenario.roaming is None
        assert scenario.annotation["remaining_failure_probability"] == 1e-9

    def test_times_convert_to_microseconds(self):
        scenario = scenario_from_dict(minimal(
            protocol={"watchdog_timeout_ms": 1.5},
            hops=[{"label": "radio", "latency_ms": 2.25, "jitter_ms": 0.5,
                   "impairments": [{"kind": "silence", "start_ms": 10, "end_ms": 20}]}],
        ))
        hop = scenario.chain.hops[0]
        assert scenario.protocol.watchdog_timeout_us == 1_500
        assert hop.base_latency_us == 2_250
        assert hop.jitter_us == 500
        assert hop.impairments[0].start_us == 10_000

    def test_rate_per_second(self):
        scenario = scenario_from_dict(minimal(traffic={"rate_per_second": 10, "horizon_hours": 1}))
        assert scenario.rate_per_hour == 36_000.0

    def test_both_rates_rejected(self):
        with pytest.raises(ScenarioError) as excinfo:
            scenario_from_dict(minimal(traffic={"rate_per_second": 10, "rate_per_hour": 1, "horizon_hours": 1}))
        assert excinfo.value.path == "traffic"

    def test_crc_by_catalog_name_and_text(self):
        by_name = scenario_from_dict(minimal(protocol={"crc": {"polynomial": "CRC-32/ISO-HDLC"}}))
        assert by_name.protocol.crc.xor_out == 0xFFFFFFFF
        by_text = scenario_from_dict(minimal(protocol={"crc": {"polynomial": "r=8, 0x07"}}))
        assert by_text.protocol.r == 8

    def test_bad_polynomial_names_its_field(self):
        with pytest.raises(ScenarioError) as excinfo:
            scenario_from_dict(minimal(protocol={"crc": {"polynomial": "r=8 0x07"}}))
        assert excinfo.value.path == "protocol.crc.polynomial"

    def test_schema_error_path(self):
        document = minimal(hops=[{"label": "a"}, {"label": "b", "bep": 0.7}])
        with pytest.raises(ScenarioError) as excinfo:
            scenario_from_dict(document)
        assert excinfo.value.path == "hops[1].bep"

    def test_unknown_field(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict(minimal(colour="blue"))

    def test_duplicate_hop_labels(self):
        with pytest.raises(ScenarioError) as excinfo:
            scenario_from_dict(minimal(hops=[{"label": "a"}, {"label": "a"}]))
        assert excinfo.value.path == "hops"

    def test_semantic_protocol_error(self):
        with pytest.raises(ScenarioError) as excinfo:
            scenario_from_dict(minimal(protocol={"lt_bits": 4, "w": 16}))
        assert excinfo.value.path == "protocol"

    def test_topology(self):
        scenario = scenario_from_dict(minimal(topology={
            "cells": [{"id": "C1", "a_code": 11}, {"id": "C2", "a_code": 12}],
            "transitions": [["C1", "C2"]],
            "start": {"location": None, "connected": "C1"},
            "schedule": [{"at_ms": 20, "action": "move", "location": "C2"},
                         {"at_ms": 10, "action": "handover", "cell": "C2"}],
            "commissioning_delay_ms": 50,
        }))
        plan = scenario.roaming
        assert plan.start_connected == "C1"
        assert [a.action for a in plan.schedule] == ["handover", "move"]
        assert plan.schedule[0].at_us == 10_000
        assert plan.config.commissioning_delay_us == 50_000

    def test_schedule_with_unknown_cell(self):
        with pytest.raises(ScenarioError) as excinfo:
            scenario_from_dict(minimal(topology={
                "cells": [{"id": "C1", "a_code": 11}],
                "schedule": [{"at_ms": 10, "action": "handover", "cell": "C7"}],
            }))
        assert excinfo.value.path == "topology.schedule[0].cell"

    def test_horizon_overflow(self):
        with pytest.raises(SimulationOverflowError):
            scenario_from_dict(minimal(traffic={"rate_per_hour": 1, "horizon_hours": 1e13}))

    def test_not_a_mapping(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict(["seed"])


class TestDerivedScenarios:
    """Seed and field overrides keep the document as the source of truth."""

    def test_with_seed(self):
        scenario = scenario_from_dict(minimal())
        other = scenario.with_seed(99)
        assert other.seed == 99
        assert scenario.seed == 1
        assert other.chain == scenario.chain

    def test_with_value(self):
        scenario = scenario_from_dict(minimal()).with_value("hops[0].bep", 0.01)
        assert scenario.chain.hops[0].bep == 0.01
        assert scenario.config_echo()["hops"][0]["bep"] == 0.01

    def test_with_invalid_value_is_validated(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict(minimal()).with_value("hops[0].bep", 0.9)


class TestFieldPaths:

    def test_set_creates_mappings(self):
        document = {"hops": [{}]}
        set_path(document, "protocol.crc.polynomial", "r=8, 0x07")
        set_path(document, "hops[0].bep", 0.1)
        assert document == {"hops": [{"bep": 0.1}], "protocol": {"crc": {"polynomial": "r=8, 0x07"}}}

    def test_index_out_of_range(self):
        with pytest.raises(ScenarioError) as excinfo:
            set_path({"hops": [{}]}, "hops[3].bep", 0.1)
        assert excinfo.value.path == "hops[3].bep"


class TestLoadScenario:

    def test_load_yaml(self, scenario_file):
        path = scenario_file(minimal(name="bench"))
        assert load_scenario(path).name == "bench"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError):
            load_scenario(tmp_path / "nope.yaml")

    def test_invalid_yaml_reports_line(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("seed: 1\nhops: [\n  - label: a\n")
        with pytest.raises(ScenarioError) as excinfo:
            load_scenario(path)
        assert "line" in str(excinfo.value)


SHIPPED_SCENARIOS = sorted((Path(__file__).resolve().parents[2] / "scenarios").glob("*.yaml"))


@pytest.mark.parametrize("path", SHIPPED_SCENARIOS, ids=lambda p: p.stem)
def test_shipped_scenarios_validate(path):
    scenario = load_scenario(path)
    assert scenario.name == path.stem
