"""
Unit tests for batch estimation, report merging and sweeps.
"""

import csv
import io

import pytest

from scla.sdk.exceptions import DomainError, ScenarioError
from scla.sdk.sim.engine import run_scenario
from scla.sdk.sim.estimate import derive_seeds, estimate_residual_rate, log_axis, sweep
from scla.sdk.sim.report import merge_reports, reports_to_csv
from scla.sdk.sim.scenario import scenario_from_dict


@pytest.fixture
def small_scenario():
    return scenario_from_dict({
        "name": "small",
        "seed": 3,
        "traffic": {"rate_per_hour": 36_000, "horizon_hours": 20 / 3600},
        "protocol": {"watchdog_timeout_ms": 500},
        "hops": [{"label": "radio", "bep": 1e-3, "loss_prob": 0.01}],
    })


class TestDeriveSeeds:

    def test_prefix_stable(self):
        assert derive_seeds(5, 3) == derive_seeds(5, 8)[:3]

    def test_distinct_64_bit(self):
        seeds = derive_seeds(5, 50)
        assert len(set(seeds)) == 50
        assert all(0 <= s < 2 ** 64 for s in seeds)

    def test_depends_on_parent(self):
        assert derive_seeds(5, 2) != derive_seeds(6, 2)


class TestMergeReports:
    """Merged counts equal the sums of the batches."""

    def test_counts_add(self, small_scenario):
        a = run_scenario(small_scenario.with_seed(1))
        b = run_scenario(small_scenario.with_seed(2))
        merged = merge_reports([a, b])
        assert merged.frames["emitted"] == a.frames["emitted"] + b.frames["emitted"]
        assert merged.crc["escapes"] == a.crc["escapes"] + b.crc["escapes"]
        assert merged.horizon_hours == pytest.approx(2 * small_scenario.horizon_hours)
        assert merged.seeds == [1, 2]
        assert len(merged.response_samples) == len(a.response_samples) + len(b.response_samples)
        assert merged.hops["radio"].received == a.hops["radio"].received + b.hops["radio"].received

    def test_order_does_not_change_counts(self, small_scenario):
        a = run_scenario(small_scenario.with_seed(1))
        b = run_scenario(small_scenario.with_seed(2))
        ab = merge_reports([a, b]).to_dict()
        ba = merge_reports([b, a]).to_dict()
        for key in ("frames", "verdicts", "classes", "hops", "response_time_us"):
            assert ab[key] == ba[key]

    def test_empty(self):
        with pytest.raises(DomainError):
            merge_reports([])


class TestEstimateResidualRate:

    def test_batches_use_derived_seeds(self, small_scenario):
        estimate = estimate_residual_rate(small_scenario, batches=3)
        assert estimate.batch_seeds == derive_seeds(3, 3)
        assert estimate.report.frames["emitted"] == 3 * 200
        assert estimate.to_dict()["batches"] == 3

    def test_same_merged_report_for_explicit_seeds(self, small_scenario):
        derived = estimate_residual_rate(small_scenario, batches=2)
        explicit = estimate_residual_rate(small_scenario, batches=2, seeds=derive_seeds(3, 2))
        assert derived.report.to_json() == explicit.report.to_json()

    def test_zero_batches(self, small_scenario):
        with pytest.raises(DomainError):
            estimate_residual_rate(small_scenario, batches=0)


class TestSweep:

    def test_points_sorted_by_value(self, small_scenario):
        points = sweep(small_scenario, "hops[0].bep", [0.01, 0.0, 0.001])
        assert [p.value for p in points] == [0.0, 0.001, 0.01]
        assert points[0].report.crc["corrupted"] == 0
        assert points[2].report.crc["corrupted"] > points[1].report.crc["corrupted"]

    def test_point_seeds(self, small_scenario):
        points = sweep(small_scenario, "hops[0].bep", [0.001, 0.002])
        assert [p.report.seeds[0] for p in points] == derive_seeds(3, 2)

    def test_unknown_path(self, small_scenario):
        with pytest.raises(ScenarioError):
            sweep(small_scenario, "hops[4].bep", [0.1])

    def test_field_left_at_default(self):
        """A field the scenario file omits can still be swept."""
        scenario = scenario_from_dict({
            "name": "defaults",
            "seed": 3,
            "traffic": {"rate_per_hour": 36_000, "horizon_hours": 20 / 3600},
            "hops": [{"label": "radio"}],
        })
        points = sweep(scenario, "hops[0].bep", [1e-3, 1e-2])
        assert [p.value for p in points] == [1e-3, 1e-2]
        assert [p.report.config["hops"][0]["bep"] for p in points] == [1e-3, 1e-2]

    def test_misspelled_field_rejected(self, small_scenario):
        with pytest.raises(ScenarioError):
            sweep(small_scenario, "hops[0].beep", [0.1])

    def test_out_of_range_value_rejected(self, small_scenario):
        with pytest.raises(ScenarioError):
            sweep(small_scenario, "hops[0].bep", [0.9])

    def test_no_values(self, small_scenario):
        with pytest.raises(DomainError):
            sweep(small_scenario, "hops[0].bep", [])

    def test_csv_rows(self, small_scenario):
        points = sweep(small_scenario, "hops[0].loss_prob", [0.0, 0.5])
        text = reports_to_csv([p.report.flat_row() for p in points])
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 2
        assert int(rows[0]["frames_emitted"]) == 200


class TestLogAxis:

    def test_endpoints(self):
        axis = log_axis(1e-4, 1e-1, 4)
        assert axis[0] == pytest.approx(1e-4)
        assert axis[-1] == pytest.approx(1e-1)
        assert axis[1] == pytest.approx(1e-3)

    def test_invalid(self):
        with pytest.raises(DomainError):
            log_axis(0.0, 1.0, 3)
