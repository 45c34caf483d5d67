"""
Unit tests for simulation statistics.
"""

import math

import numpy as np
import pytest
from scipy import stats

from scla.sdk.exceptions import DomainError
from scla.sdk.sim.stats import proportion_interval, rate_interval, summarize_us, z_score


class TestProportionInterval:
    """Interval method selection and values."""

    def test_zero_events_uses_rule_of_three(self):
        estimate = proportion_interval(0, 1_000_000)
        assert estimate.method == "rule_of_three"
        assert estimate.upper == 3e-6
        assert estimate.lower == 0.0

    def test_rule_of_three_capped_at_one(self):
        assert proportion_interval(0, 2).upper == 1.0

    def test_few_events_use_exact_interval(self):
        estimate = proportion_interval(5, 1_000)
        assert estimate.method == "exact"
        assert estimate.lower == pytest.approx(stats.beta.ppf(0.025, 5, 996))
        assert estimate.upper == pytest.approx(stats.beta.ppf(0.975, 6, 995))
        assert estimate.contains(0.005)

    def test_many_events_use_normal_interval(self):
        estimate = proportion_interval(400, 10_000)
        assert estimate.method == "normal"
        half = 1.959963984540054 * math.sqrt(0.04 * 0.96 / 10_000)
        assert estimate.lower == pytest.approx(0.04 - half)
        assert estimate.upper == pytest.approx(0.04 + half)

    def test_all_events(self):
        estimate = proportion_interval(10, 10)
        assert estimate.upper == 1.0
        assert estimate.value == 1.0

    def test_forced_method(self):
        assert proportion_interval(400, 10_000, method="exact").method == "exact"

    def test_exact_interval_coverage(self):
        # the exact interval never covers less than its nominal level
        trials, p = 200, 0.01
        coverage = 0.0
        for events in range(trials + 1):
            if proportion_interval(events, trials, method="exact").contains(p):
                coverage += stats.binom.pmf(events, trials, p)
        assert coverage >= 0.95

    def test_no_trials(self):
        assert proportion_interval(0, 0).method == "none"

    @pytest.mark.parametrize("args", [(5, 3), (-1, 3)])
    def test_inconsistent_counts(self, args):
        with pytest.raises(DomainError):
            proportion_interval(*args)

    def test_bad_confidence(self):
        with pytest.raises(DomainError):
            proportion_interval(1, 10, confidence=1.0)


class TestRateInterval:
    """Per-hour rates."""

    def test_zero_events_over_hours(self):
        estimate = rate_interval(0, 3_600_000, 1_000.0)
        assert estimate.upper == pytest.approx(3.0 / 1_000.0)

    def test_scaled_by_frames_per_hour(self):
        estimate = rate_interval(50, 3_600, 1.0)
        assert estimate.value == pytest.approx(50.0)

    def test_no_exposure(self):
        with pytest.raises(DomainError):
            rate_interval(0, 10, 0.0)


class TestZScore:

    def test_exact_expectation(self):
        assert z_score(100, 10_000, 0.01) == pytest.approx(0.0, abs=1e-12)

    def test_one_sigma(self):
        sigma = math.sqrt(0.01 * 0.99 / 10_000)
        events = 10_000 * (0.01 + sigma)
        assert z_score(events, 10_000, 0.01) == pytest.approx(1.0)

    def test_degenerate_expectation(self):
        assert z_score(0, 100, 0.0) is None
        assert z_score(1, 0, 0.5) is None


def test_summarize_us():
    summary = summarize_us(list(range(1, 101)))
    assert summary == {"count": 100, "min": 1, "median": 50, "p99": 99, "max": 100}
    assert summarize_us([])["median"] is None
    assert summarize_us(np.array([7]))["p99"] == 7
