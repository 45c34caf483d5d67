"""
Unit tests for the residual error rate calculus and the SIL budget rule.

Rates are checked against an exact rational-arithmetic recomputation.
"""

import math
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest

from scla.sdk.crc import GeneratorPolynomial, properness_check
from scla.sdk.exceptions import DomainError, ParameterError, UnauditableInputError
from scla.sdk.rer import (
    ANALYTIC,
    ASSERTED,
    ResidualProbability,
    SafetyParameters,
    lambda_scl,
    per_second_to_per_hour,
    rr_authenticity,
    rr_integrity,
    rr_masquerade,
    rr_timeliness,
    scl_limit,
    sil_budget_check,
)


def exact_lambda(params: SafetyParameters, rp_i: float) -> Fraction:
    """lambda_SCL in rational arithmetic from the defining equations."""
    F = Fraction
    r_t = params.v if params.r_t is None else params.r_t
    rr_t = F(1, 2 ** params.lt) * params.w * F(r_t) * F(params.rp_fscp_t)
    rr_m = (F(1, 2 ** (params.la + params.lt + params.r + params.lr)) * params.w
            * F(params.rp_u) * F(params.r_m))
    rr_i = F(rp_i) * F(params.v) * F(params.rp_fscp_i)
    return (rr_t + rr_m + rr_i) * params.m


def random_parameters(rng: np.random.Generator):
    r = int(rng.integers(0, 33))
    params = SafetyParameters(
        la=int(rng.integers(0, 33)),
        lt=int(rng.integers(0, 33)),
        r=r,
        w=int(rng.integers(1, 17)),
        v=float(rng.choice([3600.0, 100.0, rng.uniform(1.0, 1e6)])),
        m=int(rng.integers(1, 129)),
        lr=int(rng.integers(0, 9)),
        r_t=None if rng.random() < 0.5 else float(rng.uniform(0.0, 1e4)),
        r_m=float(rng.choice([1e-3, rng.uniform(0.0, 1.0)])),
        rp_u=float(rng.uniform(0.0, 1.0)),
        rp_fscp_t=float(rng.choice([1.0, rng.uniform(0.0, 1.0)])),
        rp_fscp_i=float(rng.choice([1.0, rng.uniform(0.0, 1.0)])),
    )
    rp_i = float(rng.uniform(0.0, 2.0 ** -r))
    return params, rp_i


@pytest.fixture
def base_params():
    return SafetyParameters(la=8, lt=16, r=16, w=1, v=3600.0, m=1)


class TestSafetyParameters:
    """Construction from symbol-keyed mappings and validation."""

    def test_from_dict_with_symbols(self):
        params = SafetyParameters.from_dict({"LA": 16, "LT": 16, "r": 16, "w": 1, "v": 3600, "m": 2,
                                             "RP_FCSP_T": 0.5})
        assert params.la == 16
        assert params.m == 2
        assert params.rp_fscp_t == 0.5
        assert params.r_t is None
        assert params.effective_r_t == 3600.0

    def test_missing_mandatory_symbols(self):
        with pytest.raises(ParameterError) as excinfo:
            SafetyParameters.from_dict({"LA": 16, "LT": 16, "r": 16})
        assert excinfo.value.symbols == ["w", "v", "m"]

    def test_invalid_values_name_their_symbols(self):
        with pytest.raises(ParameterError) as excinfo:
            SafetyParameters(la=-1, lt=16, r=16, w=0, v=3600.0, m=1, rp_u=1.5)
        assert set(excinfo.value.symbols) == {"LA", "w", "RP_U"}

    def test_non_integer_bit_length(self):
        with pytest.raises(ParameterError):
            SafetyParameters.from_dict({"LA": 1.5, "LT": 16, "r": 16, "w": 1, "v": 3600, "m": 1})

    def test_dict_round_trip_keeps_worst_case_flag(self, base_params):
        data = base_params.to_dict()
        assert data["R_T_assumed_worst_case"] is True
        assert data["R_T"] == 3600.0
        assert SafetyParameters.from_dict(data) == base_params

    def test_per_second_conversion(self):
        assert per_second_to_per_hour(1.0) == 3600.0


class TestComponentRates:
    """Each component against its defining equation."""

    def test_authenticity_is_zero_with_justification(self, base_params):
        component = rr_authenticity(base_params)
        assert component.value == 0.0
        assert component.justification
        assert component.warnings == ()

    def test_authenticity_warns_without_a_code(self, base_params):
        component = rr_authenticity(base_params.replace(la=0))
        assert component.value == 0.0
        assert component.warnings

    def test_timeliness_without_counter_bits(self):
        params = SafetyParameters(la=0, lt=0, r=0, w=1, v=3600.0, m=1)
        assert rr_timeliness(params).value == 3600.0

    def test_timeliness_example(self):
        params = SafetyParameters(la=0, lt=16, r=0, w=2, v=3600.0, m=1, r_t=100.0)
        assert rr_timeliness(params).value == 3.0517578125e-3

    def test_timeliness_absorbing_factor(self, base_params):
        assert rr_timeliness(base_params.replace(rp_fscp_t=0.0)).value == 0.0

    def test_masquerade_without_attenuation(self):
        params = SafetyParameters(la=0, lt=0, r=0, w=1, v=3600.0, m=1, lr=0)
        assert rr_masquerade(params).value == 1e-3

    def test_masquerade_example(self):
        params = SafetyParameters(la=8, lt=8, r=16, w=1, v=3600.0, m=1)
        assert rr_masquerade(params).value == 1e-3 * 2.0 ** -32
        assert rr_masquerade(params).value == pytest.approx(2.3283e-13, rel=1e-4)

    def test_masquerade_scales_with_a_code_length(self):
        params = SafetyParameters(la=8, lt=8, r=16, w=1, v=3600.0, m=1)
        longer = params.replace(la=16)
        assert rr_masquerade(longer).value == rr_masquerade(params).value * 2.0 ** -8

    def test_integrity_conservative_limit(self):
        params = SafetyParameters(la=16, lt=16, r=16, w=1, v=3600.0, m=1)
        component = rr_integrity(ResidualProbability.conservative_limit(16), params)
        assert component.value == 3600 * 2.0 ** -16
        assert component.value == pytest.approx(5.4932e-2, rel=1e-4)

    def test_integrity_zero(self, base_params):
        assert rr_integrity(ResidualProbability.asserted(0.0), base_params).value == 0.0

    def test_integrity_refuses_bare_number(self, base_params):
        with pytest.raises(UnauditableInputError):
            rr_integrity(2 ** -16, base_params)

    def test_integrity_from_properness_report(self):
        report = properness_check(GeneratorPolynomial(3, 0b011), 4, 16, [0.01, 0.1, 0.5], 0.01)
        params = SafetyParameters(la=8, lt=8, r=3, w=1, v=3600.0, m=1)
        rp_i = ResidualProbability.from_report(report)
        assert rp_i.provenance == ANALYTIC
        expected = max(report.curves[0.01]) * 3600.0 * 1.0
        assert rr_integrity(rp_i, params).value == expected

    @pytest.mark.parametrize("symbol", ["lt", "la", "r", "lr"])
    def test_one_more_bit_halves(self, base_params, symbol):
        wider = base_params.replace(**{symbol: getattr(base_params, symbol) + 1})
        assert rr_masquerade(wider).value == rr_masquerade(base_params).value / 2
        if symbol == "lt":
            assert rr_timeliness(wider).value == rr_timeliness(base_params).value / 2


class TestResidualProbability:
    """RP_I provenance is mandatory."""

    def test_unknown_provenance(self):
        with pytest.raises(UnauditableInputError):
            ResidualProbability(1e-5, "guess")

    def test_from_dict_without_provenance(self):
        with pytest.raises(UnauditableInputError):
            ResidualProbability.from_dict({"value": 1e-5})

    def test_asserted_keeps_reference(self):
        rp_i = ResidualProbability.from_dict({"value": 1e-5, "provenance": ASSERTED,
                                              "source": {"reference": "vendor sheet"}})
        assert rp_i.source["reference"] == "vendor sheet"

    def test_out_of_range(self):
        with pytest.raises(ParameterError):
            ResidualProbability.asserted(1.5)


class TestLambdaScl:
    """Sum of components times m."""

    def test_all_zero(self):
        params = SafetyParameters(la=8, lt=8, r=16, w=1, v=0.0, m=7, r_t=0.0, r_m=0.0)
        assert lambda_scl(params, ResidualProbability.asserted(0.0)).lambda_scl == 0.0

    def test_linear_in_m(self, base_params):
        rp_i = ResidualProbability.conservative_limit(16)
        single = lambda_scl(base_params, rp_i).lambda_scl
        assert lambda_scl(base_params.replace(m=2), rp_i).lambda_scl == 2 * single

    def test_sum_of_example_components(self):
        params = SafetyParameters(la=8, lt=16, r=16, w=2, v=3600.0, m=1, r_t=100.0)
        rp_i = ResidualProbability.conservative_limit(16)
        breakdown = lambda_scl(params, rp_i)
        expected = (rr_timeliness(params).value + rr_masquerade(params).value
                    + rr_integrity(rp_i, params).value)
        assert breakdown.lambda_scl == expected

    def test_recompute_is_bit_identical(self, base_params):
        breakdown = lambda_scl(base_params, ResidualProbability.conservative_limit(16))
        assert breakdown.recompute() == breakdown.lambda_scl
        breakdown.verify()

    def test_monotone_in_rates(self, base_params):
        rp_i = ResidualProbability.asserted(1e-6)
        low = lambda_scl(base_params, rp_i).lambda_scl
        for change in ({"v": 7200.0}, {"r_m": 1e-2}, {"w": 2}, {"rp_u": 1.0}, {"r_t": 1e5}):
            assert lambda_scl(base_params.replace(**change), rp_i).lambda_scl >= low

    def test_matches_rational_oracle_on_random_corpus(self):
        rng = np.random.default_rng(20240601)
        for _ in range(1000):
            params, rp_i = random_parameters(rng)
            computed = lambda_scl(params, ResidualProbability.asserted(rp_i)).lambda_scl
            expected = float(exact_lambda(params, rp_i))
            if expected == 0.0:
                assert computed == 0.0
            else:
                assert math.isclose(computed, expected, rel_tol=1e-12, abs_tol=0.0)

    def test_serialization_echoes_inputs(self, base_params):
        data = lambda_scl(base_params, ResidualProbability.conservative_limit(16)).to_dict()
        assert set(data["components"]) == {"RR_A", "RR_T", "RR_M", "RR_I"}
        assert data["inputs"]["LA"] == 8
        assert data["inputs"]["R_T_assumed_worst_case"] is True
        assert data["rp_i"]["provenance"] == ASSERTED


class TestSilBudget:
    """lambda_SCL against target PFH x share."""

    def test_sil3_limit_is_exact(self):
        assert scl_limit(1e-7, 0.01) == 1e-9

    def test_pass_at_and_below_limit(self):
        assert sil_budget_check(SimpleNamespace(lambda_scl=1e-9), 1e-7).passed
        assert sil_budget_check(SimpleNamespace(lambda_scl=5e-10), 1e-7, 0.01).passed

    def test_fail_just_above_limit(self):
        budget = sil_budget_check(SimpleNamespace(lambda_scl=math.nextafter(1e-9, 1.0)), 1e-7, 0.01)
        assert not budget.passed
        assert budget.verdict == "fail"

    def test_fail_with_half_margin(self):
        budget = sil_budget_check(SimpleNamespace(lambda_scl=2e-9), 1e-7, 0.01)
        assert not budget.passed
        assert budget.margin == 0.5

    def test_zero_rate_has_infinite_margin(self):
        budget = sil_budget_check(SimpleNamespace(lambda_scl=0.0), 1e-7)
        assert budget.passed
        assert math.isinf(budget.margin)
        data = budget.to_dict()
        assert data["margin"] is None
        assert data["margin_infinite"] is True

    @pytest.mark.parametrize("pfh,share", [(0.0, 0.01), (-1e-7, 0.01), (1e-7, 0.0), (1e-7, 1.5)])
    def test_domain_errors(self, pfh, share):
        with pytest.raises(DomainError):
            sil_budget_check(SimpleNamespace(lambda_scl=0.0), pfh, share)
