import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bridge_trials.errors import ValidationError
from bridge_trials.numeric import (
    RngStream,
    RoundingPolicy,
    chi_square1_sf,
    exact_binomial_two_sided,
    normal_cdf,
    normal_quantile,
)
from oracles import (
    binomial_two_sided_oracle,
    chi_square1_sf_oracle,
    normal_cdf_oracle,
    normal_quantile_oracle,
)


class TestNormalQuantile:
    def test_median(self):
        assert normal_quantile(0.5) == 0.0

    @pytest.mark.parametrize("p,expected", [
        (0.975, 1.959963984540054),
        (0.8, 0.8416212335729143),
    ])
    def test_frozen_values(self, p, expected):
        assert normal_quantile(p) == pytest.approx(expected, abs=1e-9)
        assert normal_quantile(p) == pytest.approx(normal_quantile_oracle(p), abs=1e-9)

    def test_roundtrip_against_cdf_oracle(self):
        for z in np.linspace(-6.0, 6.0, 241):
            p = float(normal_cdf_oracle(z))
            assert abs(normal_quantile(p) - z) <= 1e-8, f"z={z}"

    def test_reflection_symmetry(self):
        for p in np.linspace(1e-3, 0.5, 200):
            assert abs(normal_quantile(p) + normal_quantile(1.0 - p)) <= 1e-12

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.1, float("nan")])
    def test_domain_errors(self, p):
        with pytest.raises(ValidationError):
            normal_quantile(p)


class TestNormalCdf:
    def test_against_oracle(self):
        for z in np.linspace(-8.0, 8.0, 161):
            assert normal_cdf(z) == pytest.approx(float(normal_cdf_oracle(z)), abs=1e-15)


class TestExactBinomial:
    @pytest.mark.parametrize("b,n,expected", [
        (5, 10, 1.0),
        (10, 10, 0.001953125),
        (0, 10, 0.001953125),
    ])
    def test_examples(self, b, n, expected):
        assert exact_binomial_two_sided(b, n) == expected

    def test_no_information(self):
        assert exact_binomial_two_sided(0, 0) == 1.0

    def test_against_oracle_exhaustive(self):
        for n in range(0, 13):
            for b in range(0, n + 1):
                assert exact_binomial_two_sided(b, n) == pytest.approx(
                    binomial_two_sided_oracle(b, n), abs=1e-15)

    @given(st.integers(0, 200), st.integers(0, 200))
    def test_symmetry(self, b, extra):
        n = b + extra
        assert exact_binomial_two_sided(b, n) == exact_binomial_two_sided(n - b, n)

    def test_invalid(self):
        with pytest.raises(ValidationError):
            exact_binomial_two_sided(5, 3)


class TestChiSquare1:
    def test_zero(self):
        assert chi_square1_sf(0.0) == 1.0

    def test_critical_value(self):
        assert chi_square1_sf(3.841459) == pytest.approx(0.049999994653195765, abs=1e-9)
        assert chi_square1_sf(3.841459) == pytest.approx(0.05, abs=1e-6)

    def test_frozen_value(self):
        assert chi_square1_sf(5.0) == pytest.approx(0.025347318677468264, abs=1e-9)

    def test_against_oracle(self):
        for x in np.linspace(0.0, 30.0, 121):
            assert chi_square1_sf(x) == pytest.approx(chi_square1_sf_oracle(x), abs=1e-9)

    def test_negative(self):
        with pytest.raises(ValidationError):
            chi_square1_sf(-1e-9)


class TestRngStream:
    def test_identical_keys_identical_sequences(self):
        a = RngStream(123, 7).generator().integers(0, 2 ** 63, 100)
        b = RngStream(123, 7).generator().integers(0, 2 ** 63, 100)
        assert np.array_equal(a, b)

    def test_distinct_streams_differ(self):
        a = RngStream(123, 7).generator().integers(0, 2 ** 63, 100)
        b = RngStream(123, 8).generator().integers(0, 2 ** 63, 100)
        c = RngStream(124, 7).generator().integers(0, 2 ** 63, 100)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_substreams_independent_and_reproducible(self):
        s = RngStream(99, 1)
        a1 = s.generator(substream=1).random(50)
        a2 = s.generator(substream=1).random(50)
        b = s.generator(substream=2).random(50)
        assert np.array_equal(a1, a2)
        assert not np.array_equal(a1, b)

    def test_spawn(self):
        s = RngStream(5).spawn(9)
        assert s == RngStream(5, 9)

    @pytest.mark.parametrize("seed,index", [(-1, 0), (0, -1), (2 ** 64, 0), (0.5, 0)])
    def test_validation(self, seed, index):
        with pytest.raises(ValidationError):
            RngStream(seed, index)


class TestRoundingPolicy:
    @pytest.mark.parametrize("policy,x,expected", [
        (RoundingPolicy.CEIL_PER_ARM, 4078.034, 4079),
        (RoundingPolicy.CEIL_PER_ARM, 4078.0, 4078),
        (RoundingPolicy.NEAREST, 950.5, 951),
        (RoundingPolicy.NEAREST, 950.4, 950),
        (RoundingPolicy.FLOOR, 950.9, 950),
    ])
    def test_modes(self, policy, x, expected):
        assert policy.round(x) == expected

    def test_float_noise_does_not_charge_a_patient(self):
        # 0.1 * 30 is 3.0000000000000004 in binary floats
        assert RoundingPolicy.CEIL_PER_ARM.round(0.1 * 30) == 3

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            RoundingPolicy.FLOOR.round(-0.5)
