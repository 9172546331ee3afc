"""Matrix generators and closed-form design knobs."""

import math

import numpy as np
import pytest

from grouptest import (
    DesignParams,
    InvalidInstanceError,
    InvalidNoiseError,
    UseNoiselessError,
    bernoulli_matrix,
    cbp_group_size,
    cbp_matrix,
    cbp_test_count,
    comp_params,
    exponent_ratio,
    ncbp_matrix,
    ncbp_repetition,
    ncomp_params,
    ncomp_test_coefficient,
    ncomp_threshold_slack,
)
from grouptest.design import _ncbp_repetition_raw


def rng_from(key):
    return np.random.Generator(np.random.Philox(key=key))


class TestCbpMatrix:
    def test_single_draw_rows(self):
        m = cbp_matrix(10, 20, 1, rng_from(1))
        assert m.row_weights().tolist() == [1] * 20

    def test_single_item_gives_all_ones(self):
        m = cbp_matrix(1, 5, 3, rng_from(2))
        assert m.to_dense().all()

    def test_row_weight_at_most_group_size(self):
        m = cbp_matrix(30, 200, 7, rng_from(3))
        assert (m.row_weights() <= 7).all()
        assert (m.row_weights() >= 1).all()

    def test_column_density_matches_with_replacement_formula(self):
        # P(entry = 1) = 1 - (1 - 1/n)^g; fixed seed, 3 sigma statistical check
        n, g, t = 100, 50, 10**4
        m = cbp_matrix(n, t, g, rng_from(4))
        expected = 1.0 - (1.0 - 1.0 / n) ** g
        sigma = math.sqrt(expected * (1 - expected) / t)
        density0 = m.column_weights()[0] / t
        assert abs(density0 - expected) <= 3 * sigma
        # overall mean: per-row negative correlation only shrinks the variance
        overall = m.column_weights().sum() / (t * n)
        assert abs(overall - expected) <= 3 * math.sqrt(expected * (1 - expected) / (t * n))

    def test_golden_seed(self):
        m = cbp_matrix(6, 4, 2, rng_from(5))
        rows = ["".join("1" if b else "0" for b in row) for row in m.to_dense()]
        assert rows == ["010010", "100100", "010001", "101000"]

    def test_validation(self):
        with pytest.raises(InvalidInstanceError):
            cbp_matrix(0, 3, 1, rng_from(6))
        with pytest.raises(InvalidInstanceError):
            cbp_matrix(3, 0, 1, rng_from(6))
        with pytest.raises(InvalidInstanceError):
            cbp_matrix(3, 3, 0, rng_from(6))


class TestBernoulliMatrix:
    def test_ones_count_concentrates(self):
        # T*n = 1e6 entries at p = 0.01: within 3*sqrt(1e6 * p(1-p)) of 1e4
        m = bernoulli_matrix(1000, 1000, 0.01, rng_from(7))
        ones = int(m.row_weights().sum())
        assert abs(ones - 10**4) <= 3 * math.sqrt(10**6 * 0.01 * 0.99)

    def test_same_seed_same_matrix(self):
        a = bernoulli_matrix(40, 30, 0.2, rng_from(8))
        b = bernoulli_matrix(40, 30, 0.2, rng_from(8))
        assert a == b

    def test_golden_seed(self):
        # density 1/d with d = 2, n = 4, T = 8
        m = bernoulli_matrix(4, 8, 0.5, rng_from(123))
        rows = ["".join("1" if b else "0" for b in row) for row in m.to_dense()]
        assert rows == ["0111", "1101", "0100", "0001", "1001", "1010", "0001", "0111"]

    def test_validation(self):
        with pytest.raises(InvalidInstanceError):
            bernoulli_matrix(4, 4, 0.0, rng_from(9))
        with pytest.raises(InvalidInstanceError):
            bernoulli_matrix(4, 4, 1.2, rng_from(9))
        # density 1.0 allowed: the degenerate d=1 containment design
        assert bernoulli_matrix(4, 4, 1.0, rng_from(9)).to_dense().all()


class TestNcbpMatrix:
    def test_identity_at_one_repeat(self):
        base = small_base_matrix()
        assert ncbp_matrix(base, 1) == base

    def test_block_repetition_order(self):
        base = bernoulli_matrix(3, 2, 0.5, rng_from(10))
        out = ncbp_matrix(base, 3)
        assert out.rows == 6
        dense = out.to_dense()
        base_dense = base.to_dense()
        for i in range(2):
            for k in range(3):
                assert np.array_equal(dense[i * 3 + k], base_dense[i])

    def test_validation(self):
        base = bernoulli_matrix(3, 2, 0.5, rng_from(11))
        with pytest.raises(InvalidInstanceError):
            ncbp_matrix(base, 0)


def small_base_matrix():
    return bernoulli_matrix(5, 4, 0.4, rng_from(12))


class TestGroupSize:
    def test_fixture_values(self):
        # conservative upward rounding, same convention as the test counts
        assert cbp_group_size(1000, 10) == 100  # 1/ln(1000/990) = 99.499...
        assert cbp_group_size(500, 5) == 100  # 99.4996...
        assert cbp_group_size(2, 1) == 2  # 1/ln 2 = 1.44...

    def test_asymptotic_n_over_d(self):
        assert cbp_group_size(10**6, 1) == 10**6

    def test_domain(self):
        with pytest.raises(InvalidInstanceError):
            cbp_group_size(10, 10)
        with pytest.raises(InvalidInstanceError):
            cbp_group_size(10, 0)


class TestTestCounts:
    def test_comp_fixture(self):
        params = comp_params(1000, 10, 1.0)
        assert params.tests == 376  # ceil(2e * 10 * ln 1000)
        assert params.density == 0.1
        assert params.test_coefficient == pytest.approx(2 * math.e, rel=1e-12)

    def test_comp_density_always_reciprocal_d(self):
        for n, d in [(100, 3), (10**4, 7), (50, 49)]:
            for delta in (0.5, 1.0, 2.0):
                assert comp_params(n, d, delta).density == pytest.approx(1.0 / d)

    def test_comp_delta_zero_diagnostic(self):
        assert comp_params(1000, 10, 0.0).tests == math.ceil(math.e * 10 * math.log(1000))

    def test_cbp_count_is_twice_comp_before_rounding(self):
        # the raw formulas differ by exactly 2; check the rounded fixture too
        assert cbp_test_count(1000, 10, 1.0) == 752 == 2 * comp_params(1000, 10, 1.0).tests
        assert cbp_test_count(500, 5, 1.0) == 338

    def test_cbp_count_monotone(self):
        base = cbp_test_count(1000, 10, 1.0)
        assert cbp_test_count(2000, 10, 1.0) >= base
        assert cbp_test_count(1000, 11, 1.0) >= base
        assert cbp_test_count(1000, 10, 1.5) >= base

    def test_domain(self):
        with pytest.raises(InvalidInstanceError):
            cbp_test_count(10, 10, 1.0)
        with pytest.raises(InvalidInstanceError):
            comp_params(10, 0, 1.0)
        with pytest.raises(InvalidInstanceError):
            comp_params(10, 2, -0.5)


class TestNcbpRepetition:
    def test_fixture_value(self):
        # 2(ln ln 16 + ln 1 + ln 16 + 1 + ln 4) = 2 * 6.1787... -> 13
        assert ncbp_repetition(16, 1, 1.0, 0.0) == 13

    def test_noise_scaling_before_ceiling(self):
        base = _ncbp_repetition_raw(100, 3, 1.0, 0.0)
        for q in (0.1, 0.25, 0.4):
            scaled = _ncbp_repetition_raw(100, 3, 1.0, q)
            assert scaled == pytest.approx(base / (1 - 2 * q) ** 2, rel=1e-12)

    def test_domain(self):
        with pytest.raises(InvalidInstanceError):
            ncbp_repetition(2, 1, 1.0, 0.1)  # needs n >= 3
        with pytest.raises(InvalidNoiseError):
            ncbp_repetition(16, 1, 1.0, 0.5)


class TestExponentRatio:
    def test_fixture_value(self):
        assert exponent_ratio(10**6, 10, 1.0) == pytest.approx(0.583334, abs=1e-5)

    def test_limit_from_above(self):
        # approaches delta/(1+delta) = 0.5 from above as n grows, d fixed
        values = [exponent_ratio(n, 10, 1.0) for n in (10**4, 10**8, 10**16, 10**300)]
        assert all(v > 0.5 for v in values)
        assert values == sorted(values, reverse=True)
        assert values[-1] == pytest.approx(0.5, abs=0.01)

    def test_open_unit_interval_for_sparse_instances(self):
        # strictly inside (0,1) whenever d < n/2 (ln d < ln(n-d))
        rng = rng_from(13)
        for _ in range(200):
            n = int(rng.integers(4, 10**6))
            d = int(rng.integers(1, max(2, n // 2)))
            delta = float(rng.uniform(0.1, 3.0))
            value = exponent_ratio(n, d, delta)
            assert 0.0 < value < 1.0

    def test_domain(self):
        with pytest.raises(InvalidInstanceError):
            exponent_ratio(10, 10, 1.0)


class TestNcompParams:
    def test_threshold_slack_fixture(self):
        # e^-0.5 * 0.8 / (0.1 * (1 + sqrt(2)))
        expected = math.exp(-0.5) * 0.8 / (0.1 * (1 + math.sqrt(2)))
        assert ncomp_threshold_slack(0.5, 0.1, 0.5) == pytest.approx(expected, rel=1e-12)
        assert ncomp_threshold_slack(0.5, 0.1, 0.5) == pytest.approx(2.0099, abs=5e-4)

    def test_coefficient_leading_constant(self):
        # q cancels out of coefficient * (1-2q)^2, leaving the q->0 value
        lead = 2 * math.e * math.log(2) / (1 - math.exp(-2))
        target = lead * (1 + math.sqrt(2)) ** 2
        for q in (0.05, 0.1, 0.25):
            value = ncomp_test_coefficient(1.0, q) * (1 - 2 * q) ** 2
            assert value == pytest.approx(target, rel=1e-12)
        assert target == pytest.approx(25.4012, abs=5e-4)

    def test_full_params(self):
        params = ncomp_params(1000, 10, 1.0, 0.1)
        assert params.tests == 3956  # ceil(coefficient * 10 * log2 1000)
        assert params.density == pytest.approx(0.05)
        assert params.density_scale == 0.5
        expected_slack = ncomp_threshold_slack(0.5, 0.1, exponent_ratio(1000, 10, 1.0))
        assert params.threshold_slack == pytest.approx(expected_slack, rel=1e-12)
        # validity window
        assert params.threshold_slack > 0
        assert 1 - 0.1 * (1 + params.threshold_slack) > 0.1

    def test_slack_decreasing_in_noise(self):
        slacks = [
            ncomp_params(1000, 10, 1.0, q).threshold_slack
            for q in (0.05, 0.1, 0.2, 0.3, 0.4)
        ]
        assert slacks == sorted(slacks, reverse=True)

    def test_coefficient_increasing_in_noise(self):
        coefficients = [
            ncomp_params(1000, 10, 1.0, q).test_coefficient
            for q in (0.05, 0.1, 0.2, 0.3, 0.4)
        ]
        assert coefficients == sorted(coefficients)

    def test_q_zero_refused_with_signal(self):
        with pytest.raises(UseNoiselessError):
            ncomp_params(1000, 10, 1.0, 0.0)
        with pytest.raises(UseNoiselessError):
            ncomp_threshold_slack(0.5, 0.0, 0.5)
        with pytest.raises(UseNoiselessError):
            ncomp_test_coefficient(1.0, 0.0)

    def test_invalid_noise(self):
        with pytest.raises(InvalidNoiseError):
            ncomp_params(1000, 10, 1.0, 0.5)

    def test_formulas_total_on_valid_domain(self):
        # no exception over a randomized valid-domain grid
        rng = rng_from(14)
        for _ in range(10**4):
            n = int(rng.integers(3, 10**7))
            d = int(rng.integers(1, min(n, 10**4)))
            delta = float(rng.uniform(0.0, 4.0))
            q = float(rng.uniform(0.001, 0.499))
            cbp_group_size(n, d)
            cbp_test_count(n, d, delta)
            comp_params(n, d, delta)
            ncbp_repetition(n, d, delta, q)
            ncomp_params(n, d, delta, q)


class TestDesignParamsValidation:
    def test_window_checks(self):
        with pytest.raises(InvalidInstanceError):
            DesignParams(algorithm="bogus", tests=10)
        with pytest.raises(InvalidInstanceError):
            DesignParams(algorithm="comp", tests=0)
        with pytest.raises(InvalidInstanceError):
            DesignParams(algorithm="comp", tests=5, density=0.0)
        with pytest.raises(InvalidInstanceError):
            DesignParams(algorithm="cbp", tests=5, group_size=0)
        with pytest.raises(InvalidInstanceError):
            DesignParams(algorithm="ncbp", tests=5, repetition=0)
        with pytest.raises(InvalidInstanceError):
            DesignParams(algorithm="ncomp", tests=5, threshold_slack=0.0)
