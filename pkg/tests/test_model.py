"""Core type behavior: packing layouts, outcomes, noise, text interchange."""

import math

import numpy as np
import pytest

from grouptest import (
    DimensionMismatchError,
    EstimateVector,
    InputVector,
    InvalidNoiseError,
    NoiseChannel,
    ResultVector,
    TestMatrix,
    TextFormatError,
    apply_noise,
    noiseless_outcome,
)
from grouptest.model import (
    format_bits,
    format_matrix,
    parse_bits_line,
    parse_matrix,
    read_matrix,
    write_matrix,
)


def rng_from(key):
    return np.random.Generator(np.random.Philox(key=key))


class TestTestMatrix:
    def test_row_and_column_views_agree(self):
        # exhaustive bit-for-bit agreement on random instances up to 64x64
        rng = rng_from(1)
        for _ in range(25):
            rows = int(rng.integers(1, 65))
            cols = int(rng.integers(1, 65))
            dense = rng.random((rows, cols)) < rng.uniform(0.05, 0.95)
            m = TestMatrix(dense)
            by_rows = np.stack([m.row(i) for i in range(rows)])
            by_cols = np.stack([m.column(j) for j in range(cols)]).T
            assert np.array_equal(by_rows, by_cols)
            assert np.array_equal(by_rows, dense)
            assert np.array_equal(m.to_dense(), dense)

    def test_entry_matches_both_views(self):
        rng = rng_from(2)
        dense = rng.random((13, 21)) < 0.4
        m = TestMatrix(dense)
        for i in range(13):
            for j in range(21):
                assert m.entry(i, j) == int(dense[i, j])
                assert m.entry(i, j) == int(m.column(j)[i])

    def test_packed_padding_bits_are_zero(self):
        dense = np.ones((5, 11), dtype=bool)
        m = TestMatrix(dense)
        # 11 columns -> 5 padding bits in the last row byte
        assert np.all(m.row_bits[:, -1] == 0b11100000)
        # 5 rows -> 3 padding bits in the only column byte
        assert np.all(m.col_bits[:, -1] == 0b11111000)

    def test_weights(self):
        m = TestMatrix([[1, 1, 0], [0, 0, 0], [1, 0, 1]])
        assert m.row_weights().tolist() == [2, 0, 2]
        assert m.column_weights().tolist() == [2, 1, 1]

    def test_accepts_int_entries_rejects_others(self):
        TestMatrix([[0, 1], [1, 0]])
        with pytest.raises(ValueError):
            TestMatrix([[0, 2], [1, 0]])
        with pytest.raises(ValueError):
            TestMatrix(np.zeros((0, 3), dtype=bool))
        with pytest.raises(ValueError):
            TestMatrix(np.zeros(4, dtype=bool))

    def test_immutable_buffers(self):
        m = TestMatrix([[1, 0], [0, 1]])
        with pytest.raises(ValueError):
            m.row_bits[0, 0] = 0


class TestVectors:
    def test_input_vector_support(self):
        x = InputVector(6, [4, 1, 4])
        assert x.d == 2
        assert x.support.tolist() == [1, 4]
        assert x.to_bits().tolist() == [False, True, False, False, True, False]
        assert InputVector.from_bits(x.to_bits()) == x

    def test_input_vector_validation(self):
        InputVector(3)  # d = 0 allowed
        with pytest.raises(ValueError):
            InputVector(3, [3])
        with pytest.raises(ValueError):
            InputVector(3, [-1])
        with pytest.raises(ValueError):
            InputVector(3, [0, 1, 2])  # d must stay < n
        with pytest.raises(ValueError):
            InputVector(0)

    def test_result_vector_weight_and_xor(self):
        a = ResultVector([1, 0, 1, 1, 0, 0, 0, 0, 1])
        b = ResultVector([0, 0, 1, 0, 0, 0, 0, 0, 1])
        assert a.weight() == 4
        assert (a ^ b).to_bits().tolist() == [True, False, False, True] + [False] * 5
        assert (a ^ b) ^ b == a
        with pytest.raises(DimensionMismatchError):
            a ^ ResultVector([1, 0])

    def test_result_vector_from_packed_masks_padding(self):
        v = ResultVector.from_packed(np.array([0xFF], dtype=np.uint8), 3)
        assert v.to_bits().tolist() == [True, True, True]
        assert v.weight() == 3
        assert v.bits[0] == 0b11100000
        with pytest.raises(ValueError):
            ResultVector.from_packed(np.array([0xFF], dtype=np.uint8), 9)

    def test_estimate_vector(self):
        e = EstimateVector([0, 1, 0, 1])
        assert e.support().tolist() == [1, 3]
        assert e.to01() == "0101"
        assert e == EstimateVector([0, 1, 0, 1])
        assert e != EstimateVector([1, 1, 0, 1])


class TestNoiseChannel:
    def test_validity_window(self):
        NoiseChannel(0.0)
        NoiseChannel(0.4999)
        for bad in (-0.01, 0.5, 0.7, 1.0):
            with pytest.raises(InvalidNoiseError):
                NoiseChannel(bad)


class TestNoiselessOutcome:
    def test_identity_matrix_single_defective(self):
        m = TestMatrix(np.eye(3, dtype=bool))
        y = noiseless_outcome(m, InputVector(3, [1]))
        assert y.to_bits().tolist() == [False, True, False]

    def test_empty_support_gives_all_negative(self):
        rng = rng_from(3)
        m = TestMatrix(rng.random((7, 5)) < 0.5)
        y = noiseless_outcome(m, InputVector(5))
        assert y.weight() == 0

    def test_overlapping_defectives(self):
        m = TestMatrix([[1, 1, 0], [0, 1, 1]])
        y = noiseless_outcome(m, InputVector(3, [0, 2]))
        assert y.to_bits().tolist() == [True, True]

    def test_monotone_in_support(self):
        rng = rng_from(4)
        for _ in range(50):
            rows = int(rng.integers(1, 30))
            cols = int(rng.integers(2, 30))
            m = TestMatrix(rng.random((rows, cols)) < 0.3)
            small = rng.choice(cols, size=int(rng.integers(0, cols - 1)), replace=False)
            extra = rng.choice(cols, size=1)
            big = np.union1d(small, extra)
            if big.size >= cols:
                continue
            y_small = noiseless_outcome(m, InputVector(cols, small)).to_bits()
            y_big = noiseless_outcome(m, InputVector(cols, big)).to_bits()
            assert np.all(y_big | ~y_small)  # no 1 may turn into 0

    def test_dimension_mismatch(self):
        m = TestMatrix([[1, 0], [0, 1]])
        with pytest.raises(DimensionMismatchError):
            noiseless_outcome(m, InputVector(3, [0]))


class TestApplyNoise:
    def test_q_zero_is_identity(self):
        y = ResultVector([1, 0, 1, 0, 1])
        noisy, noise = apply_noise(y, NoiseChannel(0.0), rng_from(5))
        assert noisy == y
        assert noise.weight() == 0

    def test_flip_count_concentrates(self):
        # Binomial(1e5, 0.1): observed weight within 3 sigma of the mean
        t = 10**5
        y = ResultVector(np.zeros(t, dtype=bool))
        noisy, noise = apply_noise(y, NoiseChannel(0.1), rng_from(6))
        assert noisy == noise  # zero vector picks up exactly the flips
        slack = 3 * math.sqrt(t * 0.1 * 0.9)
        assert abs(noise.weight() - t * 0.1) <= slack

    def test_all_zero_input_near_half(self):
        t = 10**5
        y = ResultVector(np.zeros(t, dtype=bool))
        q = 0.499
        _, noise = apply_noise(y, NoiseChannel(q), rng_from(7))
        slack = 3 * math.sqrt(t * q * (1 - q))
        assert abs(noise.weight() - t * q) <= slack

    def test_xor_involution(self):
        rng = rng_from(8)
        for _ in range(20):
            t = int(rng.integers(1, 200))
            y = ResultVector(rng.random(t) < 0.5)
            noisy, noise = apply_noise(y, NoiseChannel(0.3), rng)
            assert (noisy ^ noise) == y
            assert (y ^ noise) == noisy


class TestTextFormats:
    def test_matrix_round_trip(self):
        rng = rng_from(9)
        m = TestMatrix(rng.random((6, 11)) < 0.4)
        text = format_matrix(m)
        lines = text.splitlines()
        assert lines[0] == "6 11"
        assert len(lines) == 7
        assert text.endswith("\n")
        assert parse_matrix(text) == m

    def test_matrix_file_round_trip(self, tmp_path):
        rng = rng_from(10)
        m = TestMatrix(rng.random((4, 9)) < 0.5)
        path = tmp_path / "m.txt"
        write_matrix(m, path)
        assert read_matrix(path) == m

    def test_parse_errors_carry_line_numbers(self):
        with pytest.raises(TextFormatError) as exc:
            parse_matrix("")
        assert exc.value.line == 1

        with pytest.raises(TextFormatError) as exc:
            parse_matrix("2\n10\n01\n")
        assert exc.value.line == 1

        with pytest.raises(TextFormatError) as exc:
            parse_matrix("2 2\n10\n")  # truncated: second row missing
        assert exc.value.line == 3
        assert "line 3" in str(exc.value)

        with pytest.raises(TextFormatError) as exc:
            parse_matrix("2 2\n10\n012\n")  # wrong width
        assert exc.value.line == 3

        with pytest.raises(TextFormatError) as exc:
            parse_matrix("2 2\n10\n0x\n")  # bad character
        assert exc.value.line == 3

        with pytest.raises(TextFormatError) as exc:
            parse_matrix("1 2\n10\nextra\n")
        assert exc.value.line == 3

    def test_vector_line_round_trip(self):
        bits = np.array([True, False, True, True])
        assert format_bits(bits) == "1011\n"
        assert parse_bits_line("1011\n").tolist() == bits.tolist()
        with pytest.raises(TextFormatError):
            parse_bits_line("")
        with pytest.raises(TextFormatError):
            parse_bits_line("10a1")
