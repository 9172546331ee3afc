"""Core domain types: pooling matrix, input/outcome vectors, noise channel.

The matrix keeps two bit-packed copies of the same data, one packed along
rows and one along columns, because the decoders naturally scan one way or
the other: CBP folds whole rows together, COMP and NCOMP scan columns.
Padding bits past the logical width are always zero, so popcounts and
boolean reductions over the packed bytes never need masking.

Everything here is immutable after construction, so instances can be shared
freely across worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidNoiseError, TextFormatError

__all__ = [
    "TestMatrix",
    "InputVector",
    "ResultVector",
    "EstimateVector",
    "NoiseChannel",
    "noiseless_outcome",
    "apply_noise",
    "format_matrix",
    "parse_matrix",
    "read_matrix",
    "write_matrix",
    "format_bits",
    "parse_bits_line",
    "read_vector",
    "write_vector",
]


def _as_bit_array(data, ndim: int) -> np.ndarray:
    arr = np.asarray(data)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array of bits, got shape {arr.shape}")
    if arr.dtype != np.bool_:
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("entries must all be 0 or 1")
        arr = arr.astype(bool)
    return arr


def _popcount(packed: np.ndarray) -> np.ndarray:
    return np.bitwise_count(packed).sum(axis=-1, dtype=np.int64)


def _bits_to01(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in bits)


class TestMatrix:
    """A T x n binary pooling design.

    Row i is the set of items drawn into test i; column j is the set of
    tests that contain item j.
    """

    __test__ = False  # keep pytest from collecting this as a test case
    __slots__ = ("rows", "cols", "row_bits", "col_bits")

    def __init__(self, bits) -> None:
        dense = _as_bit_array(bits, 2)
        if dense.shape[0] < 1 or dense.shape[1] < 1:
            raise ValueError(f"matrix must be at least 1x1, got shape {dense.shape}")
        self.rows, self.cols = (int(s) for s in dense.shape)
        row_bits = np.packbits(dense, axis=1)
        col_bits = np.packbits(dense.T, axis=1)
        row_bits.setflags(write=False)
        col_bits.setflags(write=False)
        self.row_bits = row_bits
        self.col_bits = col_bits

    def row(self, i: int) -> np.ndarray:
        """Items pooled into test i, as a boolean mask of length n."""
        return np.unpackbits(self.row_bits[i], count=self.cols).astype(bool)

    def column(self, j: int) -> np.ndarray:
        """Tests containing item j, as a boolean mask of length T."""
        return np.unpackbits(self.col_bits[j], count=self.rows).astype(bool)

    def entry(self, i: int, j: int) -> int:
        # packbits stores the first bit of each byte in the high position
        return int((self.row_bits[i, j >> 3] >> (7 - (j & 7))) & 1)

    def to_dense(self) -> np.ndarray:
        return np.unpackbits(self.row_bits, axis=1, count=self.cols).astype(bool)

    def row_weights(self) -> np.ndarray:
        """Number of items in each test."""
        return _popcount(self.row_bits)

    def column_weights(self) -> np.ndarray:
        """Number of tests each item appears in; zero means never tested."""
        return _popcount(self.col_bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TestMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.row_bits, other.row_bits)
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.row_bits.tobytes()))

    def __repr__(self) -> str:
        return f"TestMatrix(rows={self.rows}, cols={self.cols})"


class ResultVector:
    """A length-T vector of test outcomes, bit-packed."""

    __slots__ = ("length", "bits")

    def __init__(self, bits) -> None:
        dense = _as_bit_array(bits, 1)
        if dense.size < 1:
            raise ValueError("result vector must have at least one entry")
        self.length = int(dense.size)
        packed = np.packbits(dense)
        packed.setflags(write=False)
        self.bits = packed

    @classmethod
    def from_packed(cls, packed: np.ndarray, length: int) -> "ResultVector":
        """Wrap already-packed bytes, zeroing any padding bits."""
        if length < 1:
            raise ValueError("result vector must have at least one entry")
        packed = np.array(packed, dtype=np.uint8)  # private copy
        if packed.ndim != 1 or packed.size != (length + 7) // 8:
            raise ValueError(
                f"packed buffer has {packed.size} bytes, expected {(length + 7) // 8}"
            )
        rem = length % 8
        if rem:
            packed[-1] &= (0xFF << (8 - rem)) & 0xFF
        packed.setflags(write=False)
        out = cls.__new__(cls)
        out.length = int(length)
        out.bits = packed
        return out

    def to_bits(self) -> np.ndarray:
        return np.unpackbits(self.bits, count=self.length).astype(bool)

    def weight(self) -> int:
        """Number of positive outcomes."""
        return int(_popcount(self.bits))

    def to01(self) -> str:
        return _bits_to01(self.to_bits())

    def __xor__(self, other: "ResultVector") -> "ResultVector":
        if not isinstance(other, ResultVector):
            return NotImplemented
        if self.length != other.length:
            raise DimensionMismatchError(
                f"cannot xor outcome vectors of lengths {self.length} and {other.length}"
            )
        return ResultVector.from_packed(self.bits ^ other.bits, self.length)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResultVector):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.length, self.bits.tobytes()))

    def __len__(self) -> int:
        return self.length

    def __repr__(self) -> str:
        return f"ResultVector(length={self.length}, weight={self.weight()})"


class EstimateVector:
    """Per-item defective / non-defective calls produced by a decoder."""

    __slots__ = ("length", "bits")

    def __init__(self, bits) -> None:
        dense = _as_bit_array(bits, 1).copy()
        if dense.size < 1:
            raise ValueError("estimate vector must have at least one entry")
        dense.setflags(write=False)
        self.length = int(dense.size)
        self.bits = dense

    def support(self) -> np.ndarray:
        """Indices of items declared defective, ascending."""
        return np.flatnonzero(self.bits)

    def to01(self) -> str:
        return _bits_to01(self.bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EstimateVector):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.length, self.bits.tobytes()))

    def __len__(self) -> int:
        return self.length

    def __repr__(self) -> str:
        return f"EstimateVector(length={self.length}, declared={len(self.support())})"


class InputVector:
    """Length-n item status vector given by an explicit defective support set.

    The decoders never see this type; it exists so simulations can draw a
    ground truth and score estimates against it.
    """

    __slots__ = ("length", "support")

    def __init__(self, length: int, support=()) -> None:
        length = int(length)
        if length < 1:
            raise ValueError("input vector must have at least one item")
        idx = np.unique(np.asarray(list(support), dtype=np.int64))
        if idx.size and (idx[0] < 0 or idx[-1] >= length):
            raise ValueError(f"support indices must lie in [0, {length})")
        if idx.size >= length:
            raise ValueError("defective count must be strictly less than the item count")
        idx.setflags(write=False)
        self.length = length
        self.support = idx

    @classmethod
    def from_bits(cls, bits) -> "InputVector":
        dense = _as_bit_array(bits, 1)
        return cls(dense.size, np.flatnonzero(dense))

    @property
    def d(self) -> int:
        """Number of defective items."""
        return int(self.support.size)

    def to_bits(self) -> np.ndarray:
        bits = np.zeros(self.length, dtype=bool)
        bits[self.support] = True
        return bits

    def __eq__(self, other) -> bool:
        if not isinstance(other, InputVector):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.support, other.support)

    def __hash__(self) -> int:
        return hash((self.length, self.support.tobytes()))

    def __len__(self) -> int:
        return self.length

    def __repr__(self) -> str:
        return f"InputVector(length={self.length}, d={self.d})"


@dataclass(frozen=True)
class NoiseChannel:
    """Binary symmetric channel flipping each outcome independently with probability q."""

    q: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.q < 0.5:
            raise InvalidNoiseError(
                f"flip probability must lie in [0, 0.5), got {self.q}"
            )


def noiseless_outcome(matrix: TestMatrix, x: InputVector) -> ResultVector:
    """OR together the columns of the defective items: y_i = 1 iff test i hits one."""
    if matrix.cols != x.length:
        raise DimensionMismatchError(
            f"input vector has {x.length} items but the matrix has {matrix.cols}"
        )
    # bitwise_or has identity 0, so an empty support reduces to all-negative
    packed = np.bitwise_or.reduce(matrix.col_bits[x.support], axis=0)
    return ResultVector.from_packed(packed, matrix.rows)


def apply_noise(
    y: ResultVector, channel: NoiseChannel, rng: np.random.Generator
) -> tuple[ResultVector, ResultVector]:
    """Flip each outcome independently; returns (noisy outcomes, flip mask).

    XOR-ing the flip mask back onto the noisy vector recovers the original.
    """
    flips = rng.random(y.length) < channel.q
    noise = ResultVector(flips)
    return y ^ noise, noise


# --- text interchange -------------------------------------------------------
#
# Matrix files: a "T n" header line, then T lines of n characters from {0,1}.
# Vector files: a single line of {0,1} characters. ASCII, newline-terminated.


def format_matrix(matrix: TestMatrix) -> str:
    dense = matrix.to_dense()
    lines = [f"{matrix.rows} {matrix.cols}"]
    lines.extend(_bits_to01(row) for row in dense)
    return "\n".join(lines) + "\n"


def _line_digits(line: str, what: str, lineno: int) -> np.ndarray:
    try:
        raw = line.encode("ascii")
    except UnicodeEncodeError:
        raise TextFormatError(
            f"{what} may contain only 0 and 1 characters", line=lineno
        ) from None
    digits = np.frombuffer(raw, dtype=np.uint8) - ord("0")
    if digits.size and digits.max() > 1:
        raise TextFormatError(f"{what} may contain only 0 and 1 characters", line=lineno)
    return digits.astype(bool)


def _parse_bit_row(line: str, width: int, lineno: int) -> np.ndarray:
    if len(line) != width:
        raise TextFormatError(
            f"row has {len(line)} columns, expected {width}", line=lineno
        )
    return _line_digits(line, "row", lineno)


def parse_matrix(text: str) -> TestMatrix:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise TextFormatError("missing 'T n' header", line=1)
    parts = lines[0].split()
    if len(parts) != 2:
        raise TextFormatError(
            f"header must be two integers 'T n', got {lines[0]!r}", line=1
        )
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        raise TextFormatError(
            f"header must be two integers 'T n', got {lines[0]!r}", line=1
        ) from None
    if rows < 1 or cols < 1:
        raise TextFormatError(f"dimensions must be positive, got {rows} x {cols}", line=1)
    dense = np.empty((rows, cols), dtype=bool)
    for i in range(rows):
        lineno = i + 2
        if i + 1 >= len(lines):
            raise TextFormatError(
                f"file ends after {i} of {rows} matrix rows", line=lineno
            )
        dense[i] = _parse_bit_row(lines[i + 1], cols, lineno)
    for extra in range(rows + 1, len(lines)):
        if lines[extra].strip():
            raise TextFormatError("unexpected content after the last row", line=extra + 1)
    return TestMatrix(dense)


def read_matrix(path) -> TestMatrix:
    with open(path, "r", encoding="ascii") as fh:
        return parse_matrix(fh.read())


def write_matrix(matrix: TestMatrix, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_matrix(matrix))


def format_bits(bits) -> str:
    arr = _as_bit_array(np.asarray(bits), 1)
    return _bits_to01(arr) + "\n"


def parse_bits_line(text: str, lineno: int = 1) -> np.ndarray:
    """Parse one line of 0/1 characters into a boolean array."""
    lines = text.splitlines()
    line = lines[0] if lines else ""
    if not line:
        raise TextFormatError("expected a line of 0/1 characters", line=lineno)
    return _line_digits(line, "vector", lineno)


def read_vector(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        return parse_bits_line(fh.read())


def write_vector(bits, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_bits(bits))
