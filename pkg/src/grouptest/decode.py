"""The four decoders, mapping (matrix, observed outcomes) to per-item calls.

CBP works row-wise: every item that shows up in a negative test is cleared,
and whatever is left is declared defective. COMP and NCOMP work column-wise:
an item is declared defective when its column is (exactly or approximately)
contained in the observed positives. NCBP majority-votes each group of
repeated tests and then runs CBP on the folded outcomes.

Items whose column is all-zero were never tested. COMP and NCOMP declare
them non-defective (an untested item carries no evidence of defectiveness);
CBP's complement formula unavoidably declares them defective because nothing
can clear them. Both cases are flagged in the report so callers can tell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidInstanceError, InvalidNoiseError
from .model import EstimateVector, ResultVector, TestMatrix

__all__ = [
    "DecodeReport",
    "decode_cbp",
    "decode_comp",
    "decode_ncbp",
    "decode_ncomp",
]


@dataclass(frozen=True)
class DecodeReport:
    """Estimate plus per-item diagnostics.

    ``never_tested`` marks items with an all-zero column. For the noisy
    containment decoder, ``indicator_sizes[j]`` is the number of tests that
    pooled item j, ``matching_sizes[j]`` is how many of those came back
    positive, and ``margins[j]`` is matching_sizes[j] minus the acceptance
    threshold (declared defective iff the margin is >= 0 and the item was
    tested at all).
    """

    estimate: EstimateVector
    never_tested: np.ndarray
    indicator_sizes: np.ndarray | None = None
    matching_sizes: np.ndarray | None = None
    margins: np.ndarray | None = None


def _check_dims(matrix: TestMatrix, y: ResultVector) -> None:
    if y.length != matrix.rows:
        raise DimensionMismatchError(
            f"outcome vector has {y.length} entries but the matrix has {matrix.rows} tests"
        )


def decode_cbp(matrix: TestMatrix, y: ResultVector) -> DecodeReport:
    """Clear every item appearing in a negative test; the rest are defective."""
    _check_dims(matrix, y)
    negative = ~y.to_bits()
    # bitwise_or has identity 0: with no negative tests nothing is cleared
    cleared_packed = np.bitwise_or.reduce(matrix.row_bits[negative], axis=0)
    cleared = np.unpackbits(cleared_packed, count=matrix.cols).astype(bool)
    never_tested = matrix.column_weights() == 0
    return DecodeReport(EstimateVector(~cleared), never_tested)


def decode_comp(matrix: TestMatrix, y: ResultVector) -> DecodeReport:
    """Declare an item defective iff every test that pooled it came back positive."""
    _check_dims(matrix, y)
    sticking_out = matrix.col_bits & ~y.bits
    contained = ~sticking_out.any(axis=1)
    never_tested = matrix.column_weights() == 0
    return DecodeReport(EstimateVector(contained & ~never_tested), never_tested)


def decode_ncbp(matrix: TestMatrix, y_observed: ResultVector, repetition: int) -> DecodeReport:
    """Majority-vote each group of ``repetition`` consecutive outcomes, then CBP.

    Observed entry i*K + k is the k-th rerun of base test i; a group counts
    as positive when at least half its observations are positive, so an
    exact tie at even K resolves to positive.
    """
    if repetition < 1:
        raise InvalidInstanceError(f"repetition factor must be >= 1, got {repetition}")
    if y_observed.length % repetition != 0:
        raise DimensionMismatchError(
            f"observed vector length {y_observed.length} is not divisible by "
            f"the repetition factor {repetition}"
        )
    if y_observed.length != matrix.rows * repetition:
        raise DimensionMismatchError(
            f"observed vector has {y_observed.length} entries, expected "
            f"{matrix.rows} base tests x {repetition} repeats"
        )
    counts = y_observed.to_bits().reshape(matrix.rows, repetition).sum(axis=1)
    majority = 2 * counts >= repetition
    return decode_cbp(matrix, ResultVector(majority))


def decode_ncomp(
    matrix: TestMatrix, y_observed: ResultVector, q: float, slack: float
) -> DecodeReport:
    """Relaxed containment for noisy outcomes.

    Item j is declared defective iff
    matching_sizes[j] >= indicator_sizes[j] * (1 - q*(1 + slack)),
    with the right-hand side compared as an exact real (no rounding).
    """
    _check_dims(matrix, y_observed)
    if not 0.0 <= q < 0.5:
        raise InvalidNoiseError(f"flip probability must lie in [0, 0.5), got {q}")
    if slack < 0:
        raise InvalidInstanceError(f"threshold slack must be nonnegative, got {slack}")
    sizes = matrix.column_weights()
    matches = np.bitwise_count(matrix.col_bits & y_observed.bits).sum(axis=1, dtype=np.int64)
    threshold = sizes * (1.0 - q * (1.0 + slack))
    never_tested = sizes == 0
    declared = (matches >= threshold) & ~never_tested
    return DecodeReport(
        EstimateVector(declared),
        never_tested,
        indicator_sizes=sizes,
        matching_sizes=matches,
        margins=matches - threshold,
    )
