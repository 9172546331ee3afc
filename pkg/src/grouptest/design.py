"""Random pooling designs and the closed-form knobs for each algorithm.

Four algorithms are supported:

* ``cbp``   - each test samples a fixed number of items with replacement;
              decoding clears items seen in negative tests.
* ``comp``  - i.i.d. Bernoulli design; decoding checks column containment.
* ``ncbp``  - the cbp design with every test repeated K times and majority
              voting, for noisy channels.
* ``ncomp`` - Bernoulli design with a relaxed containment threshold, for
              noisy channels.

Every integer knob produced here (test counts, group size, repetition
factor) rounds up: extra tests can only lower the error probability, so a
single conservative convention keeps the guarantees intact and the results
easy to reproduce.

Test-count coefficients follow each formula's native logarithm: cbp, comp
and ncbp count tests per d*ln(n), ncomp per d*log2(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidInstanceError,
    InvalidNoiseError,
    UseNoiselessError,
)
from .model import TestMatrix

__all__ = [
    "ALGORITHMS",
    "DesignParams",
    "cbp_matrix",
    "bernoulli_matrix",
    "ncbp_matrix",
    "cbp_group_size",
    "cbp_test_count",
    "comp_params",
    "ncbp_repetition",
    "exponent_ratio",
    "ncomp_threshold_slack",
    "ncomp_test_coefficient",
    "ncomp_params",
]

ALGORITHMS = ("cbp", "comp", "ncbp", "ncomp")

# Optimal density scale for the noisy containment decoder: the error-rate
# coefficient 2e/(1 - e^(-2a)) * ln2 * ... is minimised at a = 0.5.
NCOMP_DENSITY_SCALE = 0.5


def _require_instance(n: int, d: int) -> None:
    if d < 1 or d >= n:
        raise InvalidInstanceError(
            f"need 1 <= d < n, got d={d}, n={n}"
        )


def _require_noise(q: float) -> None:
    if not 0.0 <= q < 0.5:
        raise InvalidNoiseError(f"flip probability must lie in [0, 0.5), got {q}")


def _require_exponent(delta: float) -> None:
    if delta < 0:
        raise InvalidInstanceError(f"error exponent must be nonnegative, got {delta}")


@dataclass(frozen=True)
class DesignParams:
    """Resolved knobs for one algorithm on one problem instance.

    ``test_coefficient`` is the constant in the test-count formula:
    tests = coefficient * d * ln(n) for cbp/comp/ncbp, and
    tests = coefficient * d * log2(n) for ncomp.
    """

    algorithm: str
    tests: int
    group_size: int | None = None
    density: float | None = None
    repetition: int | None = None
    density_scale: float | None = None
    threshold_slack: float | None = None
    test_coefficient: float | None = None

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise InvalidInstanceError(f"unknown algorithm {self.algorithm!r}")
        if self.tests < 1:
            raise InvalidInstanceError(f"test count must be >= 1, got {self.tests}")
        if self.group_size is not None and self.group_size < 1:
            raise InvalidInstanceError(
                f"group size must be >= 1, got {self.group_size}"
            )
        # density 1.0 only arises from the degenerate d=1 containment design
        if self.density is not None and not 0.0 < self.density <= 1.0:
            raise InvalidInstanceError(
                f"test density must lie in (0, 1], got {self.density}"
            )
        if self.repetition is not None and self.repetition < 1:
            raise InvalidInstanceError(
                f"repetition factor must be >= 1, got {self.repetition}"
            )
        if self.density_scale is not None and self.density_scale <= 0:
            raise InvalidInstanceError(
                f"density scale must be positive, got {self.density_scale}"
            )
        if self.threshold_slack is not None and self.threshold_slack <= 0:
            raise InvalidInstanceError(
                f"threshold slack must be positive, got {self.threshold_slack}"
            )


# --- matrix generators -------------------------------------------------------


def cbp_matrix(n: int, tests: int, group_size: int, rng: np.random.Generator) -> TestMatrix:
    """Each test independently samples ``group_size`` items with replacement.

    Rows therefore hold at most ``group_size`` distinct items, possibly
    fewer when the sampler repeats itself.
    """
    if n < 1 or tests < 1:
        raise InvalidInstanceError(f"need n >= 1 and tests >= 1, got n={n}, tests={tests}")
    if group_size < 1:
        raise InvalidInstanceError(f"group size must be >= 1, got {group_size}")
    dense = np.zeros((tests, n), dtype=bool)
    draws = rng.integers(0, n, size=(tests, group_size))
    dense[np.repeat(np.arange(tests), group_size), draws.ravel()] = True
    return TestMatrix(dense)


def bernoulli_matrix(n: int, tests: int, density: float, rng: np.random.Generator) -> TestMatrix:
    """Every entry is an independent Bernoulli(density) draw."""
    if n < 1 or tests < 1:
        raise InvalidInstanceError(f"need n >= 1 and tests >= 1, got n={n}, tests={tests}")
    if not 0.0 < density <= 1.0:
        raise InvalidInstanceError(f"test density must lie in (0, 1], got {density}")
    dense = rng.random((tests, n)) < density
    return TestMatrix(dense)


def ncbp_matrix(base: TestMatrix, repetition: int) -> TestMatrix:
    """Repeat each base row ``repetition`` times consecutively.

    Observed row i*K + k (0 <= k < K) is a rerun of base row i, so majority
    voting can fold the observation back onto the base design.
    """
    if repetition < 1:
        raise InvalidInstanceError(f"repetition factor must be >= 1, got {repetition}")
    return TestMatrix(np.repeat(base.to_dense(), repetition, axis=0))


# --- closed-form knobs -------------------------------------------------------


def cbp_group_size(n: int, d: int) -> int:
    """Per-test sample count that maximises the chance a test is negative.

    The optimum of the negative-test rate is 1/ln(n/(n-d)); rounding up
    matches the conservative convention used for every other integer knob.
    """
    _require_instance(n, d)
    return max(1, math.ceil(1.0 / math.log(n / (n - d))))


def cbp_test_count(n: int, d: int, delta: float) -> int:
    """Tests needed by the clear-by-negatives decoder: ceil(2(1+delta) e d ln n)."""
    _require_instance(n, d)
    _require_exponent(delta)
    return math.ceil(2.0 * (1.0 + delta) * math.e * d * math.log(n))


def comp_params(n: int, d: int, delta: float) -> DesignParams:
    """Bernoulli design sized for exact containment decoding.

    Density 1/d maximises the rate at which a non-defective item is exposed
    by a negative test; tests = ceil((1+delta) e d ln n) then drives the
    failure probability below n^-delta.
    """
    _require_instance(n, d)
    _require_exponent(delta)
    coefficient = (1.0 + delta) * math.e
    return DesignParams(
        algorithm="comp",
        tests=math.ceil(coefficient * d * math.log(n)),
        density=1.0 / d,
        test_coefficient=coefficient,
    )


def _ncbp_repetition_raw(n: int, d: int, delta: float, q: float) -> float:
    return (
        2.0
        * (math.log(math.log(n)) + math.log(d) + delta * math.log(n)
           + 1.0 + math.log(2.0 * (1.0 + delta)))
        / (1.0 - 2.0 * q) ** 2
    )


def ncbp_repetition(n: int, d: int, delta: float, q: float) -> int:
    """Votes per test so that majority decoding undoes channel flips.

    Grows like (1-2q)^-2: the repetition budget exactly offsets the
    channel's quadratic shrinking of the majority-vote margin. Requires
    n >= 3 so the ln ln n term is positive.
    """
    if n < 3:
        raise InvalidInstanceError(f"repetition formula needs n >= 3, got n={n}")
    _require_instance(n, d)
    _require_exponent(delta)
    _require_noise(q)
    return math.ceil(_ncbp_repetition_raw(n, d, delta, q))


def exponent_ratio(n: int, d: int, delta: float) -> float:
    """Finite-n ratio (ln d + delta ln n) / (ln(n-d) + delta ln n).

    Tends to delta/(1+delta) from above as n grows with d fixed; the noisy
    containment threshold uses it to trade false positives against false
    negatives at finite sizes.
    """
    _require_instance(n, d)
    _require_exponent(delta)
    denom = math.log(n - d) + delta * math.log(n)
    if denom <= 0:
        raise InvalidInstanceError(
            f"exponent ratio undefined for n={n}, d={d}, delta={delta}"
        )
    return (math.log(d) + delta * math.log(n)) / denom


def ncomp_threshold_slack(density_scale: float, q: float, ratio: float) -> float:
    """Optimal slack for the noisy containment threshold.

    slack = e^-a (1 - 2q) / (q (1 + ratio^-1/2)) balances the two error
    exponents; positive whenever 0 < q < 0.5.
    """
    if density_scale <= 0:
        raise InvalidInstanceError(
            f"density scale must be positive, got {density_scale}"
        )
    if ratio <= 0:
        raise InvalidInstanceError(f"exponent ratio must be positive, got {ratio}")
    if q == 0.0:
        raise UseNoiselessError(
            "threshold slack diverges at q = 0; use the noiseless containment decoder"
        )
    _require_noise(q)
    return (
        math.exp(-density_scale)
        * (1.0 - 2.0 * q)
        / (q * (1.0 + 1.0 / math.sqrt(ratio)))
    )


def ncomp_test_coefficient(delta: float, q: float) -> float:
    """Tests per d*log2(n) for the noisy containment decoder.

    2e (sqrt(delta) + sqrt(1+delta))^2 ln2 / ((1 - e^-2)(1 - 2q)^2), using
    the exact leading constant 2e ln2/(1 - e^-2) = 4.3581... (4.36 to three
    figures).
    """
    _require_exponent(delta)
    if q == 0.0:
        raise UseNoiselessError(
            "noisy test count diverges from the noiseless one at q = 0; "
            "use the noiseless containment decoder"
        )
    _require_noise(q)
    lead = 2.0 * math.e * math.log(2.0) / (1.0 - math.exp(-2.0))
    return (
        lead
        * (math.sqrt(delta) + math.sqrt(1.0 + delta)) ** 2
        / (1.0 - 2.0 * q) ** 2
    )


def ncomp_params(n: int, d: int, delta: float, q: float) -> DesignParams:
    """Bernoulli design plus relaxed threshold for noisy containment decoding.

    Density is 0.5/d (half the noiseless density, which halves the hiding
    probability bound), the slack calibrates the per-column threshold
    |matches| >= |column| (1 - q (1 + slack)), and the test count is
    ceil(coefficient * d * log2 n).

    Raises UseNoiselessError for q = 0: the slack formula degenerates and
    plain containment decoding is strictly better.
    """
    _require_instance(n, d)
    _require_exponent(delta)
    if q == 0.0:
        raise UseNoiselessError(
            "noisy containment design is undefined at q = 0; "
            "use the noiseless containment design instead"
        )
    _require_noise(q)
    ratio = exponent_ratio(n, d, delta)
    slack = ncomp_threshold_slack(NCOMP_DENSITY_SCALE, q, ratio)
    coefficient = ncomp_test_coefficient(delta, q)
    # Chernoff validity window: the relaxed threshold must stay above the
    # pure-noise matching rate, i.e. 1 - q(1 + slack) > q.
    if not 1.0 - q * (1.0 + slack) > q:
        raise InvalidInstanceError(
            f"threshold slack {slack} leaves no decoding margin at q={q}"
        )
    return DesignParams(
        algorithm="ncomp",
        tests=math.ceil(coefficient * d * math.log2(n)),
        density=NCOMP_DENSITY_SCALE / d,
        density_scale=NCOMP_DENSITY_SCALE,
        threshold_slack=slack,
        test_coefficient=coefficient,
    )
