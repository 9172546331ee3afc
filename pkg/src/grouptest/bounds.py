"""Information-theoretic test-count bounds for probabilistic group testing.

Lower bounds come from a counting/Fano argument and hold for any
non-adaptive scheme; upper bounds are the achievable test counts of the
four implemented algorithms and delegate to the design module's formulas.

All bounds are returned as reals. Rounding up to an integer test count
happens only where a count is actually consumed (design, sim); that keeps
these values composable without double rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import design
from .errors import InvalidInstanceError, InvalidNoiseError, UseNoiselessError

__all__ = [
    "BoundReport",
    "binary_entropy",
    "noiseless_lower_bound",
    "noisy_lower_bound",
    "upper_bounds",
    "ncomp_hiding_probability",
]


def binary_entropy(q: float) -> float:
    """Entropy in bits of a Bernoulli(q) variable, with 0 log 0 = 0."""
    if not 0.0 <= q <= 1.0:
        raise InvalidNoiseError(f"entropy argument must lie in [0, 1], got {q}")
    if q == 0.0 or q == 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def _require_instance(n: int, d: int) -> None:
    if d < 1 or d >= n:
        raise InvalidInstanceError(f"need 1 <= d < n, got d={d}, n={n}")


def _require_eps(eps: float) -> None:
    if not 0.0 <= eps <= 1.0:
        raise InvalidInstanceError(
            f"acceptable error probability must lie in [0, 1], got {eps}"
        )


def noiseless_lower_bound(n: int, d: int, eps: float) -> float:
    """Minimum tests for success probability 1 - eps: (1-eps) d log2(n/d)."""
    _require_instance(n, d)
    _require_eps(eps)
    return (1.0 - eps) * d * math.log2(n / d)


def noisy_lower_bound(n: int, d: int, eps: float, q: float) -> float:
    """Noiseless lower bound inflated by the channel capacity loss 1 - H(q)."""
    if not 0.0 <= q < 0.5:
        raise InvalidNoiseError(f"flip probability must lie in [0, 0.5), got {q}")
    return noiseless_lower_bound(n, d, eps) / (1.0 - binary_entropy(q))


def ncomp_hiding_probability(d: int, q: float, alpha: float) -> float:
    """Chance a fixed test pooling a non-defective item looks consistent anyway.

    Exact form 1 - q - (1 - alpha/d)^d (1 - 2q): the test can be hidden by a
    defective item sharing it, or flipped by the channel. Lower-bounded by
    (1-q) - e^-alpha (1-2q) for every d >= 1.
    """
    if d < 1:
        raise InvalidInstanceError(f"defective count must be >= 1, got {d}")
    if not 0.0 <= q < 0.5:
        raise InvalidNoiseError(f"flip probability must lie in [0, 0.5), got {q}")
    if not 0.0 < alpha < d:
        raise InvalidInstanceError(
            f"density scale must lie in (0, d), got alpha={alpha}, d={d}"
        )
    return 1.0 - q - (1.0 - alpha / d) ** d * (1.0 - 2.0 * q)


@dataclass(frozen=True)
class BoundReport:
    """Lower and upper test-count bounds for one problem instance.

    Lower bounds are evaluated at eps = n^-delta so they are comparable with
    the upper bounds, which guarantee error at most n^-delta. Entries are
    None where the needed parameter was not supplied (q) or where the
    algorithm does not apply (noisy containment at q = 0).
    """

    n: int
    d: int
    delta: float
    eps: float
    q: float | None
    lower_noiseless: float
    lower_noisy: float | None
    upper_cbp: float
    upper_comp: float
    upper_ncbp: float | None
    upper_ncomp: float | None


def upper_bounds(n: int, d: int, delta: float, q: float | None = None) -> BoundReport:
    """Achievable test counts of the four algorithms, plus matching lower bounds.

    The noisy entries need q; they are None when q is omitted. The noisy
    containment entry is also None at q = 0, where that design is undefined
    and plain containment should be used instead.
    """
    _require_instance(n, d)
    if delta < 0:
        raise InvalidInstanceError(f"error exponent must be nonnegative, got {delta}")
    eps = float(n) ** (-delta)
    lower_noiseless = noiseless_lower_bound(n, d, eps)
    lower_noisy = None
    upper_ncbp = None
    upper_ncomp = None
    if q is not None:
        lower_noisy = noisy_lower_bound(n, d, eps, q)
        upper_ncbp = float(
            design.cbp_test_count(n, d, delta) * design.ncbp_repetition(n, d, delta, q)
        )
        try:
            upper_ncomp = float(design.ncomp_params(n, d, delta, q).tests)
        except UseNoiselessError:
            upper_ncomp = None
    return BoundReport(
        n=n,
        d=d,
        delta=delta,
        eps=eps,
        q=q,
        lower_noiseless=lower_noiseless,
        lower_noisy=lower_noisy,
        upper_cbp=float(design.cbp_test_count(n, d, delta)),
        upper_comp=float(design.comp_params(n, d, delta).tests),
        upper_ncbp=upper_ncbp,
        upper_ncomp=upper_ncomp,
    )
