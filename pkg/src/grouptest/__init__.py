"""Non-adaptive probabilistic group testing.

Random pooling designs, four decoders (clear-by-negatives and containment,
each with a noisy variant), information-theoretic test-count bounds, and a
reproducible Monte Carlo harness with CSV output.
"""

from .bounds import (
    BoundReport,
    binary_entropy,
    ncomp_hiding_probability,
    noiseless_lower_bound,
    noisy_lower_bound,
    upper_bounds,
)
from .decode import DecodeReport, decode_cbp, decode_comp, decode_ncbp, decode_ncomp
from .design import (
    ALGORITHMS,
    DesignParams,
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
from .errors import (
    DimensionMismatchError,
    GroupTestError,
    InvalidInstanceError,
    InvalidNoiseError,
    TextFormatError,
    UseNoiselessError,
)
from .model import (
    EstimateVector,
    InputVector,
    NoiseChannel,
    ResultVector,
    TestMatrix,
    apply_noise,
    noiseless_outcome,
)
from .sim import ExperimentSpec, TrialReport, run_cell, run_sweep

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "BoundReport",
    "DecodeReport",
    "DesignParams",
    "DimensionMismatchError",
    "EstimateVector",
    "ExperimentSpec",
    "GroupTestError",
    "InputVector",
    "InvalidInstanceError",
    "InvalidNoiseError",
    "NoiseChannel",
    "ResultVector",
    "TestMatrix",
    "TextFormatError",
    "TrialReport",
    "UseNoiselessError",
    "apply_noise",
    "bernoulli_matrix",
    "binary_entropy",
    "cbp_group_size",
    "cbp_matrix",
    "cbp_test_count",
    "comp_params",
    "decode_cbp",
    "decode_comp",
    "decode_ncbp",
    "decode_ncomp",
    "exponent_ratio",
    "ncbp_matrix",
    "ncbp_repetition",
    "ncomp_hiding_probability",
    "ncomp_params",
    "ncomp_test_coefficient",
    "ncomp_threshold_slack",
    "noiseless_lower_bound",
    "noiseless_outcome",
    "noisy_lower_bound",
    "run_cell",
    "run_sweep",
    "upper_bounds",
]
