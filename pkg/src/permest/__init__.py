"""Permanents of Hermitian positive semidefinite matrices.

Coherent-state Monte Carlo estimation with Hoeffding guarantees, exact
oracles (naive, Ryser, Glynn), Gurvits' baseline estimator, and the
spectral regime conditions and bounds that go with the estimator.
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DimensionTooLarge,
    InvalidC,
    InvalidInput,
    NegativeSpectrumEntry,
    NonFiniteEntry,
    NotHermitian,
    NotPositiveSemidefinite,
    NotSquare,
    NumericalFailure,
    ParseError,
    PermestError,
    RegimeNotSatisfied,
    SampleOverflow,
    ZeroEigenvalue,
    ZeroMatrix,
)
from .spectra import (
    HpsmMatrix,
    SpectralDecomposition,
    gen_from_spectrum,
    gen_random_hpsm,
    haar_unitary,
    spectral_decompose,
    validate_hpsm,
)
from .exact import ExactMethod, permanent, permanent_glynn_exact, permanent_naive, permanent_ryser
from .estimator import (
    ErrorMode,
    EstimateResult,
    ModeKind,
    ScalePlan,
    estimate_permanent,
    log_p_cs,
    make_scale_plan,
    optimize_scale,
    plan_samples,
    sample_alpha,
    transform_beta,
)
from .gurvits import GurvitsResult, glynn_sample, gurvits_estimate, gurvits_sample_size
from .regimes import (
    RegimeReport,
    Verdict,
    analyze,
    check_s1,
    check_s2,
    check_s3,
    geo_mean_a,
    geo_mean_d,
    permanent_lower_bound,
    permanent_upper_bound,
)
from .matrixio import read_matrix_file, write_matrix_file
