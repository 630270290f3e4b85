"""Gaussian extremal entropy toolkit.

Closed-form constructions for entropy-difference optimization over
covariance bands, independent grid-quadrature verification of the
underlying inequalities, and two application solvers (broadcast
covariance design, LMMSE information bound), tied together by a
reproducible command-line interface.
"""

from .applications import (
    BroadcastDesign,
    BroadcastInstance,
    design_private_message,
    lmmse_matrix,
    mi_lower_bound,
)
from .construct import (
    ConstructionCertificate,
    EEIInstance,
    construct_k,
    construct_l,
    dominating_gaussian,
    eei_optimum,
    f_alpha,
    f_alpha_argmax,
    matched_alpha,
    objective_single_noise,
    objective_two_noise,
)
from .errors import (
    BadMu,
    DimensionMismatch,
    DominationFailed,
    EEIKitError,
    GridTooCoarse,
    InconsistentDensity,
    InvalidParameter,
    NoConvergence,
    NotPositiveDefinite,
    SeparationFailed,
    SingularCovariance,
    SplitInfeasible,
    ThresholdUnreachable,
    UnnormalizedDensity,
)
from .gaussmat import (
    LOG_2PI_E,
    CovMatrix,
    MarkovTriple,
    SimDiagResult,
    cov_from_json,
    cov_to_json,
    gaussian_conditional_cov,
    gaussian_entropy,
    load_cov,
    markov_residual,
    psd_leq,
    psd_project,
    simdiag,
    spectral_scale,
    symmetrize,
)
from .oracle import (
    EntropyEstimate,
    GridDensity,
    VerificationReport,
    check_eei,
    check_epi,
    check_worst_noise,
    convolve_density,
    entropy_quadrature,
    gaussian_search,
    variational_first_residual,
    variational_second_form,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "LOG_2PI_E",
    "CovMatrix",
    "SimDiagResult",
    "MarkovTriple",
    "symmetrize",
    "spectral_scale",
    "psd_leq",
    "psd_project",
    "simdiag",
    "gaussian_entropy",
    "gaussian_conditional_cov",
    "markov_residual",
    "cov_from_json",
    "cov_to_json",
    "load_cov",
    "EEIInstance",
    "ConstructionCertificate",
    "construct_l",
    "construct_k",
    "dominating_gaussian",
    "eei_optimum",
    "objective_single_noise",
    "objective_two_noise",
    "matched_alpha",
    "f_alpha",
    "f_alpha_argmax",
    "GridDensity",
    "EntropyEstimate",
    "VerificationReport",
    "entropy_quadrature",
    "convolve_density",
    "check_epi",
    "check_worst_noise",
    "check_eei",
    "gaussian_search",
    "variational_first_residual",
    "variational_second_form",
    "BroadcastInstance",
    "BroadcastDesign",
    "design_private_message",
    "lmmse_matrix",
    "mi_lower_bound",
    "EEIKitError",
    "BadMu",
    "DimensionMismatch",
    "DominationFailed",
    "GridTooCoarse",
    "InconsistentDensity",
    "InvalidParameter",
    "NoConvergence",
    "NotPositiveDefinite",
    "SeparationFailed",
    "SingularCovariance",
    "SplitInfeasible",
    "ThresholdUnreachable",
    "UnnormalizedDensity",
]
