"""Distributed-order fractional calculus.

Kernels and symbols of a weight mu on [0, 1], contour inversion of their
Laplace transforms, grid discretizations of the distributed-order
derivative and integral, and matrix checks of the associated Stieltjes
functional calculus.
"""

from ._backend import BACKEND
from .contour import (
    HookContour,
    InverterConfig,
    ScaledValue,
    build_contour,
    eval_kappa,
    eval_m,
    eval_m_cdf,
    eval_m_scaled,
    eval_r_lambda,
)
from .errors import (
    ConfigurationError,
    ContourError,
    DistOrderError,
    DomainError,
    NumericalError,
    PreconditionError,
    StepSizeError,
)
from .funcalc import (
    TriangularMatrix,
    build_A,
    build_J,
    hirsch_apply,
    resolvent_A_kernel,
    semigroup_decay_report,
    verify_inversion_identity,
)
from .gridops import (
    ConvolutionOperator,
    Grid,
    SampledFunction,
    caputo_derivative,
    dist_derivative_bp,
    dist_derivative_conv,
    dist_derivative_def4,
    dist_derivative_spectral,
    dist_integral,
    integral_resolvent_apply,
    resolvent_apply,
    semigroup_apply,
    solve_eigen,
)
from .kernels import (
    AlphaRule,
    KernelEvaluator,
    StieltjesRule,
    cell_mass,
    eval_beta,
    eval_k,
    eval_k_prime,
    eval_K,
    eval_L,
)
from .weights import (
    WeightFunction,
    ZeroBehavior,
    bump_weight,
    eval_weight,
    linear_weight,
    uniform_weight,
    validate,
    weight_from_json,
)

__all__ = [
    "BACKEND",
    "AlphaRule",
    "ConfigurationError",
    "ContourError",
    "ConvolutionOperator",
    "DistOrderError",
    "DomainError",
    "Grid",
    "HookContour",
    "InverterConfig",
    "KernelEvaluator",
    "NumericalError",
    "PreconditionError",
    "SampledFunction",
    "ScaledValue",
    "StepSizeError",
    "StieltjesRule",
    "TriangularMatrix",
    "WeightFunction",
    "ZeroBehavior",
    "build_A",
    "build_J",
    "build_contour",
    "bump_weight",
    "caputo_derivative",
    "cell_mass",
    "dist_derivative_bp",
    "dist_derivative_conv",
    "dist_derivative_def4",
    "dist_derivative_spectral",
    "dist_integral",
    "eval_K",
    "eval_L",
    "eval_beta",
    "eval_k",
    "eval_k_prime",
    "eval_kappa",
    "eval_m",
    "eval_m_cdf",
    "eval_m_scaled",
    "eval_r_lambda",
    "eval_weight",
    "hirsch_apply",
    "integral_resolvent_apply",
    "linear_weight",
    "resolvent_A_kernel",
    "resolvent_apply",
    "semigroup_apply",
    "semigroup_decay_report",
    "solve_eigen",
    "uniform_weight",
    "validate",
    "verify_inversion_identity",
    "weight_from_json",
]
