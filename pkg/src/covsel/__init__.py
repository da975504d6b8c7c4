"""Sparse inverse covariance (precision) matrix estimation.

Penalized maximum likelihood with a split Bregman / ADMM iteration, a
Newton kernel for the matrix square roots that dominate the per-iteration
cost, a pluggable family of separable penalties, synthetic benchmark
generation, and an independent KKT optimality verifier.
"""

from .datagen import (
    GroundTruthModel,
    SampleMatrix,
    SupportMetrics,
    empirical_covariance,
    generate_sparse_precision,
    relative_error,
    sample_gaussian,
    support_metrics,
)
from .penalty import PenaltySpec, soft_threshold
from .solver import (
    SolverConfig,
    SolverReport,
    SolverState,
    energy,
    init_state,
    kkt_residual,
    run,
    step,
    theta_update,
)
from .symmat import (
    CholeskyFactor,
    EigenDecomposition,
    EigenConvergenceError,
    NewtonSqrtReport,
    NotPositiveDefiniteError,
    cholesky,
    frobenius_norm,
    inner,
    jacobi_eigen,
    logdet,
    matmul,
    solve_spd,
    sqrt_eigen,
    sqrt_newton,
    symmetrize,
    trace,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CholeskyFactor",
    "EigenDecomposition",
    "EigenConvergenceError",
    "GroundTruthModel",
    "NewtonSqrtReport",
    "NotPositiveDefiniteError",
    "PenaltySpec",
    "SampleMatrix",
    "SolverConfig",
    "SolverReport",
    "SolverState",
    "SupportMetrics",
    "cholesky",
    "empirical_covariance",
    "energy",
    "frobenius_norm",
    "generate_sparse_precision",
    "init_state",
    "inner",
    "jacobi_eigen",
    "kkt_residual",
    "logdet",
    "matmul",
    "relative_error",
    "run",
    "sample_gaussian",
    "soft_threshold",
    "solve_spd",
    "sqrt_eigen",
    "sqrt_newton",
    "step",
    "support_metrics",
    "symmetrize",
    "theta_update",
    "trace",
]
