"""Synthetic benchmark instances and recovery metrics.

Ground-truth models are sparse SPD precision matrices built by drawing a
positive diagonal, planting random values at p symmetric off-diagonal
locations, and shifting by a multiple of the identity when the smallest
eigenvalue drops at or below 0.1. Gaussian samples are drawn through the
Cholesky factor of the implied covariance.

All randomness flows through ``numpy.random.Generator`` seeded with PCG64,
so identical seeds reproduce identical models and samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .symmat import cholesky, jacobi_eigen, solve_spd, symmetrize

__all__ = [
    "GroundTruthModel",
    "SampleMatrix",
    "SupportMetrics",
    "generate_sparse_precision",
    "sample_gaussian",
    "empirical_covariance",
    "relative_error",
    "support_metrics",
]

MIN_EIGENVALUE = 0.1
DIAG_RANGE = (1.0, 2.0)
OFFDIAG_MAGNITUDE = (0.5, 1.0)


@dataclass(frozen=True)
class GroundTruthModel:
    """A known sparse precision matrix with its covariance."""

    precision: np.ndarray
    covariance: np.ndarray
    p: int
    seed: int
    nnz_offdiag: int


@dataclass(frozen=True)
class SampleMatrix:
    """n observations of length p, one per row."""

    rows: np.ndarray

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1]


class SupportMetrics(NamedTuple):
    precision: float
    recall: float
    f1: float


def generate_sparse_precision(p: int, seed: int) -> GroundTruthModel:
    """Sparse SPD precision matrix with exactly 2p off-diagonal nonzeros.

    Diagonal entries are uniform on [1, 2]. p distinct upper-triangle
    locations are chosen without replacement and filled with values of
    magnitude uniform on [0.5, 1] and random sign, mirrored below the
    diagonal. If the smallest eigenvalue is <= 0.1 the whole matrix is
    shifted so it lands at 0.2, keeping the inverse well-conditioned.
    """
    if p < 2:
        raise ValueError(f"dimension must be at least 2, got {p}")
    rng = np.random.default_rng(seed)

    theta = np.diag(rng.uniform(*DIAG_RANGE, size=p))
    iu, ju = np.triu_indices(p, k=1)
    chosen = rng.choice(iu.size, size=p, replace=False)
    magnitudes = rng.uniform(*OFFDIAG_MAGNITUDE, size=p)
    signs = rng.choice(np.array([-1.0, 1.0]), size=p)
    values = magnitudes * signs
    theta[iu[chosen], ju[chosen]] = values
    theta[ju[chosen], iu[chosen]] = values

    lam_min = float(jacobi_eigen(theta).eigenvalues[-1])
    if lam_min <= MIN_EIGENVALUE:
        theta = theta + (2 * MIN_EIGENVALUE - lam_min) * np.eye(p)

    covariance = symmetrize(solve_spd(cholesky(theta), np.eye(p)))
    nnz = int(np.count_nonzero(theta) - p)
    return GroundTruthModel(
        precision=theta, covariance=covariance, p=p, seed=seed, nnz_offdiag=nnz
    )


def sample_gaussian(model: GroundTruthModel, n: int, seed: int) -> SampleMatrix:
    """n i.i.d. zero-mean Gaussian rows with covariance model.covariance.

    Each row is L @ z for standard normal z, with L the Cholesky factor of
    the covariance.
    """
    if n < 1:
        raise ValueError(f"sample count must be positive, got {n}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, model.p))
    lower = cholesky(model.covariance).lower
    return SampleMatrix(rows=z @ lower.T)


def empirical_covariance(x: SampleMatrix) -> np.ndarray:
    """S = (1/n) * sum_i (x_i - xbar)(x_i - xbar)^T with the sample mean.

    The 1/n normalization (not 1/(n-1)) matches the likelihood the solver
    maximizes. Positive semidefinite by construction.
    """
    rows = np.asarray(x.rows, dtype=float)
    centered = rows - rows.mean(axis=0)
    return symmetrize(centered.T @ centered / rows.shape[0])


def relative_error(est: np.ndarray, truth: np.ndarray) -> float:
    """||est - truth||_F / ||truth||_F."""
    est = np.asarray(est, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if est.shape != truth.shape:
        raise ValueError(f"shape mismatch: {est.shape} vs {truth.shape}")
    denom = np.linalg.norm(truth, "fro")
    if denom == 0.0:
        raise ValueError("truth matrix is zero")
    return float(np.linalg.norm(est - truth, "fro") / denom)


def support_metrics(
    est: np.ndarray, truth: np.ndarray, zero_tol: float = 1e-6
) -> SupportMetrics:
    """Precision/recall/F1 of the recovered off-diagonal support.

    Supports are the sets of (i, j), i != j, with |entry| > zero_tol.
    """
    if zero_tol <= 0:
        raise ValueError(f"zero_tol must be positive, got {zero_tol}")
    est = np.asarray(est, dtype=float)
    truth = np.asarray(truth, dtype=float)
    off = ~np.eye(est.shape[0], dtype=bool)
    est_support = off & (np.abs(est) > zero_tol)
    true_support = off & (np.abs(truth) > zero_tol)

    tp = int(np.count_nonzero(est_support & true_support))
    fp = int(np.count_nonzero(est_support & ~true_support))
    fn = int(np.count_nonzero(~est_support & true_support))

    precision = tp / (tp + fp) if tp + fp > 0 else (1.0 if fn == 0 else 0.0)
    recall = tp / (tp + fn) if tp + fn > 0 else 1.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return SupportMetrics(precision=precision, recall=recall, f1=f1)
