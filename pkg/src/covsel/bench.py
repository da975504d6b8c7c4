"""Benchmark harness and penalty-weight tuning.

The square-root bench rebuilds the kernel comparison: for each size p,
draw a standard normal B, symmetrize to K = (B + B^T) / 2, and time the
Newton square root of K^2 + alpha*I against the Jacobi eigendecomposition
path, recording iteration counts and the relative difference between the
two results.

The solver bench times full estimation runs over a (p, n) grid on
synthetic instances. Timing covers the solve only, never file I/O or the
empirical covariance, since the sample count enters the solver solely
through S.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .datagen import empirical_covariance, generate_sparse_precision, sample_gaussian
from .penalty import PenaltySpec
from .reports import NewtonBenchRow, SolverBenchRow
from .solver import SolverConfig, SolverReport, run
from .symmat import sqrt_eigen, sqrt_newton

__all__ = ["bench_sqrt", "bench_solver", "tune_lambda", "TunedLambda"]


def bench_sqrt(
    sizes: list[int],
    seeds: int = 1,
    alpha: float = 2.0,
    rel_tol: float = 1e-6,
    base_seed: int = 0,
) -> list[NewtonBenchRow]:
    """Time Newton vs eigendecomposition square roots of K^2 + alpha*I.

    Runs ``seeds`` independent instances per size and averages the timings;
    iteration counts and relative differences are worst-case over seeds.
    """
    rows = []
    for p in sizes:
        newton_time = 0.0
        eigen_time = 0.0
        iters = 0
        rel_diff = 0.0
        for s in range(seeds):
            rng = np.random.default_rng(base_seed + s)
            b = rng.standard_normal((p, p))
            k = (b + b.T) / 2.0

            t0 = time.perf_counter()
            x_newton, rep = sqrt_newton(k, alpha, rel_tol=rel_tol)
            newton_time += time.perf_counter() - t0

            t0 = time.perf_counter()
            x_eigen = sqrt_eigen(k, alpha)
            eigen_time += time.perf_counter() - t0

            iters = max(iters, rep.iterations)
            rel_diff = max(
                rel_diff,
                float(np.linalg.norm(x_newton - x_eigen, "fro")
                      / np.linalg.norm(x_eigen, "fro")),
            )
        rows.append(NewtonBenchRow(
            p=p,
            newton_seconds=newton_time / seeds,
            eigen_seconds=eigen_time / seeds,
            newton_iters=iters,
            relative_difference=rel_diff,
        ))
    return rows


def bench_solver(
    cells: list[tuple[int, int]],
    lam: float | None = None,
    mu: float = 0.5,
    rel_tol: float = 1e-4,
    seed: int = 0,
) -> list[SolverBenchRow]:
    """Time full solves on synthetic instances over a (p, n) grid.

    When ``lam`` is None each cell gets a weight tuned so the estimate's
    support size roughly matches the truth. Rows come back ordered by
    (p, n) regardless of input order.
    """
    rows = []
    for p, n in sorted(cells):
        model = generate_sparse_precision(p, seed)
        samples = sample_gaussian(model, n, seed + 1)
        s = empirical_covariance(samples)
        if lam is None:
            cell_lam = tune_lambda(s, model.nnz_offdiag, mu=mu, rel_tol=rel_tol).lam
        else:
            cell_lam = lam
        cfg = SolverConfig(penalty=PenaltySpec.l1(cell_lam), mu=mu, rel_tol=rel_tol)
        t0 = time.perf_counter()
        _, report = run(s, cfg)
        elapsed = time.perf_counter() - t0
        rows.append(SolverBenchRow(
            p=p, n=n, solve_seconds=elapsed,
            iterations=report.iterations, converged=report.converged,
        ))
    return rows


@dataclass(frozen=True)
class TunedLambda:
    lam: float
    nnz_offdiag: int
    estimate: np.ndarray
    report: SolverReport


def _offdiag_nnz(a: np.ndarray, zero_tol: float = 1e-10) -> int:
    off = ~np.eye(a.shape[0], dtype=bool)
    return int(np.count_nonzero(off & (np.abs(a) > zero_tol)))


def tune_lambda(
    s: np.ndarray,
    target_nnz: int,
    tolerance: float = 0.2,
    mu: float = 0.5,
    rel_tol: float = 1e-4,
    max_rounds: int = 40,
) -> TunedLambda:
    """Bisect the l1 weight until the estimate's off-diagonal support size
    is within ``tolerance`` (a fraction) of ``target_nnz``.

    The support size is nonincreasing in the weight: above max|S_ij| the
    estimate is diagonal, and small weights leave the support dense, so a
    log-scale bisection between those endpoints converges in a few dozen
    solves at most. Returns the last weight tried together with its
    estimate, which is the accepted one when tuning succeeded.
    """
    if target_nnz <= 0:
        raise ValueError("target_nnz must be positive")
    s = np.asarray(s, dtype=float)
    off = ~np.eye(s.shape[0], dtype=bool)
    hi = float(np.max(np.abs(s[off])))
    lo = hi * 1e-4

    def solve_at(lam: float):
        cfg = SolverConfig(penalty=PenaltySpec.l1(lam), mu=mu, rel_tol=rel_tol)
        estimate, report = run(s, cfg)
        return estimate, report, _offdiag_nnz(estimate)

    lam = np.sqrt(lo * hi)
    estimate, report, nnz = solve_at(lam)
    lower, upper = target_nnz * (1 - tolerance), target_nnz * (1 + tolerance)
    for _ in range(max_rounds):
        if lower <= nnz <= upper:
            break
        if nnz > upper:
            lo = lam
        else:
            hi = lam
        lam = np.sqrt(lo * hi)
        estimate, report, nnz = solve_at(lam)
    return TunedLambda(lam=float(lam), nnz_offdiag=nnz, estimate=estimate, report=report)
