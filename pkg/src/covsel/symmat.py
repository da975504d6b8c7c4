"""Dense symmetric linear algebra kernels.

Everything the estimator needs for symmetric p x p matrices: products,
Cholesky factorization with SPD solves and log-determinants, a cyclic
Jacobi eigendecomposition (used as the reference path), and the Newton
iteration for square roots of matrices of the form K^2 + alpha*I.

All matrices are plain ``numpy.ndarray`` in full dense storage. Every
operation that constructs a symmetric result re-symmetrizes explicitly,
so symmetry of outputs holds exactly, not merely to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numba import njit
from scipy.linalg.lapack import dpotrf, dpotrs

__all__ = [
    "NotPositiveDefiniteError",
    "EigenConvergenceError",
    "CholeskyFactor",
    "EigenDecomposition",
    "NewtonSqrtReport",
    "symmetrize",
    "matmul",
    "cholesky",
    "solve_spd",
    "logdet",
    "jacobi_eigen",
    "sqrt_eigen",
    "sqrt_newton",
    "frobenius_norm",
    "trace",
    "inner",
]

JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-12


class NotPositiveDefiniteError(ValueError):
    """Cholesky factorization failed: a pivot was nonpositive or non-finite.

    ``pivot`` is the 0-based index of the failing pivot.
    """

    def __init__(self, pivot: int, message: str | None = None):
        self.pivot = pivot
        super().__init__(
            message or f"matrix is not positive definite (failing pivot {pivot})"
        )


class EigenConvergenceError(RuntimeError):
    """Jacobi sweeps were exhausted before the off-diagonal mass vanished."""

    def __init__(self, off_diagonal_mass: float, sweeps: int):
        self.off_diagonal_mass = off_diagonal_mass
        self.sweeps = sweeps
        super().__init__(
            f"Jacobi eigendecomposition did not converge within {sweeps} sweeps "
            f"(residual off-diagonal mass {off_diagonal_mass:.3e})"
        )


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor L with L @ L.T equal to the source matrix."""

    lower: np.ndarray

    @property
    def p(self) -> int:
        return self.lower.shape[0]


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order; eigenvector k is ``eigenvectors[:, k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def p(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class NewtonSqrtReport:
    iterations: int
    final_relative_change: float
    converged: bool


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Return (m + m.T) / 2. The result is exactly symmetric entrywise."""
    return (m + m.T) / 2.0


def _require_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with a dimension check."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch in matmul: {a.shape} x {b.shape}")
    return a @ b


def cholesky(m: np.ndarray) -> CholeskyFactor:
    """Factor a symmetric positive definite matrix as L @ L.T.

    Raises :class:`NotPositiveDefiniteError` with the 0-based index of the
    failing pivot when the matrix is not SPD or contains non-finite entries.
    """
    m = _require_square(m)
    if not np.isfinite(m).all():
        bad = np.where(~np.isfinite(m).all(axis=1))[0][0]
        raise NotPositiveDefiniteError(int(bad), "matrix contains non-finite entries")
    c, info = dpotrf(m, lower=1)
    if info > 0:
        raise NotPositiveDefiniteError(int(info) - 1)
    if info < 0:
        raise ValueError(f"invalid argument {-info} to Cholesky factorization")
    return CholeskyFactor(lower=np.tril(c))


def solve_spd(f: CholeskyFactor, b: np.ndarray) -> np.ndarray:
    """Solve (L L^T) Y = b for Y using the factor f."""
    b = np.asarray(b, dtype=float)
    rows = b.shape[0]
    if rows != f.p:
        raise ValueError(f"dimension mismatch: factor is {f.p}x{f.p}, rhs has {rows} rows")
    y, info = dpotrs(f.lower, b, lower=1)
    if info != 0:
        raise ValueError(f"SPD solve failed with LAPACK info {info}")
    return y


def logdet(f: CholeskyFactor) -> float:
    """log det of the factored matrix: 2 * sum(log(diag(L)))."""
    return float(2.0 * np.sum(np.log(np.diag(f.lower))))


@njit(cache=True)
def _jacobi_kernel(a, v, tol, max_sweeps):  # pragma: no cover - compiled
    p = a.shape[0]
    sweeps = 0
    while sweeps < max_sweeps:
        off = 0.0
        for i in range(p - 1):
            for j in range(i + 1, p):
                off += a[i, j] * a[i, j]
        off = np.sqrt(2.0 * off)
        if off <= tol:
            return sweeps, off
        for k in range(p - 1):
            for l in range(k + 1, p):
                akl = a[k, l]
                if akl == 0.0:
                    continue
                diff = a[l, l] - a[k, k]
                if abs(akl) < 1e-36 * abs(diff):
                    t = akl / diff
                else:
                    theta = diff / (2.0 * akl)
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # two-sided rotation G^T A G in the (k, l) plane
                for i in range(p):
                    aik = a[i, k]
                    ail = a[i, l]
                    a[i, k] = c * aik - s * ail
                    a[i, l] = s * aik + c * ail
                for i in range(p):
                    aki = a[k, i]
                    ali = a[l, i]
                    a[k, i] = c * aki - s * ali
                    a[l, i] = s * aki + c * ali
                a[k, l] = 0.0
                a[l, k] = 0.0
                for i in range(p):
                    vik = v[i, k]
                    vil = v[i, l]
                    v[i, k] = c * vik - s * vil
                    v[i, l] = s * vik + c * vil
        sweeps += 1
    off = 0.0
    for i in range(p - 1):
        for j in range(i + 1, p):
            off += a[i, j] * a[i, j]
    return sweeps, np.sqrt(2.0 * off)


def jacobi_eigen(m: np.ndarray, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps row-cyclically over all off-diagonal pivots, applying two-sided
    Givens rotations until the off-diagonal Frobenius mass drops below
    1e-12 times the Frobenius norm of the input. Quadratic convergence
    makes ~10 sweeps typical; the cap exists only as a divergence guard.

    Returns eigenvalues sorted in descending order with the eigenvector
    columns permuted to match.
    """
    m = _require_square(m)
    if not np.isfinite(m).all():
        raise ValueError("matrix contains non-finite entries")
    if np.max(np.abs(m - m.T), initial=0.0) != 0.0:
        raise ValueError("matrix is not exactly symmetric")
    p = m.shape[0]
    if p == 1:
        return EigenDecomposition(eigenvalues=m[0].copy(), eigenvectors=np.eye(1))
    a = m.copy()
    v = np.eye(p)
    tol = JACOBI_REL_TOL * float(np.linalg.norm(m, "fro"))
    sweeps, off = _jacobi_kernel(a, v, tol, max_sweeps)
    if off > tol:
        raise EigenConvergenceError(off_diagonal_mass=float(off), sweeps=int(sweeps))
    w = np.diag(a).copy()
    order = np.argsort(w)[::-1]
    return EigenDecomposition(eigenvalues=w[order], eigenvectors=np.ascontiguousarray(v[:, order]))


def sqrt_eigen(k: np.ndarray, alpha: float) -> np.ndarray:
    """Square root of K^2 + alpha*I through the eigendecomposition of K.

    Reference path for :func:`sqrt_newton`: with K = U diag(w) U^T the
    result is U diag(sqrt(w^2 + alpha)) U^T.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    dec = jacobi_eigen(k)
    w = np.sqrt(dec.eigenvalues**2 + alpha)
    u = dec.eigenvectors
    return symmetrize((u * w) @ u.T)


def sqrt_newton(
    k: np.ndarray,
    alpha: float,
    rel_tol: float = 1e-6,
    max_iter: int = 50,
    callback: Optional[Callable[[np.ndarray], None]] = None,
) -> tuple[np.ndarray, NewtonSqrtReport]:
    """Newton iteration for the square root of K^2 + alpha*I, K symmetric.

    Starting from X = sqrt(alpha)*I, repeats

        X <- (X + X^{-1} (K^2 + alpha*I)) / 2

    with the inverse applied as a Cholesky solve, until the relative change
    of successive iterates falls below ``rel_tol``. Every iterate shares
    eigenvectors with K, stays SPD, and the error contracts by at least a
    factor of two per step, quadratically near the solution.

    Iterates are re-symmetrized each step to suppress round-off drift.
    Non-convergence within ``max_iter`` is reported, not raised; callers
    can fall back to :func:`sqrt_eigen`. ``callback`` receives each iterate.
    """
    k = _require_square(k)
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    p = k.shape[0]
    target = matmul(k, k) + alpha * np.eye(p)
    x = np.sqrt(alpha) * np.eye(p)
    iterations = 0
    rel_change = np.inf
    for _ in range(max_iter):
        f = cholesky(x)
        y = solve_spd(f, target)
        x_next = symmetrize(0.5 * (x + y))
        if not np.isfinite(x_next).all():
            raise FloatingPointError("Newton square-root iterate became non-finite")
        iterations += 1
        rel_change = float(
            np.linalg.norm(x_next - x, "fro") / np.linalg.norm(x, "fro")
        )
        x = x_next
        if callback is not None:
            callback(x)
        if rel_change < rel_tol:
            return x, NewtonSqrtReport(iterations, rel_change, True)
    return x, NewtonSqrtReport(iterations, rel_change, False)


def frobenius_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(m, dtype=float), "fro"))


def trace(m: np.ndarray) -> float:
    return float(np.trace(np.asarray(m, dtype=float)))


def inner(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius inner product tr(a^T b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch in inner: {a.shape} vs {b.shape}")
    return float(np.sum(a * b))
