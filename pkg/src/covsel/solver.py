"""Split Bregman (ADMM) iteration for penalized inverse covariance estimation.

Minimizes, over positive definite Theta,

    -log det(Theta) + tr(S @ Theta) + penalty(Theta)

by alternating three updates on the triple (Theta, A, M), where A is the
auxiliary split variable constrained to equal Theta and M is the dual:

    K      = mu * A - S - M
    Theta' = (K + sqrt(K^2 + 4*mu*I)) / (2*mu)
    A'     = prox(Theta' + M / mu)
    M'     = M + mu * (Theta' - A')

The Theta update solves the stationarity equation -Theta^{-1} + mu*Theta = K
in closed form; its matrix square root runs through the Newton kernel with
the eigendecomposition path as fallback. Convergence holds for any mu > 0;
mu only affects the iteration count.

The module also provides an independent first-order (KKT) optimality
verifier used as the correctness oracle for solver output.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .penalty import ELASTIC_NET, L1, RIDGE, PenaltySpec
from .symmat import (
    NewtonSqrtReport,
    NotPositiveDefiniteError,
    cholesky,
    logdet,
    solve_spd,
    sqrt_eigen,
    sqrt_newton,
    symmetrize,
)

__all__ = [
    "SolverConfig",
    "SolverState",
    "SolverReport",
    "energy",
    "theta_update",
    "step",
    "run",
    "kkt_residual",
    "init_state",
]

ZERO_TOL = 1e-10


@dataclass(frozen=True)
class SolverConfig:
    """Tunables of one solve. ``rel_tol`` is the stopping threshold applied
    to both the relative energy change and the primal residual."""

    penalty: PenaltySpec
    mu: float = 0.5
    rel_tol: float = 1e-4
    max_outer_iter: int = 2000
    newton_rel_tol: float = 1e-6
    newton_max_iter: int = 50

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.rel_tol <= 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_outer_iter < 1:
            raise ValueError("max_outer_iter must be at least 1")

    @property
    def lam(self) -> float:
        return self.penalty.lam


@dataclass
class SolverState:
    """The iteration triple plus counters. ``newton_iters`` counts the Newton
    square-root steps spent producing this state."""

    theta: np.ndarray
    a: np.ndarray
    m: np.ndarray
    k: int = 0
    newton_iters: int = 0
    used_eigen_fallback: bool = False


@dataclass
class SolverReport:
    iterations: int
    energy_trace: list[float]
    final_energy: float
    primal_residual: float
    kkt_residual: float
    converged: bool
    newton_iters_total: int
    wall_time_seconds: float
    eigen_fallbacks: int = 0
    theta: np.ndarray | None = field(default=None, repr=False)


def init_state(p: int) -> SolverState:
    """Identity start: Theta = A = I, M = 0. Feasible, symmetric, PD."""
    if p < 1:
        raise ValueError(f"dimension must be positive, got {p}")
    return SolverState(theta=np.eye(p), a=np.eye(p), m=np.zeros((p, p)))


def energy(s: np.ndarray, theta: np.ndarray, penalty: PenaltySpec) -> float:
    """Objective -log det(theta) + tr(s @ theta) + penalty(theta).

    Raises NotPositiveDefiniteError if theta is not PD.
    """
    f = cholesky(theta)
    return float(-logdet(f) + np.sum(s * theta) + penalty.value(theta))


def _theta_update(
    k_mat: np.ndarray, mu: float, newton_rel_tol: float, newton_max_iter: int
) -> tuple[np.ndarray, NewtonSqrtReport, bool]:
    """Closed-form solution of -Theta^{-1} + mu*Theta = K over PD matrices.

    Returns (theta, newton report, eigen_fallback_used).
    """
    if not np.isfinite(k_mat).all():
        raise ValueError("theta update received non-finite input")
    alpha = 4.0 * mu
    x, report = sqrt_newton(k_mat, alpha, rel_tol=newton_rel_tol, max_iter=newton_max_iter)
    fallback = False
    if not report.converged:
        x = sqrt_eigen(k_mat, alpha)
        fallback = True
    theta = symmetrize((k_mat + x) / (2.0 * mu))
    return theta, report, fallback


def theta_update(k_mat: np.ndarray, mu: float, cfg: SolverConfig) -> np.ndarray:
    """Positive definite root (K + sqrt(K^2 + 4*mu*I)) / (2*mu) of the
    stationarity equation -Theta^{-1} + mu*Theta = K."""
    theta, _, _ = _theta_update(k_mat, mu, cfg.newton_rel_tol, cfg.newton_max_iter)
    return theta


def step(state: SolverState, s: np.ndarray, cfg: SolverConfig) -> SolverState:
    """One three-part update of (Theta, A, M)."""
    mu = cfg.mu
    k_mat = mu * state.a - s - state.m
    theta, newton_report, fallback = _theta_update(
        k_mat, mu, cfg.newton_rel_tol, cfg.newton_max_iter
    )
    a = cfg.penalty.prox(theta + state.m / mu, mu)
    m = state.m + mu * (theta - a)
    return SolverState(
        theta=theta,
        a=a,
        m=m,
        k=state.k + 1,
        newton_iters=newton_report.iterations,
        used_eigen_fallback=fallback,
    )


def run(
    s: np.ndarray,
    cfg: SolverConfig,
    init: SolverState | None = None,
) -> tuple[np.ndarray, SolverReport]:
    """Iterate to convergence and return (estimate, report).

    Stops when BOTH the relative energy change and the primal residual
    ||Theta - A||_F / ||Theta||_F fall below ``cfg.rel_tol``, or at the
    iteration cap (then ``converged`` is False but the result is still
    returned). The returned estimate is A, which is exactly sparse where
    the prox thresholded; Theta, which A matches within the primal
    residual, rides along in the report.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"covariance must be square, got shape {s.shape}")
    if not np.isfinite(s).all():
        raise ValueError("covariance contains non-finite entries")
    if np.min(np.diag(s)) < 0:
        raise ValueError("covariance has a negative diagonal entry")
    s = symmetrize(s)

    p = s.shape[0]
    state = init if init is not None else init_state(p)
    t0 = time.perf_counter()

    trace = [energy(s, state.theta, cfg.penalty)]
    newton_total = 0
    fallbacks = 0
    converged = False
    primal = math.inf

    while state.k < cfg.max_outer_iter:
        state = step(state, s, cfg)
        newton_total += state.newton_iters
        fallbacks += int(state.used_eigen_fallback)

        e = energy(s, state.theta, cfg.penalty)
        if not math.isfinite(e):
            raise FloatingPointError("energy became non-finite during iteration")
        prev = trace[-1]
        trace.append(e)

        energy_change = abs(e - prev) / max(abs(prev), 1.0)
        primal = float(
            np.linalg.norm(state.theta - state.a, "fro")
            / np.linalg.norm(state.theta, "fro")
        )
        if energy_change < cfg.rel_tol and primal < cfg.rel_tol:
            converged = True
            break

    wall = time.perf_counter() - t0
    estimate = state.a
    try:
        kkt = kkt_residual(s, estimate, cfg.penalty)
    except NotPositiveDefiniteError:
        kkt = math.inf

    report = SolverReport(
        iterations=state.k,
        energy_trace=trace,
        final_energy=trace[-1],
        primal_residual=primal,
        kkt_residual=kkt,
        converged=converged,
        newton_iters_total=newton_total,
        wall_time_seconds=wall,
        eigen_fallbacks=fallbacks,
        theta=state.theta,
    )
    return estimate, report


def kkt_residual(
    s: np.ndarray,
    theta_hat: np.ndarray,
    spec: PenaltySpec,
    zero_tol: float = ZERO_TOL,
) -> float:
    """First-order optimality violation of the penalized likelihood problem.

    Forms G = S - theta_hat^{-1} plus the gradient of any smooth penalty
    part, then takes the worst entrywise violation of the stationarity
    conditions: the diagonal gradient must vanish; at off-diagonal nonzeros
    the l1 subgradient is pinned to sign(theta); at off-diagonal zeros the
    gradient magnitude may not exceed the l1 weight. Entries with
    |theta| < zero_tol count as zeros. Exact optima give 0; the residual
    grows continuously with the distance from optimality, which makes it an
    independent check on solver output.
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    s = np.asarray(s, dtype=float)
    p = theta_hat.shape[0]
    f = cholesky(theta_hat)
    inv = symmetrize(solve_spd(f, np.eye(p)))
    g = s - inv

    if spec.kind == L1:
        lam1, smooth = spec.lam, 0.0
    elif spec.kind == ELASTIC_NET:
        lam1, smooth = spec.lam1, spec.lam2
    else:
        lam1, smooth = 0.0, spec.lam

    offmask = ~np.eye(p, dtype=bool)
    g_eff = g + smooth * np.where(offmask, theta_hat, 0.0)

    diag_res = np.max(np.abs(np.diag(g)))
    nonzero = offmask & (np.abs(theta_hat) >= zero_tol)
    zero = offmask & ~nonzero
    res = diag_res
    if nonzero.any():
        res = max(res, float(np.max(np.abs(g_eff[nonzero] + lam1 * np.sign(theta_hat[nonzero])))))
    if zero.any():
        res = max(res, float(np.max(np.maximum(0.0, np.abs(g_eff[zero]) - lam1))))
    return float(res)
