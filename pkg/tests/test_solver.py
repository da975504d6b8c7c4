"""Solver iteration, stopping behavior, and the KKT verifier.

Independent routes used as oracles: numpy inversion for stationarity
residuals, analytic solutions for diagonal and unpenalized problems, and
the KKT verifier itself validated against deliberately perturbed input.
"""

import math

import numpy as np
import pytest

from covsel.datagen import empirical_covariance, generate_sparse_precision, sample_gaussian
from covsel.penalty import PenaltySpec
from covsel.solver import (
    SolverConfig,
    SolverState,
    energy,
    init_state,
    kkt_residual,
    run,
    step,
    theta_update,
)
from covsel.symmat import NotPositiveDefiniteError

from conftest import random_spd, random_symmetric


def l1_config(lam, **kwargs):
    return SolverConfig(penalty=PenaltySpec.l1(lam), **kwargs)


def synthetic_covariance(p, n, seed):
    model = generate_sparse_precision(p, seed)
    samples = sample_gaussian(model, n, seed + 1)
    return model, empirical_covariance(samples)


class TestEnergy:
    def test_identity_pair(self):
        p = 6
        assert energy(np.eye(p), np.eye(p), PenaltySpec.l1(3.0)) == pytest.approx(p)

    def test_scalar_analytic(self):
        got = energy(np.array([[2.0]]), np.array([[0.5]]), PenaltySpec.l1(0.0))
        assert got == pytest.approx(-math.log(0.5) + 1.0)

    def test_term_by_term_oracle(self):
        s = random_spd(4, 1)
        theta = random_spd(4, 2)
        spec = PenaltySpec.l1(0.3)
        expected = (
            -np.linalg.slogdet(theta)[1]
            + np.trace(s @ theta)
            + 0.3 * (np.sum(np.abs(theta)) - np.sum(np.abs(np.diag(theta))))
        )
        assert energy(s, theta, spec) == pytest.approx(expected, rel=1e-12)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefiniteError):
            energy(np.eye(2), np.array([[1.0, 2.0], [2.0, 1.0]]), PenaltySpec.l1(0.1))


class TestThetaUpdate:
    def test_golden_ratio_fixed_point(self):
        cfg = l1_config(0.1)
        theta = theta_update(np.eye(2), 1.0, cfg)
        phi = (1.0 + math.sqrt(5.0)) / 2.0
        np.testing.assert_allclose(theta, phi * np.eye(2), rtol=1e-9)

    def test_scalar_quadratic(self):
        cfg = l1_config(0.0)
        theta = theta_update(np.array([[3.0]]), 2.0, cfg)
        expected = (3.0 + math.sqrt(17.0)) / 4.0
        np.testing.assert_allclose(theta, [[expected]], rtol=1e-9)
        assert -1.0 / theta[0, 0] + 2.0 * theta[0, 0] == pytest.approx(3.0, abs=1e-8)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_stationarity_residual(self, seed):
        k_mat = random_symmetric(30, seed)
        mu = 0.5
        theta = theta_update(k_mat, mu, l1_config(0.1))
        residual = -np.linalg.inv(theta) + mu * theta - k_mat
        assert np.linalg.norm(residual, "fro") / np.linalg.norm(k_mat, "fro") <= 1e-6

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            theta_update(np.array([[np.inf]]), 1.0, l1_config(0.1))


class TestStep:
    def test_dual_vanishes_without_penalty(self):
        s = random_spd(5, 3)
        state = init_state(5)
        state.m = random_symmetric(5, 4) * 0.1
        new = step(state, s, l1_config(0.0))
        np.testing.assert_allclose(new.m, np.zeros((5, 5)), atol=1e-14)
        assert new.k == 1

    def test_scalar_composes_theta_update(self):
        state = init_state(1)
        new = step(state, np.zeros((1, 1)), l1_config(0.0, mu=1.0))
        phi = (1.0 + math.sqrt(5.0)) / 2.0
        np.testing.assert_allclose(new.theta, [[phi]], rtol=1e-9)

    def test_fixed_point_self_consistency(self):
        model, s = synthetic_covariance(5, 200, 0)
        cfg = l1_config(0.2, rel_tol=1e-10, max_outer_iter=20000)
        est, report = run(s, cfg)
        # dual at the fixed point, recovered from the stationarity equation
        m = cfg.mu * est - s - (-np.linalg.inv(report.theta) + cfg.mu * report.theta)
        state = SolverState(theta=report.theta, a=est, m=(m + m.T) / 2, k=0)
        new = step(state, s, cfg)
        for before, after in ((state.theta, new.theta), (state.a, new.a), (state.m, new.m)):
            denom = max(np.linalg.norm(before, "fro"), 1.0)
            assert np.linalg.norm(after - before, "fro") / denom <= 1e-6


class TestInitState:
    def test_identity_start(self):
        state = init_state(3)
        np.testing.assert_array_equal(state.theta, np.eye(3))
        np.testing.assert_array_equal(state.a, np.eye(3))
        np.testing.assert_array_equal(state.m, np.zeros((3, 3)))
        assert state.k == 0

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            init_state(0)


class TestRun:
    def test_diagonal_covariance_analytic(self):
        s = np.diag([2.0, 4.0])
        est, report = run(s, l1_config(0.1, rel_tol=1e-7))
        assert report.converged
        np.testing.assert_allclose(est, np.diag([0.5, 0.25]), atol=1e-4)

    def test_unpenalized_recovers_inverse(self):
        _, s = synthetic_covariance(3, 50, 7)
        est, report = run(s, l1_config(0.0, rel_tol=1e-8, max_outer_iter=10000))
        assert report.converged
        expected = np.linalg.inv(s)
        rel = np.linalg.norm(est - expected, "fro") / np.linalg.norm(expected, "fro")
        assert rel <= 1e-3

    def test_large_lambda_gives_diagonal(self):
        _, s = synthetic_covariance(8, 200, 3)
        off = ~np.eye(8, dtype=bool)
        lam = 10.0 * np.max(np.abs(s[off]))
        est, report = run(s, l1_config(lam, rel_tol=1e-7))
        assert report.converged
        assert np.max(np.abs(est[off])) == 0.0
        np.testing.assert_allclose(np.diag(est), 1.0 / np.diag(s), atol=1e-4)

    def test_estimate_is_exactly_sparse(self):
        model, s = synthetic_covariance(12, 300, 5)
        est, _ = run(s, l1_config(0.3))
        off = ~np.eye(12, dtype=bool)
        assert np.any(est[off] == 0.0)

    def test_iteration_cap_reports_unconverged(self):
        _, s = synthetic_covariance(6, 100, 9)
        est, report = run(s, l1_config(0.1, max_outer_iter=2))
        assert not report.converged
        assert report.iterations == 2
        assert est.shape == (6, 6)

    def test_mu_independence_small(self):
        _, s = synthetic_covariance(10, 200, 11)
        estimates = {}
        for mu in (0.1, 0.5, 2.0):
            est, report = run(s, l1_config(0.15, mu=mu, rel_tol=1e-6, max_outer_iter=20000))
            assert report.converged
            estimates[mu] = (est, report.final_energy)
        for mu_a, (est_a, e_a) in estimates.items():
            for mu_b, (est_b, e_b) in estimates.items():
                rel = np.linalg.norm(est_a - est_b, "fro") / np.linalg.norm(est_a, "fro")
                assert rel <= 1e-2
                assert abs(e_a - e_b) / abs(e_a) <= 1e-3

    def test_permutation_equivariance(self):
        _, s = synthetic_covariance(8, 150, 13)
        rng = np.random.default_rng(14)
        perm = rng.permutation(8)
        p_mat = np.eye(8)[:, perm]
        est, _ = run(s, l1_config(0.2, rel_tol=1e-6))
        est_perm, _ = run(p_mat.T @ s @ p_mat, l1_config(0.2, rel_tol=1e-6))
        np.testing.assert_allclose(est_perm, p_mat.T @ est @ p_mat, atol=1e-8)

    def test_determinism(self):
        _, s = synthetic_covariance(7, 120, 15)
        est1, rep1 = run(s, l1_config(0.2))
        est2, rep2 = run(s, l1_config(0.2))
        np.testing.assert_array_equal(est1, est2)
        assert rep1.energy_trace == rep2.energy_trace
        assert rep1.kkt_residual == rep2.kkt_residual

    def test_energy_tracked_per_iteration(self):
        _, s = synthetic_covariance(6, 100, 17)
        _, report = run(s, l1_config(0.2))
        assert len(report.energy_trace) == report.iterations + 1
        assert report.final_energy == report.energy_trace[-1]

    def test_converged_report_meets_tolerances(self):
        _, s = synthetic_covariance(9, 200, 19)
        cfg = l1_config(0.2)
        _, report = run(s, cfg)
        assert report.converged
        assert report.primal_residual < cfg.rel_tol
        trace = report.energy_trace
        rel_change = abs(trace[-1] - trace[-2]) / max(abs(trace[-2]), 1.0)
        assert rel_change < cfg.rel_tol

    def test_input_validation(self):
        with pytest.raises(ValueError, match="square"):
            run(np.ones((2, 3)), l1_config(0.1))
        with pytest.raises(ValueError, match="negative diagonal"):
            run(np.diag([1.0, -2.0]), l1_config(0.1))
        with pytest.raises(ValueError, match="non-finite"):
            run(np.diag([1.0, np.nan]), l1_config(0.1))


class TestKktResidual:
    def test_exact_inverse_unpenalized(self):
        s = random_spd(5, 21)
        theta = np.linalg.inv(s)
        theta = (theta + theta.T) / 2
        assert kkt_residual(s, theta, PenaltySpec.l1(0.0)) <= 1e-10

    def test_diagonal_analytic_optimum(self):
        s = np.diag([2.0, 4.0])
        theta = np.diag([0.5, 0.25])
        assert kkt_residual(s, theta, PenaltySpec.l1(0.1)) <= 1e-8

    def test_solver_output_scores_well(self):
        model, s = synthetic_covariance(20, 400, 23)
        est, report = run(s, l1_config(0.2, rel_tol=1e-6))
        assert report.converged
        assert report.kkt_residual <= 1e-3
        assert kkt_residual(s, est, PenaltySpec.l1(0.2)) == report.kkt_residual

    def test_detects_perturbation(self):
        model, s = synthetic_covariance(20, 400, 23)
        est, _ = run(s, l1_config(0.2, rel_tol=1e-6))
        perturbed = est.copy()
        perturbed[0, 1] += 0.01
        perturbed[1, 0] += 0.01
        assert kkt_residual(s, perturbed, PenaltySpec.l1(0.2)) > 5e-3

    def test_elastic_net_stationarity(self):
        spec = PenaltySpec.elastic_net(0.2, ratio=0.6)
        _, s = synthetic_covariance(10, 300, 25)
        est, report = run(s, SolverConfig(penalty=spec, rel_tol=1e-7, max_outer_iter=20000))
        assert report.converged
        assert kkt_residual(s, est, spec) <= 1e-3

    def test_ridge_stationarity(self):
        spec = PenaltySpec.ridge(0.3)
        _, s = synthetic_covariance(10, 300, 27)
        est, report = run(s, SolverConfig(penalty=spec, rel_tol=1e-7, max_outer_iter=20000))
        assert report.converged
        assert kkt_residual(s, est, spec) <= 1e-3

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefiniteError):
            kkt_residual(np.eye(2), np.array([[1.0, 2.0], [2.0, 1.0]]), PenaltySpec.l1(0.1))
