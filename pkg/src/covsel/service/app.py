"""FastAPI service wrapping the estimation package.

Endpoints mirror the CLI commands: POST /estimate runs a solve, POST
/generate builds a synthetic instance, POST /verify scores an estimate
against the KKT conditions, and the two /bench routes time the kernels.
Solver failures on valid JSON map to 422 with a detail message.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bench import bench_solver, bench_sqrt, tune_lambda
from ..datagen import (
    SampleMatrix,
    empirical_covariance,
    generate_sparse_precision,
    sample_gaussian,
)
from ..penalty import PenaltySpec
from ..solver import SolverConfig, kkt_residual, run
from ..symmat import NotPositiveDefiniteError, jacobi_eigen
from . import schemas


def penalty_from_params(params: schemas.PenaltyParams) -> PenaltySpec:
    kind = params.penalty.replace("-", "_")
    if kind == "l1":
        return PenaltySpec.l1(params.lam)
    if kind == "elastic_net":
        return PenaltySpec.elastic_net(params.lam, params.ratio)
    if kind == "ridge":
        return PenaltySpec.ridge(params.lam)
    raise ValueError(f"unknown penalty {params.penalty!r}")


def create_app() -> FastAPI:
    from ..reports import config_echo, solve_summary

    app = FastAPI(title="covsel", version=__version__,
                  description="Sparse inverse covariance estimation service")

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/estimate", response_model=schemas.EstimateResponse)
    def estimate(req: schemas.EstimateRequest):
        n = None
        if req.samples is not None:
            rows = np.asarray(req.samples, dtype=float)
            if rows.ndim != 2:
                raise HTTPException(422, "samples must be a rectangular array")
            n = rows.shape[0]
            s = empirical_covariance(SampleMatrix(rows=rows))
        else:
            s = np.asarray(req.covariance, dtype=float)
            if s.ndim != 2 or s.shape[0] != s.shape[1]:
                raise HTTPException(422, "covariance must be square")
        try:
            cfg = SolverConfig(
                penalty=penalty_from_params(req),
                mu=req.mu, rel_tol=req.tol, max_outer_iter=req.max_iter,
            )
            est, report = run(s, cfg)
        except (ValueError, FloatingPointError) as exc:
            raise HTTPException(422, str(exc)) from exc
        return schemas.EstimateResponse(
            estimate=est.tolist(),
            theta=report.theta.tolist(),
            p=s.shape[0],
            n=n,
            config=config_echo(cfg),
            solve=solve_summary(report),
        )

    @app.post("/generate", response_model=schemas.GenerateResponse)
    def generate(req: schemas.GenerateRequest):
        model = generate_sparse_precision(req.p, req.seed)
        samples = sample_gaussian(model, req.n, req.seed + 1)
        lam_min = float(jacobi_eigen(model.precision).eigenvalues[-1])
        lam_suggested = None
        if req.tune_lambda:
            s = empirical_covariance(samples)
            lam_suggested = tune_lambda(s, model.nnz_offdiag).lam
        manifest = schemas.Manifest(
            p=req.p, n=req.n, seed=req.seed,
            nnz_offdiag=model.nnz_offdiag, lambda_min=lam_min,
            lambda_suggested=lam_suggested,
        )
        return schemas.GenerateResponse(
            precision=model.precision.tolist(),
            covariance=model.covariance.tolist(),
            samples=samples.rows.tolist() if req.include_samples else None,
            manifest=manifest,
        )

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def verify(req: schemas.VerifyRequest):
        s = np.asarray(req.covariance, dtype=float)
        theta_hat = np.asarray(req.estimate, dtype=float)
        try:
            res = kkt_residual(s, theta_hat, penalty_from_params(req))
        except NotPositiveDefiniteError as exc:
            raise HTTPException(422, f"estimate is not positive definite: {exc}") from exc
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc
        return schemas.VerifyResponse(kkt_residual=res)

    @app.post("/bench/sqrt", response_model=schemas.SqrtBenchResponse)
    def sqrt_bench(req: schemas.SqrtBenchRequest):
        rows = bench_sqrt(req.sizes, seeds=req.seeds, alpha=req.alpha)
        return schemas.SqrtBenchResponse(rows=rows)

    @app.post("/bench/solver", response_model=schemas.SolverBenchResponse)
    def solver_bench(req: schemas.SolverBenchRequest):
        cells = [(c.p, c.n) for c in req.cells]
        rows = bench_solver(cells, lam=req.lam, mu=req.mu, seed=req.seed)
        return schemas.SolverBenchResponse(rows=rows)

    return app


app = create_app()

__all__ = ["app", "create_app", "penalty_from_params"]
