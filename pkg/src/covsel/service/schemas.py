"""Request and response models for the estimation service.

Matrices cross the wire as JSON lists of rows. Field names mirror the CLI
flags (``lambda``, ``mu``, ``tol``, ``max_iter``, ``penalty``, ``ratio``)
so a request body reads like an invocation.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..reports import (
    ConfigEcho,
    NewtonBenchRow,
    RecoveryMetrics,
    SolveSummary,
    SolverBenchRow,
)

Matrix = list[list[float]]


class PenaltyParams(BaseModel):
    penalty: str = "l1"
    lam: float = Field(alias="lambda", ge=0.0)
    ratio: float = Field(default=0.5, ge=0.0, le=1.0)

    model_config = ConfigDict(populate_by_name=True)


class SolverParams(BaseModel):
    mu: float = Field(default=0.5, gt=0.0)
    tol: float = Field(default=1e-4, gt=0.0)
    max_iter: int = Field(default=2000, ge=1)


class EstimateRequest(PenaltyParams, SolverParams):
    """Estimate from either a covariance matrix or raw samples."""

    covariance: Matrix | None = None
    samples: Matrix | None = None

    @model_validator(mode="after")
    def _exactly_one_input(self):
        if (self.covariance is None) == (self.samples is None):
            raise ValueError("provide exactly one of 'covariance' or 'samples'")
        return self


class EstimateResponse(BaseModel):
    estimate: Matrix
    theta: Matrix
    p: int
    n: int | None = None
    config: ConfigEcho
    solve: SolveSummary


class GenerateRequest(BaseModel):
    p: int = Field(ge=2)
    n: int = Field(ge=1)
    seed: int = 0
    include_samples: bool = True
    tune_lambda: bool = False


class Manifest(BaseModel):
    p: int
    n: int
    seed: int
    nnz_offdiag: int
    lambda_min: float
    lambda_suggested: float | None = None


class GenerateResponse(BaseModel):
    precision: Matrix
    covariance: Matrix
    samples: Matrix | None = None
    manifest: Manifest


class VerifyRequest(PenaltyParams):
    covariance: Matrix
    estimate: Matrix


class VerifyResponse(BaseModel):
    kkt_residual: float


class SqrtBenchRequest(BaseModel):
    sizes: list[int]
    seeds: int = Field(default=1, ge=1)
    alpha: float = Field(default=2.0, gt=0.0)


class SqrtBenchResponse(BaseModel):
    rows: list[NewtonBenchRow]


class BenchCell(BaseModel):
    p: int = Field(ge=2)
    n: int = Field(ge=1)


class SolverBenchRequest(BaseModel):
    cells: list[BenchCell]
    lam: float | None = Field(default=None, alias="lambda")
    mu: float = Field(default=0.5, gt=0.0)
    seed: int = 0

    model_config = ConfigDict(populate_by_name=True)


class SolverBenchResponse(BaseModel):
    rows: list[SolverBenchRow]


class HealthResponse(BaseModel):
    status: str
    version: str


class MetricsResponse(BaseModel):
    metrics: RecoveryMetrics
