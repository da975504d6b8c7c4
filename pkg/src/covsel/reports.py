"""Machine-readable run reports.

One JSON document per run, holding the config echo, input provenance,
solver diagnostics, recovery metrics when a ground truth is known, and
benchmark rows. The same models back the service responses, so a report
written by the CLI and a body returned by the service round-trip through
the identical schema (``RunReport.model_json_schema()`` documents it).
"""

from __future__ import annotations

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from .solver import SolverConfig, SolverReport

ENERGY_TRACE_CAP = 10_000


class ConfigEcho(BaseModel):
    lam: float = Field(alias="lambda")
    mu: float
    tol: float
    max_iter: int
    penalty: str
    ratio: float | None = None
    seed: int | None = None

    model_config = ConfigDict(populate_by_name=True)


class InputProvenance(BaseModel):
    input_path: str | None = None
    truth_path: str | None = None
    p: int
    n: int | None = None


class SolveSummary(BaseModel):
    iterations: int
    final_energy: float
    primal_residual: float
    kkt_residual: float
    converged: bool
    newton_iters_total: int
    eigen_fallbacks: int
    wall_time_seconds: float
    energy_trace: list[float]


class RecoveryMetrics(BaseModel):
    relative_error: float
    support_precision: float
    support_recall: float
    support_f1: float


class NewtonBenchRow(BaseModel):
    p: int
    newton_seconds: float
    eigen_seconds: float
    newton_iters: int
    relative_difference: float


class SolverBenchRow(BaseModel):
    p: int
    n: int
    solve_seconds: float
    iterations: int
    converged: bool


class RunReport(BaseModel):
    """Top-level report document. Unused sections stay None/empty."""

    kind: str
    config: ConfigEcho | None = None
    input: InputProvenance | None = None
    solve: SolveSummary | None = None
    metrics: RecoveryMetrics | None = None
    sqrt_bench: list[NewtonBenchRow] = Field(default_factory=list)
    solver_bench: list[SolverBenchRow] = Field(default_factory=list)

    def save(self, path) -> None:
        Path(path).write_text(self.model_dump_json(indent=2, by_alias=True) + "\n",
                              encoding="utf-8")

    @classmethod
    def load(cls, path) -> "RunReport":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


def config_echo(cfg: SolverConfig, seed: int | None = None) -> ConfigEcho:
    ratio = cfg.penalty.ratio if cfg.penalty.kind == "elastic_net" else None
    return ConfigEcho(
        lam=cfg.lam,
        mu=cfg.mu,
        tol=cfg.rel_tol,
        max_iter=cfg.max_outer_iter,
        penalty=cfg.penalty.kind,
        ratio=ratio,
        seed=seed,
    )


def solve_summary(report: SolverReport) -> SolveSummary:
    return SolveSummary(
        iterations=report.iterations,
        final_energy=report.final_energy,
        primal_residual=report.primal_residual,
        kkt_residual=report.kkt_residual,
        converged=report.converged,
        newton_iters_total=report.newton_iters_total,
        eigen_fallbacks=report.eigen_fallbacks,
        wall_time_seconds=report.wall_time_seconds,
        energy_trace=list(report.energy_trace[:ENERGY_TRACE_CAP]),
    )
