"""Command line front end.

Three batch commands plus the service launcher:

* ``estimate``: read samples (CSV) or a covariance (MatrixMarket), solve,
  write the sparse estimate and a JSON report.
* ``gen``: write a synthetic benchmark bundle (truth, samples, manifest).
* ``bench``: time the square-root kernels and solver scaling.
* ``serve``: run the HTTP service.

Every command executes in-process by default; ``--server URL`` turns the
command into a thin client of a running service, keeping all file handling
local. Exit codes: 0 success/converged, 1 input error, 2 iteration cap
reached, 3 positive-definiteness failure inside the solver.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .bench import bench_solver, bench_sqrt, tune_lambda
from .datagen import (
    SampleMatrix,
    empirical_covariance,
    generate_sparse_precision,
    relative_error,
    sample_gaussian,
    support_metrics,
)
from .matio import (
    FileFormatError,
    read_matrix_market,
    read_samples_csv,
    write_matrix_market_symmetric,
    write_samples_csv,
)
from .penalty import PenaltySpec
from .reports import (
    ConfigEcho,
    InputProvenance,
    RecoveryMetrics,
    RunReport,
    SolveSummary,
    config_echo,
    solve_summary,
)
from .solver import SolverConfig, run
from .symmat import NotPositiveDefiniteError, jacobi_eigen

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ITER_CAP = 2
EXIT_NOT_PD = 3

ESTIMATE_DROP_TOL = 1e-10

PENALTY_CHOICES = {"l1": "l1", "elastic-net": "elastic_net", "ridge": "ridge"}


def _fail(message: str, code: int = EXIT_INPUT):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _build_penalty(penalty: str, lam: float, ratio: float) -> PenaltySpec:
    kind = PENALTY_CHOICES[penalty]
    if kind == "elastic_net":
        return PenaltySpec.elastic_net(lam, ratio)
    return PenaltySpec(kind=kind, lam=lam)


def _is_matrix_market(path: Path) -> bool:
    with open(path, encoding="utf-8") as fh:
        return fh.readline().startswith("%%MatrixMarket")


def _load_input(path: Path) -> tuple[np.ndarray, int | None]:
    """Return (covariance, n_samples or None) from a CSV or MatrixMarket file."""
    if _is_matrix_market(path):
        s = read_matrix_market(path)
        if s.shape[0] != s.shape[1]:
            raise FileFormatError("covariance matrix must be square", path=str(path))
        return s, None
    rows = read_samples_csv(path)
    return empirical_covariance(SampleMatrix(rows=rows)), rows.shape[0]


def _recovery_metrics(estimate: np.ndarray, truth: np.ndarray) -> RecoveryMetrics:
    sm = support_metrics(estimate, truth)
    return RecoveryMetrics(
        relative_error=relative_error(estimate, truth),
        support_precision=sm.precision,
        support_recall=sm.recall,
        support_f1=sm.f1,
    )


@click.group()
@click.version_option(version=__version__)
def main():
    """Sparse inverse covariance estimation."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path),
              help="Samples (CSV, one observation per row) or covariance (MatrixMarket).")
@click.option("--truth", "truth_path", type=click.Path(path_type=Path), default=None,
              help="Ground-truth precision matrix (MatrixMarket) for recovery metrics.")
@click.option("--lambda", "lam", required=True, type=float, help="Penalty weight, >= 0.")
@click.option("--mu", default=0.5, show_default=True, type=float,
              help="Augmented Lagrangian parameter; affects speed, not the result.")
@click.option("--tol", default=1e-4, show_default=True, type=float,
              help="Stopping threshold on energy change and primal residual.")
@click.option("--max-iter", default=2000, show_default=True, type=int)
@click.option("--penalty", type=click.Choice(sorted(PENALTY_CHOICES)), default="l1",
              show_default=True)
@click.option("--ratio", default=0.5, show_default=True, type=float,
              help="Elastic net l1 fraction of lambda.")
@click.option("--output", "output_path", type=click.Path(path_type=Path),
              default=Path("estimate.mtx"), show_default=True)
@click.option("--report", "report_path", type=click.Path(path_type=Path),
              default=Path("report.json"), show_default=True)
@click.option("--server", default=None, help="Delegate the solve to a running service.")
def estimate(input_path, truth_path, lam, mu, tol, max_iter, penalty, ratio,
             output_path, report_path, server):
    """Estimate a sparse precision matrix from a samples or covariance file."""
    if lam < 0:
        _fail("--lambda must be nonnegative")
    try:
        s, n = _load_input(input_path)
        truth = read_matrix_market(truth_path) if truth_path is not None else None
    except (FileFormatError, OSError) as exc:
        _fail(str(exc))

    if server is not None:
        _estimate_remote(server, s, n, input_path, truth_path, truth,
                         lam, mu, tol, max_iter, penalty, ratio,
                         output_path, report_path)
        return

    try:
        cfg = SolverConfig(penalty=_build_penalty(penalty, lam, ratio),
                           mu=mu, rel_tol=tol, max_outer_iter=max_iter)
    except ValueError as exc:
        _fail(str(exc))
    try:
        est, solver_report = run(s, cfg)
    except NotPositiveDefiniteError as exc:
        _fail(str(exc), code=EXIT_NOT_PD)
    except (ValueError, FloatingPointError) as exc:
        _fail(str(exc))

    report = RunReport(
        kind="estimate",
        config=config_echo(cfg),
        input=InputProvenance(input_path=str(input_path),
                              truth_path=str(truth_path) if truth_path else None,
                              p=s.shape[0], n=n),
        solve=solve_summary(solver_report),
        metrics=_recovery_metrics(est, truth) if truth is not None else None,
    )
    write_matrix_market_symmetric(output_path, est, drop_tol=ESTIMATE_DROP_TOL)
    report.save(report_path)
    click.echo(f"wrote {output_path} and {report_path} "
               f"({solver_report.iterations} iterations, "
               f"kkt residual {solver_report.kkt_residual:.2e})")
    if not solver_report.converged:
        click.echo("warning: iteration cap reached before convergence", err=True)
        sys.exit(EXIT_ITER_CAP)


def _estimate_remote(server, s, n, input_path, truth_path, truth,
                     lam, mu, tol, max_iter, penalty, ratio,
                     output_path, report_path):
    import httpx

    body = {
        "covariance": s.tolist(),
        "lambda": lam, "mu": mu, "tol": tol, "max_iter": max_iter,
        "penalty": penalty, "ratio": ratio,
    }
    try:
        resp = httpx.post(f"{server.rstrip('/')}/estimate", json=body, timeout=None)
        resp.raise_for_status()
    except httpx.HTTPError as exc:
        _fail(f"service request failed: {exc}")
    payload = resp.json()
    est = np.asarray(payload["estimate"], dtype=float)
    solve = SolveSummary.model_validate(payload["solve"])
    report = RunReport(
        kind="estimate",
        config=ConfigEcho.model_validate(payload["config"]),
        input=InputProvenance(input_path=str(input_path),
                              truth_path=str(truth_path) if truth_path else None,
                              p=s.shape[0], n=n),
        solve=solve,
        metrics=_recovery_metrics(est, truth) if truth is not None else None,
    )
    write_matrix_market_symmetric(output_path, est, drop_tol=ESTIMATE_DROP_TOL)
    report.save(report_path)
    click.echo(f"wrote {output_path} and {report_path} (remote solve)")
    if not solve.converged:
        click.echo("warning: iteration cap reached before convergence", err=True)
        sys.exit(EXIT_ITER_CAP)


@main.command()
@click.option("--p", "p", required=True, type=int, help="Dimension, >= 2.")
@click.option("--n", "n", required=True, type=int, help="Sample count, >= 1.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out-dir", required=True, type=click.Path(path_type=Path))
@click.option("--tune-lambda", "tune", is_flag=True,
              help="Also record a penalty weight matching the truth's support size.")
@click.option("--server", default=None, help="Delegate generation to a running service.")
def gen(p, n, seed, out_dir, tune, server):
    """Write a synthetic bundle: precision.mtx, samples.csv, manifest.json."""
    from .service.schemas import Manifest

    if p < 2:
        _fail("--p must be at least 2")
    if n < 1:
        _fail("--n must be at least 1")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        _fail(f"cannot create output directory: {exc}")

    if server is not None:
        import httpx

        body = {"p": p, "n": n, "seed": seed, "include_samples": True,
                "tune_lambda": tune}
        try:
            resp = httpx.post(f"{server.rstrip('/')}/generate", json=body, timeout=None)
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            _fail(f"service request failed: {exc}")
        payload = resp.json()
        precision = np.asarray(payload["precision"], dtype=float)
        rows = np.asarray(payload["samples"], dtype=float)
        manifest = Manifest.model_validate(payload["manifest"])
    else:
        model = generate_sparse_precision(p, seed)
        samples = sample_gaussian(model, n, seed + 1)
        precision, rows = model.precision, samples.rows
        lam_suggested = None
        if tune:
            s = empirical_covariance(samples)
            lam_suggested = tune_lambda(s, model.nnz_offdiag).lam
        manifest = Manifest(
            p=p, n=n, seed=seed, nnz_offdiag=model.nnz_offdiag,
            lambda_min=float(jacobi_eigen(precision).eigenvalues[-1]),
            lambda_suggested=lam_suggested,
        )

    try:
        write_matrix_market_symmetric(out_dir / "precision.mtx", precision)
        write_samples_csv(out_dir / "samples.csv", rows)
        (out_dir / "manifest.json").write_text(
            manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        _fail(f"cannot write bundle: {exc}")
    click.echo(f"wrote bundle to {out_dir} "
               f"(nnz_offdiag={manifest.nnz_offdiag}, lambda_min={manifest.lambda_min:.4f})")


def _parse_int_list(_ctx, _param, value):
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated integer list, got {value!r}")


def _parse_grid(_ctx, _param, value):
    if value is None:
        return None
    cells = []
    try:
        for item in value.split(","):
            if not item:
                continue
            ps, ns = item.split("x")
            cells.append((int(ps), int(ns)))
    except ValueError:
        raise click.BadParameter(f"expected PxN[,PxN...], got {value!r}")
    return cells


@main.command()
@click.option("--sizes", callback=_parse_int_list, default=None,
              help="Sizes for the square-root bench, e.g. 100,200,500.")
@click.option("--seeds", default=1, show_default=True, type=int,
              help="Instances per size in the square-root bench.")
@click.option("--grid", callback=_parse_grid, default=None,
              help="Solver scaling cells as PxN pairs, e.g. 100x500,200x500.")
@click.option("--lambda", "lam", default=None, type=float,
              help="Penalty weight for solver cells; tuned per cell when omitted.")
@click.option("--mu", default=0.5, show_default=True, type=float)
@click.option("--report", "report_path", type=click.Path(path_type=Path),
              default=Path("bench.json"), show_default=True)
@click.option("--server", default=None, help="Delegate benching to a running service.")
def bench(sizes, seeds, grid, lam, mu, report_path, server):
    """Time Newton vs eigendecomposition square roots and solver scaling."""
    if not sizes and not grid:
        _fail("provide --sizes and/or --grid")

    if server is not None:
        import httpx

        sqrt_rows, solver_rows = [], []
        try:
            base = server.rstrip("/")
            if sizes:
                resp = httpx.post(f"{base}/bench/sqrt",
                                  json={"sizes": sizes, "seeds": seeds, "alpha": 4 * mu},
                                  timeout=None)
                resp.raise_for_status()
                sqrt_rows = resp.json()["rows"]
            if grid:
                cells = [{"p": p, "n": n} for p, n in grid]
                resp = httpx.post(f"{base}/bench/solver",
                                  json={"cells": cells, "lambda": lam, "mu": mu},
                                  timeout=None)
                resp.raise_for_status()
                solver_rows = resp.json()["rows"]
        except httpx.HTTPError as exc:
            _fail(f"service request failed: {exc}")
        report = RunReport(kind="bench", sqrt_bench=sqrt_rows, solver_bench=solver_rows)
    else:
        report = RunReport(
            kind="bench",
            sqrt_bench=bench_sqrt(sizes, seeds=seeds, alpha=4 * mu) if sizes else [],
            solver_bench=bench_solver(grid, lam=lam, mu=mu) if grid else [],
        )

    report.save(report_path)
    for row in report.sqrt_bench:
        click.echo(f"sqrt p={row.p}: newton {row.newton_seconds:.3f}s "
                   f"({row.newton_iters} iters), eigen {row.eigen_seconds:.3f}s, "
                   f"rel diff {row.relative_difference:.2e}")
    for row in report.solver_bench:
        click.echo(f"solve p={row.p} n={row.n}: {row.solve_seconds:.3f}s "
                   f"({row.iterations} iterations)")
    click.echo(f"wrote {report_path}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the estimation service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
