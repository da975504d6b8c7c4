"""File format round trips and parse diagnostics."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from covsel.matio import (
    FileFormatError,
    format_float,
    read_matrix_market,
    read_samples_csv,
    write_matrix_market_array,
    write_matrix_market_symmetric,
    write_samples_csv,
)
from covsel.reports import (
    ConfigEcho,
    InputProvenance,
    NewtonBenchRow,
    RunReport,
    SolverBenchRow,
)

from conftest import random_spd


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_text_round_trip_is_exact(x):
    assert float(format_float(x)) == x


class TestMatrixMarketSymmetric:
    def test_round_trip_exact(self, tmp_path):
        m = random_spd(7, 1)
        path = tmp_path / "m.mtx"
        write_matrix_market_symmetric(path, m)
        back = read_matrix_market(path)
        np.testing.assert_array_equal(back, m)

    def test_drop_tol_omits_small_entries(self, tmp_path):
        m = np.eye(3)
        m[0, 1] = m[1, 0] = 1e-12
        m[0, 2] = m[2, 0] = 0.5
        path = tmp_path / "m.mtx"
        write_matrix_market_symmetric(path, m, drop_tol=1e-10)
        back = read_matrix_market(path)
        assert back[0, 1] == 0.0
        assert back[0, 2] == 0.5

    def test_sparse_truth_round_trip(self, tmp_path):
        from covsel.datagen import generate_sparse_precision

        model = generate_sparse_precision(10, 3)
        path = tmp_path / "truth.mtx"
        write_matrix_market_symmetric(path, model.precision)
        np.testing.assert_array_equal(read_matrix_market(path), model.precision)

    def test_header_and_indices(self, tmp_path):
        path = tmp_path / "m.mtx"
        write_matrix_market_symmetric(path, np.diag([2.0, 3.0]))
        lines = path.read_text().splitlines()
        assert lines[0] == "%%MatrixMarket matrix coordinate real symmetric"
        assert lines[1] == "2 2 2"
        assert lines[2].startswith("1 1 ")


class TestMatrixMarketArray:
    def test_round_trip_exact(self, tmp_path):
        m = np.random.default_rng(5).standard_normal((4, 6))
        path = tmp_path / "m.mtx"
        write_matrix_market_array(path, m)
        np.testing.assert_array_equal(read_matrix_market(path), m)

    def test_reads_symmetric_array_variant(self, tmp_path):
        # lower triangle stored column by column
        path = tmp_path / "m.mtx"
        path.write_text(
            "%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n"
        )
        np.testing.assert_array_equal(
            read_matrix_market(path), [[1.0, 2.0], [2.0, 3.0]]
        )

    def test_reads_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "m.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate real general\n"
            "% a comment\n\n2 2 1\n% another\n1 2 -3.5\n"
        )
        np.testing.assert_array_equal(read_matrix_market(path), [[0.0, -3.5], [0.0, 0.0]])


class TestMatrixMarketErrors:
    def test_missing_banner(self, tmp_path):
        path = tmp_path / "bad.mtx"
        path.write_text("1 2 3\n")
        with pytest.raises(FileFormatError) as exc:
            read_matrix_market(path)
        assert exc.value.line == 1

    def test_bad_value_has_line_and_column(self, tmp_path):
        path = tmp_path / "bad.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n2 1 oops\n"
        )
        with pytest.raises(FileFormatError) as exc:
            read_matrix_market(path)
        assert exc.value.line == 4
        assert exc.value.column == 3

    def test_index_out_of_range(self, tmp_path):
        path = tmp_path / "bad.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n"
        )
        with pytest.raises(FileFormatError, match="out of range") as exc:
            read_matrix_market(path)
        assert exc.value.line == 3

    def test_entry_count_mismatch(self, tmp_path):
        path = tmp_path / "bad.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 5\n1 1 1.0\n"
        )
        with pytest.raises(FileFormatError, match="expected 5 entries"):
            read_matrix_market(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.mtx"
        path.write_text("")
        with pytest.raises(FileFormatError):
            read_matrix_market(path)


class TestSamplesCsv:
    def test_round_trip_exact(self, tmp_path):
        rows = np.random.default_rng(6).standard_normal((20, 4))
        path = tmp_path / "samples.csv"
        write_samples_csv(path, rows)
        np.testing.assert_array_equal(read_samples_csv(path), rows)

    def test_bad_field_diagnostic(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0,x\n")
        with pytest.raises(FileFormatError) as exc:
            read_samples_csv(path)
        assert exc.value.line == 2
        assert exc.value.column == 2

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(FileFormatError, match="expected 2"):
            read_samples_csv(path)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(FileFormatError, match="no observations"):
            read_samples_csv(path)


class TestRunReportDocument:
    def test_json_round_trip(self, tmp_path):
        report = RunReport(
            kind="estimate",
            config=ConfigEcho(lam=0.1, mu=0.5, tol=1e-4, max_iter=2000, penalty="l1"),
            input=InputProvenance(input_path="samples.csv", p=10, n=50),
            sqrt_bench=[NewtonBenchRow(p=100, newton_seconds=0.01, eigen_seconds=0.05,
                                       newton_iters=8, relative_difference=1e-13)],
            solver_bench=[SolverBenchRow(p=10, n=50, solve_seconds=0.2,
                                         iterations=40, converged=True)],
        )
        path = tmp_path / "report.json"
        report.save(path)
        assert RunReport.load(path) == report

    def test_lambda_alias_in_document(self, tmp_path):
        report = RunReport(
            kind="estimate",
            config=ConfigEcho(lam=0.25, mu=0.5, tol=1e-4, max_iter=10, penalty="l1"),
        )
        path = tmp_path / "report.json"
        report.save(path)
        assert '"lambda": 0.25' in path.read_text()
