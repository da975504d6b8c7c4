"""Text formats for matrices, samples, and reports.

Matrices travel as MatrixMarket: coordinate symmetric (1-based indices,
lower triangle) for sparse outputs, array for dense inputs. Samples are
headerless CSV, one observation per row. Floats are written with 17
significant digits so every write/read round trip reproduces the exact
double. Readers raise :class:`FileFormatError` carrying the 1-based line
(and column where meaningful) of the first offending token.
"""

from __future__ import annotations

import csv

import numpy as np

__all__ = [
    "FileFormatError",
    "format_float",
    "write_matrix_market_symmetric",
    "write_matrix_market_array",
    "read_matrix_market",
    "write_samples_csv",
    "read_samples_csv",
]


class FileFormatError(ValueError):
    """A file failed to parse. Carries path, line, and column when known."""

    def __init__(self, message: str, path: str | None = None,
                 line: int | None = None, column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        loc = ""
        if path is not None:
            loc += str(path)
        if line is not None:
            loc += f":{line}"
            if column is not None:
                loc += f":{column}"
        super().__init__(f"{loc}: {message}" if loc else message)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_matrix_market_symmetric(
    path, m: np.ndarray, drop_tol: float = 0.0, comment: str | None = None
) -> None:
    """Write the lower triangle of a symmetric matrix in coordinate format.

    Entries with absolute value <= drop_tol are omitted, which is how
    estimates shed their thresholded zeros on disk.
    """
    m = np.asarray(m, dtype=float)
    p = m.shape[0]
    il, jl = np.tril_indices(p)
    keep = np.abs(m[il, jl]) > drop_tol
    il, jl = il[keep], jl[keep]
    lines = ["%%MatrixMarket matrix coordinate real symmetric"]
    if comment:
        lines.extend(f"% {c}" for c in comment.splitlines())
    lines.append(f"{p} {p} {il.size}")
    lines.extend(
        f"{i + 1} {j + 1} {format_float(m[i, j])}" for i, j in zip(il, jl)
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_matrix_market_array(path, m: np.ndarray, comment: str | None = None) -> None:
    """Write a dense matrix in array format (column-major, as the format requires)."""
    m = np.asarray(m, dtype=float)
    rows, cols = m.shape
    lines = ["%%MatrixMarket matrix array real general"]
    if comment:
        lines.extend(f"% {c}" for c in comment.splitlines())
    lines.append(f"{rows} {cols}")
    lines.extend(format_float(v) for v in m.flatten(order="F"))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_float(token: str, path, lineno: int, column: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise FileFormatError(
            f"expected a number, got {token!r}", path=str(path), line=lineno, column=column
        ) from None


def _parse_int(token: str, path, lineno: int, column: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise FileFormatError(
            f"expected an integer, got {token!r}", path=str(path), line=lineno, column=column
        ) from None


def read_matrix_market(path) -> np.ndarray:
    """Read a MatrixMarket file into a dense array.

    Accepts coordinate and array formats, real or integer fields, general
    or symmetric storage. Symmetric coordinate entries are mirrored; a
    symmetric array file carries its lower triangle column by column.
    """
    with open(path, encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise FileFormatError("empty file", path=str(path), line=1)

    banner = raw[0].split()
    if len(banner) != 5 or banner[0] != "%%MatrixMarket":
        raise FileFormatError(
            "missing '%%MatrixMarket object format field symmetry' banner",
            path=str(path), line=1,
        )
    _, obj, fmt, field, symmetry = (t.lower() for t in banner)
    if obj != "matrix":
        raise FileFormatError(f"unsupported object {obj!r}", path=str(path), line=1)
    if fmt not in ("coordinate", "array"):
        raise FileFormatError(f"unsupported format {fmt!r}", path=str(path), line=1)
    if field not in ("real", "integer"):
        raise FileFormatError(f"unsupported field {field!r}", path=str(path), line=1)
    if symmetry not in ("general", "symmetric"):
        raise FileFormatError(f"unsupported symmetry {symmetry!r}", path=str(path), line=1)

    # first non-comment, non-blank line after the banner holds the sizes
    body: list[tuple[int, str]] = []
    for lineno, line in enumerate(raw[1:], start=2):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        body.append((lineno, stripped))
    if not body:
        raise FileFormatError("missing size line", path=str(path), line=len(raw))

    size_lineno, size_line = body[0]
    tokens = size_line.split()
    expected = 3 if fmt == "coordinate" else 2
    if len(tokens) != expected:
        raise FileFormatError(
            f"size line must have {expected} fields, got {len(tokens)}",
            path=str(path), line=size_lineno,
        )
    rows = _parse_int(tokens[0], path, size_lineno, 1)
    cols = _parse_int(tokens[1], path, size_lineno, 2)
    if rows < 1 or cols < 1:
        raise FileFormatError("matrix dimensions must be positive",
                              path=str(path), line=size_lineno)
    if symmetry == "symmetric" and rows != cols:
        raise FileFormatError("symmetric matrix must be square",
                              path=str(path), line=size_lineno)
    m = np.zeros((rows, cols))

    if fmt == "coordinate":
        nnz = _parse_int(tokens[2], path, size_lineno, 3)
        entries = body[1:]
        if len(entries) != nnz:
            raise FileFormatError(
                f"expected {nnz} entries, found {len(entries)}",
                path=str(path), line=size_lineno,
            )
        for lineno, line in entries:
            fields = line.split()
            if len(fields) != 3:
                raise FileFormatError(
                    f"entry must have 3 fields, got {len(fields)}",
                    path=str(path), line=lineno,
                )
            i = _parse_int(fields[0], path, lineno, 1) - 1
            j = _parse_int(fields[1], path, lineno, 2) - 1
            v = _parse_float(fields[2], path, lineno, 3)
            if not 0 <= i < rows or not 0 <= j < cols:
                raise FileFormatError(
                    f"index ({i + 1}, {j + 1}) out of range for {rows}x{cols}",
                    path=str(path), line=lineno,
                )
            m[i, j] = v
            if symmetry == "symmetric":
                m[j, i] = v
        return m

    values = []
    for lineno, line in body[1:]:
        for col, token in enumerate(line.split(), start=1):
            values.append(_parse_float(token, path, lineno, col))
    if symmetry == "general":
        if len(values) != rows * cols:
            raise FileFormatError(
                f"array data has {len(values)} values, expected {rows * cols}",
                path=str(path), line=body[-1][0] if len(body) > 1 else size_lineno,
            )
        return np.array(values).reshape((cols, rows)).T
    # symmetric array: lower triangle, column major
    need = rows * (rows + 1) // 2
    if len(values) != need:
        raise FileFormatError(
            f"symmetric array data has {len(values)} values, expected {need}",
            path=str(path), line=body[-1][0] if len(body) > 1 else size_lineno,
        )
    pos = 0
    for j in range(cols):
        for i in range(j, rows):
            m[i, j] = values[pos]
            m[j, i] = values[pos]
            pos += 1
    return m


def write_samples_csv(path, rows: np.ndarray) -> None:
    """Headerless CSV, one observation per row."""
    rows = np.asarray(rows, dtype=float)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow([format_float(v) for v in row])


def read_samples_csv(path) -> np.ndarray:
    """Read a headerless CSV of observations into an (n, p) array."""
    data: list[list[float]] = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record:
                continue
            row = []
            for col, token in enumerate(record, start=1):
                token = token.strip()
                if not token:
                    raise FileFormatError("empty field", path=str(path),
                                          line=lineno, column=col)
                row.append(_parse_float(token, path, lineno, col))
            if data and len(row) != len(data[0]):
                raise FileFormatError(
                    f"row has {len(row)} fields, expected {len(data[0])}",
                    path=str(path), line=lineno,
                )
            data.append(row)
    if not data:
        raise FileFormatError("no observations in file", path=str(path), line=1)
    return np.array(data)
