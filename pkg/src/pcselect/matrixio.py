"""Comma-separated matrix files with optional labeled columns.

Values round-trip losslessly: floats are rendered with ``repr``, the
shortest decimal string that parses back to the same double.  Column
labels carry physical meaning (wavelengths in nm for spectra), so windows
select by label value, not position.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError


@dataclass(frozen=True)
class MatrixFile:
    """A rectangular block of doubles plus optional column labels."""

    values: np.ndarray
    header: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2:
            raise DataError(f"expected a 2-d matrix, got shape {values.shape}")
        if self.header is not None:
            header = tuple(self.header)
            object.__setattr__(self, "header", header)
            if len(header) != values.shape[1]:
                raise DataError(
                    f"{len(header)} labels for {values.shape[1]} columns"
                )
            if len(set(header)) != len(header):
                raise DataError("column labels must be unique")

    @property
    def numeric_header(self) -> np.ndarray:
        """Labels parsed as floats (wavelengths); error when unparseable."""
        if self.header is None:
            raise DataError("matrix has no header")
        try:
            return np.array([float(label) for label in self.header])
        except ValueError as exc:
            raise DataError(f"non-numeric column label: {exc}") from exc


@dataclass(frozen=True)
class ColumnWindow:
    """Inclusive label range [low, high]."""

    low: float
    high: float

    def __post_init__(self):
        if not np.isfinite(self.low) or not np.isfinite(self.high):
            raise ConfigError("window bounds must be finite")
        if self.low > self.high:
            raise ConfigError(f"window low {self.low} exceeds high {self.high}")


def _is_float(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_matrix(path, header: bool | str = "auto") -> MatrixFile:
    """Parse a comma-separated matrix file.

    ``header="auto"`` treats the first line as labels only when some cell
    there does not parse as a float.  Numeric labels (wavelengths) are
    indistinguishable from data, so callers with such files must pass
    ``header=True``.
    """
    if header not in (True, False, "auto"):
        raise ConfigError(f"header must be True, False or 'auto', got {header!r}")
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DataError(f"{path}: empty file")

    rows = [line.split(",") for line in lines]
    labels = None
    if header is True or (header == "auto" and not all(map(_is_float, rows[0]))):
        labels = tuple(cell.strip() for cell in rows[0])
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path}: header without data rows")

    width = len(rows[0])
    values = np.empty((len(rows), width))
    offset = 2 if labels is not None else 1
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"{path}: line {i + offset} has {len(row)} cells, expected {width}"
            )
        for j, cell in enumerate(row):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: line {i + offset}: non-numeric cell {cell!r}"
                ) from None
    return MatrixFile(values=values, header=labels)


def format_matrix(matrix: MatrixFile) -> str:
    """Render a matrix file: optional label line, then one line per row,
    line-feed endings, shortest round-trip float rendering."""
    lines = []
    if matrix.header is not None:
        lines.append(",".join(matrix.header))
    for row in matrix.values:
        lines.append(",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def write_matrix(matrix: MatrixFile, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_matrix(matrix))


def window_columns(matrix: MatrixFile, window: ColumnWindow) -> MatrixFile:
    """Keep the columns whose numeric label falls inside the window."""
    labels = matrix.numeric_header
    keep = (labels >= window.low) & (labels <= window.high)
    if np.sum(keep) < 2:
        raise DataError(
            f"window [{window.low}, {window.high}] selects {int(np.sum(keep))} "
            "columns, need at least 2"
        )
    return MatrixFile(
        values=matrix.values[:, keep],
        header=tuple(label for label, k in zip(matrix.header, keep) if k),
    )
