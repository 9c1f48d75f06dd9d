"""Column centering and thin singular value decomposition.

Everything downstream (PCA, probabilistic PCA, cross-validation) consumes
the two value types defined here.  All functions are pure: inputs are never
mutated and results are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

#: Relative tolerance for SVD reconstruction / orthonormality contracts.
RECONSTRUCTION_RTOL = 1e-8


@dataclass(frozen=True)
class DataMatrix:
    """A samples-by-variables matrix, plus the column mean removed from it.

    ``column_mean`` is ``None`` when the data was never centered.  When it
    is present, ``values + column_mean`` recovers the pre-centering matrix
    (up to accumulation error).
    """

    values: np.ndarray
    column_mean: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise DataError(f"expected a non-empty 2-d matrix, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DataError("matrix entries must all be finite")
        if self.column_mean is not None:
            mean = np.asarray(self.column_mean, dtype=float)
            object.__setattr__(self, "column_mean", mean)
            if mean.shape != (values.shape[1],):
                raise DataError(
                    f"column_mean has length {mean.shape}, expected ({values.shape[1]},)"
                )

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD of a calibration matrix: ``Y = u @ diag(s) @ v.T``.

    ``u`` holds the standardized scores (orthonormal columns), ``s`` the
    singular values sorted descending, ``v`` the loadings (orthonormal
    columns).  ``n_rows`` is the number of calibration samples, kept so the
    eigenvalue normalization does not depend on carrying the data around.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    n_rows: int

    def __post_init__(self):
        if self.s.ndim != 1 or np.any(self.s < 0) or np.any(np.diff(self.s) > 0):
            raise DataError("singular values must be nonnegative and sorted descending")
        k = self.s.shape[0]
        if self.u.shape != (self.n_rows, k) or self.v.shape[1] != k:
            raise DataError("inconsistent SVD factor shapes")

    @property
    def scores(self) -> np.ndarray:
        """Principal scores ``T = u @ diag(s)``, computed on demand."""
        return self.u * self.s


def center(matrix: DataMatrix, mean: np.ndarray | None = None, enabled: bool = True) -> DataMatrix:
    """Subtract a column mean and record it on the result.

    When ``mean`` is ``None`` the matrix's own column means are used (the
    calibration case); otherwise the supplied vector is subtracted (the
    validation case, where the calibration mean must be reused).  With
    ``enabled=False`` the values pass through untouched and no mean is
    recorded -- the mode used for the simulated benchmark data, which is
    analyzed raw.
    """
    if not enabled:
        return DataMatrix(matrix.values)
    if mean is None:
        mean = matrix.values.mean(axis=0)
    else:
        mean = np.asarray(mean, dtype=float)
        if mean.shape != (matrix.n_cols,):
            raise DataError(
                f"mean has shape {mean.shape}, expected ({matrix.n_cols},)"
            )
    return DataMatrix(matrix.values - mean, column_mean=mean)


def svd(calib: DataMatrix) -> SvdResult:
    """Thin SVD of a calibration matrix with a deterministic sign convention.

    Requires more samples than variables (strictly), so the number of
    components is always ``K* = J``.  Each loading column is flipped so its
    entry of largest magnitude is positive (ties broken by lowest row
    index), making repeated calls on the same matrix bit-identical.
    """
    n, p = calib.values.shape
    if n <= p:
        raise DataError(f"need more samples than variables, got {n} x {p}")
    try:
        u, s, vt = np.linalg.svd(calib.values, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise DataError(f"SVD failed: {exc}") from exc
    v = vt.T
    # Sign convention: largest-magnitude entry of each loading column positive.
    anchor = np.argmax(np.abs(v), axis=0)
    flip = np.sign(v[anchor, np.arange(p)])
    flip[flip == 0] = 1.0
    return SvdResult(u=u * flip, s=s, v=v * flip, n_rows=n)


def eigenvalues(svd_result: SvdResult) -> np.ndarray:
    """Eigenvalues of the empirical covariance: ``lambda_k = s_k**2 / n_rows``."""
    if svd_result.n_rows <= 0:
        raise DataError("n_rows must be positive")
    return svd_result.s**2 / svd_result.n_rows
