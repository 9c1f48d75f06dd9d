"""Truncated PCA, the augmented model, and trimmed-score column imputation.

The imputation scheme validates one column at a time: scores are computed
from the full validation matrix, the target column is zeroed, and the
zeroed matrix plus the scores are projected through a second ("augmented")
PCA fitted on the calibration matrix concatenated with its own scores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, ModelFitError
from .linalg import DataMatrix, SvdResult, center, svd

_ORTHO_ATOL = 1e-8


def _check_orthonormal(columns: np.ndarray, what: str) -> None:
    gram = columns.T @ columns
    if not np.allclose(gram, np.eye(columns.shape[1]), atol=_ORTHO_ATOL):
        raise ModelFitError(f"{what} columns are not orthonormal")


@dataclass(frozen=True)
class PcaModel:
    """First ``k`` loading columns of a calibration matrix's SVD."""

    loadings: np.ndarray
    k: int
    column_mean: np.ndarray | None = None

    def __post_init__(self):
        if self.loadings.ndim != 2 or self.loadings.shape[1] != self.k:
            raise ModelFitError(
                f"loadings shape {self.loadings.shape} does not match k={self.k}"
            )
        _check_orthonormal(self.loadings, "loading")

    @property
    def n_variables(self) -> int:
        return self.loadings.shape[0]


@dataclass(frozen=True)
class AugmentedPcaModel:
    """A ``k``-component PCA of ``[Y, T]``, the data beside its own scores."""

    base: PcaModel
    aug_loadings: np.ndarray
    aug_mean: np.ndarray | None = None

    def __post_init__(self):
        expected = (self.base.n_variables + self.base.k, self.base.k)
        if self.aug_loadings.shape != expected:
            raise ModelFitError(
                f"aug_loadings shape {self.aug_loadings.shape}, expected {expected}"
            )
        _check_orthonormal(self.aug_loadings, "augmented loading")


@dataclass
class ImputationErrors:
    """Imputation minus truth, one entry per (validation row, column)."""

    errors: np.ndarray

    def __post_init__(self):
        self.errors = np.asarray(self.errors, dtype=float)
        if self.errors.ndim != 2:
            raise DataError("errors must be a 2-d matrix")


def _resolve_svd(calib: DataMatrix, svd_result: SvdResult | None) -> SvdResult:
    return svd(calib) if svd_result is None else svd_result


def fit(calib: DataMatrix, k: int, svd_result: SvdResult | None = None) -> PcaModel:
    """Fit a ``k``-component PCA model.

    ``svd_result`` may pass in a precomputed decomposition of ``calib`` so
    repeated fits at different ``k`` share one factorization.
    """
    res = _resolve_svd(calib, svd_result)
    k_star = res.s.shape[0]
    if not 1 <= k <= k_star:
        raise ModelFitError(f"k must be in 1..{k_star}, got {k}")
    return PcaModel(loadings=res.v[:, :k], k=k, column_mean=calib.column_mean)


def fit_augmented(
    calib: DataMatrix, k: int, svd_result: SvdResult | None = None
) -> AugmentedPcaModel:
    """Fit the augmented model: PCA of the calibration matrix joined with
    its first ``k`` score columns.

    The joined matrix is re-centered if and only if the calibration matrix
    was centered, then decomposed and truncated to ``k`` components.
    """
    res = _resolve_svd(calib, svd_result)
    base = fit(calib, k, res)
    scores = res.scores[:, :k]
    joined = DataMatrix(np.hstack([calib.values, scores]))
    joined = center(joined, enabled=calib.column_mean is not None)
    aug = svd(joined)
    return AugmentedPcaModel(
        base=base, aug_loadings=aug.v[:, :k], aug_mean=joined.column_mean
    )


def _check_col(model: AugmentedPcaModel, valid: DataMatrix, col: int) -> None:
    j = model.base.n_variables
    if valid.n_cols != j:
        raise DataError(f"validation matrix has {valid.n_cols} columns, model expects {j}")
    if not 0 <= col < j:
        raise DataError(f"column index {col} out of range 0..{j - 1}")


def ctri_impute(model: AugmentedPcaModel, valid: DataMatrix, col: int) -> np.ndarray:
    """Impute one validation column through the augmented model.

    The sequence is deliberate and order-sensitive: (1) scores come from
    the full validation matrix, target column included; (2) the column is
    zeroed in a copy; (3) the zeroed matrix and the scores project through
    the augmented loadings; (4) the target column is read back from the
    augmented reconstruction.  ``valid`` must already be centered with the
    calibration mean when the pipeline centers.
    """
    _check_col(model, valid, col)
    scores = valid.values @ model.base.loadings
    zeroed = valid.values.copy()
    zeroed[:, col] = 0.0
    joined = np.hstack([zeroed, scores])
    if model.aug_mean is not None:
        joined = joined - model.aug_mean
    aug_scores = joined @ model.aug_loadings
    imputed = aug_scores @ model.aug_loadings[col, :]
    if model.aug_mean is not None:
        imputed = imputed + model.aug_mean[col]
    return imputed


def ctri_impute_all(model: AugmentedPcaModel, valid: DataMatrix) -> np.ndarray:
    """Impute every column at once; column ``j`` equals ``ctri_impute(..., j)``.

    Zeroing column j changes the joined matrix by a rank-one term, so all
    J projections collapse into one pass:

        imputed[:, j] = (C @ W.T)[:, j] - Y[:, j] * ||W_j||^2 + mean_j

    with C the joined full matrix projected through the augmented loadings
    W and W_j the j-th loading row.  One matrix product instead of J.
    """
    j = model.base.n_variables
    if valid.n_cols != j:
        raise DataError(f"validation matrix has {valid.n_cols} columns, model expects {j}")
    w = model.aug_loadings
    joined = np.hstack([valid.values, valid.values @ model.base.loadings])
    if model.aug_mean is not None:
        joined = joined - model.aug_mean
    full_scores = joined @ w
    imputed = full_scores @ w[:j, :].T
    row_norms = np.einsum("jk,jk->j", w[:j, :], w[:j, :])
    imputed -= valid.values * row_norms
    if model.aug_mean is not None:
        imputed += model.aug_mean[:j]
    return imputed


def ekf_ctri_criterion(errors: ImputationErrors) -> float:
    """Element-wise k-fold criterion: the mean of all squared errors."""
    if not np.all(np.isfinite(errors.errors)):
        raise DataError("imputation errors contain non-finite entries")
    return float(np.mean(errors.errors**2))


def reconstruct(model: PcaModel, data: DataMatrix) -> np.ndarray:
    """Project ``data`` onto the model subspace and back (same coordinates
    as ``data.values``; no mean handling)."""
    if data.n_cols != model.n_variables:
        raise DataError(
            f"data has {data.n_cols} columns, model expects {model.n_variables}"
        )
    return (data.values @ model.loadings) @ model.loadings.T
