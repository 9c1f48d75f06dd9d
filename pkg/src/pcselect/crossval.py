"""Fold planning and the three cross-validation methods.

A plan assigns every row to one of F folds.  For each fold the remaining
rows calibrate a model per candidate component count k, the held-out rows
are scored, and the grand mean of the scores over all folds forms the
criterion curve; the selected k minimizes it.

Three methods are offered: squared trimmed-score imputation error per
element (PCA), element-wise ignorance through the conditional Gaussian
(PPCA), and whole-sample ignorance through the joint Gaussian (PPCA).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import pca, ppca
from .errors import ConfigError, DataError, ModelFitError
from .linalg import DataMatrix, center, svd

_LOG_2PI = float(np.log(2.0 * np.pi))

DEFAULT_FOLDS = 16


class Method(str, enum.Enum):
    """Cross-validation criterion variants."""

    PCA_EKF_CTRI = "pca-ekf-ctri"
    PPCA_EKF_IGN = "ppca-ekf-ign"
    PPCA_RKF_IGN = "ppca-rkf-ign"


@dataclass(frozen=True)
class CvPlan:
    """Assignment of each row to a fold (values 0..n_folds-1)."""

    fold_of_row: np.ndarray
    n_folds: int

    def __post_init__(self):
        folds = np.asarray(self.fold_of_row, dtype=int)
        object.__setattr__(self, "fold_of_row", folds)
        if self.n_folds < 2:
            raise ConfigError(f"need at least 2 folds, got {self.n_folds}")
        counts = np.bincount(folds, minlength=self.n_folds)
        if folds.min(initial=0) < 0 or folds.max(initial=0) >= self.n_folds:
            raise ConfigError("fold indices out of range")
        if np.any(counts == 0):
            raise ConfigError("every fold must contain at least one row")
        if counts.max() - counts.min() > 1:
            raise ConfigError("fold sizes may differ by at most one row")

    @property
    def n_rows(self) -> int:
        return self.fold_of_row.shape[0]


@dataclass(frozen=True)
class CvCurve:
    """Criterion per candidate k and the arg-min selection."""

    method: Method
    k_values: np.ndarray
    criterion: np.ndarray
    selected_k: int

    def __post_init__(self):
        if self.k_values.shape != self.criterion.shape:
            raise DataError("k_values and criterion must align")
        if not np.all(np.isfinite(self.criterion)):
            raise DataError("criterion values must be finite")
        if self.selected_k != self.k_values[np.argmin(self.criterion)]:
            raise DataError("selected_k does not match the criterion minimum")


def random_plan(n_rows: int, n_folds: int, rng: np.random.Generator) -> CvPlan:
    """Fully randomized near-equal blocks: a shuffled row order chopped
    into n_folds contiguous pieces (sizes differ by at most one)."""
    if n_folds < 2:
        raise ConfigError(f"need at least 2 folds, got {n_folds}")
    if n_rows < n_folds:
        raise ConfigError(f"need at least {n_folds} rows, got {n_rows}")
    order = rng.permutation(n_rows)
    fold_of_row = np.empty(n_rows, dtype=int)
    for fold, rows in enumerate(np.array_split(order, n_folds)):
        fold_of_row[rows] = fold
    return CvPlan(fold_of_row=fold_of_row, n_folds=n_folds)


def latin_square_plan(
    grid_side: int, reps_per_cell: int, rng: np.random.Generator
) -> CvPlan:
    """Fold assignment from a randomized Latin square over a grid.

    Rows are ordered cell-major (grid row, then grid column) with
    ``reps_per_cell`` consecutive rows per cell, all sharing the cell's
    fold.  Every fold then appears exactly once per grid row and per grid
    column.  The square is a cyclic square randomized by row, column and
    symbol shuffles.
    """
    if grid_side < 2:
        raise ConfigError(f"grid side must be at least 2, got {grid_side}")
    if reps_per_cell < 1:
        raise ConfigError(f"reps_per_cell must be positive, got {reps_per_cell}")
    base = (np.arange(grid_side)[:, None] + np.arange(grid_side)[None, :]) % grid_side
    square = rng.permutation(grid_side)[base]
    square = square[rng.permutation(grid_side)][:, rng.permutation(grid_side)]
    fold_of_row = np.repeat(square.reshape(-1), reps_per_cell)
    return CvPlan(fold_of_row=fold_of_row, n_folds=grid_side)


def _ekf_ctri_score(calib, svd_result, valid, k):
    model = pca.fit_augmented(calib, k, svd_result)
    errors = pca.ctri_impute_all(model, valid) - valid.values
    return np.sum(errors**2)


def _ekf_ign_score(calib, svd_result, valid, k):
    model = ppca.fit(calib, k, svd_result)
    total = 0.0
    for col in range(valid.n_cols):
        imputed, phi = ppca.conditional_impute(model, valid, col)
        residual = imputed - valid.values[:, col]
        total += 0.5 * (
            valid.n_rows * (_LOG_2PI + np.log(phi)) + np.sum(residual**2) / phi
        )
    return total


def _rkf_ign_score(calib, svd_result, valid, k):
    model = ppca.fit(calib, k, svd_result)
    return np.sum(ppca.ignorance_samples(model, valid.values))


_FOLD_SCORERS = {
    Method.PCA_EKF_CTRI: _ekf_ctri_score,
    Method.PPCA_EKF_IGN: _ekf_ign_score,
    Method.PPCA_RKF_IGN: _rkf_ign_score,
}


def run_cv(
    data: DataMatrix,
    method: Method | str,
    plan: CvPlan,
    k_range=None,
    centering: bool = True,
) -> CvCurve:
    """Cross-validate one method over a range of component counts.

    Per fold: held-out rows are split off, centering (when enabled) uses
    the calibration rows only, one SVD serves every k, and the method's
    scores accumulate into per-k sums.  The criterion is the grand mean
    per element (whole-sample scores: per row).  Ties in the minimum go to
    the smallest k.
    """
    method = Method(method)
    j = data.n_cols
    if j < 2:
        raise DataError("need at least 2 columns")
    if plan.n_rows != data.n_rows:
        raise DataError(f"plan covers {plan.n_rows} rows, data has {data.n_rows}")
    if k_range is None:
        k_values = np.arange(1, j)
    else:
        k_values = np.unique(np.asarray(list(k_range), dtype=int))
    if k_values.size == 0 or k_values.min() < 1 or k_values.max() > j - 1:
        raise ConfigError(f"k range must lie within 1..{j - 1}")

    score = _FOLD_SCORERS[method]
    sums = np.zeros(k_values.size)
    rows_scored = 0
    for fold in range(plan.n_folds):
        held_out = plan.fold_of_row == fold
        calib = center(DataMatrix(data.values[~held_out]), enabled=centering)
        valid = center(
            DataMatrix(data.values[held_out]),
            mean=calib.column_mean,
            enabled=centering,
        )
        svd_result = svd(calib)
        for i, k in enumerate(k_values):
            try:
                sums[i] += score(calib, svd_result, valid, int(k))
            except ModelFitError as exc:
                raise ModelFitError(f"fold {fold}, k={k}: {exc}") from exc
        rows_scored += valid.n_rows
    n_scores = rows_scored if method is Method.PPCA_RKF_IGN else rows_scored * j
    criterion = sums / n_scores
    selected = int(k_values[np.argmin(criterion)])
    return CvCurve(
        method=method, k_values=k_values, criterion=criterion, selected_k=selected
    )
