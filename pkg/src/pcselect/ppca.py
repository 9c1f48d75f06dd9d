"""Probabilistic PCA: covariance model, Gaussian scoring, generative replay.

The model keeps the leading ``k`` directions of the data spectrum and pools
the trailing eigenvalues into an isotropic noise floor.  Scoring uses the
negative log predictive density ("ignorance"): element-wise through the
conditional distribution of one column given the rest, or whole-sample
through the joint density.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, cholesky, solve_triangular

from .errors import DataError, ModelFitError
from .linalg import DataMatrix, SvdResult, eigenvalues, svd

_LOG_2PI = float(np.log(2.0 * np.pi))

#: Tiny negative deflated variances from floating-point cancellation are
#: clamped to zero; anything below this is a genuinely degenerate spectrum.
_PSI_CLAMP = -1e-12


@dataclass(frozen=True)
class PpcaModel:
    """Maximum-likelihood covariance with ``k`` retained directions.

    ``sigma`` is the dense J x J covariance ``loadings @ diag(psi)
    @ loadings.T + sigma_eps * I``; ``lam`` keeps the full eigenvalue
    vector the fit was derived from.
    """

    loadings: np.ndarray
    lam: np.ndarray
    psi: np.ndarray
    sigma_eps: float
    sigma: np.ndarray
    k: int
    column_mean: np.ndarray | None = None

    def __post_init__(self):
        j = self.loadings.shape[0]
        if self.loadings.shape != (j, self.k) or self.psi.shape != (self.k,):
            raise ModelFitError("inconsistent model dimensions")
        if self.sigma.shape != (j, j):
            raise ModelFitError(f"sigma must be {j}x{j}, got {self.sigma.shape}")
        if self.sigma_eps <= 0:
            raise ModelFitError(f"noise floor must be positive, got {self.sigma_eps}")
        if np.any(self.psi < 0):
            raise ModelFitError("deflated variances must be nonnegative")
        assembled = (self.loadings * self.psi) @ self.loadings.T + self.sigma_eps * np.eye(j)
        if not np.allclose(self.sigma, assembled, atol=1e-10):
            raise ModelFitError("sigma does not match loadings, psi and noise floor")

    @property
    def n_variables(self) -> int:
        return self.loadings.shape[0]


@dataclass
class IgnoranceMatrix:
    """Negative log density scores: per element, per whole sample, or both."""

    elementwise: np.ndarray | None = None
    per_sample: np.ndarray | None = None

    def __post_init__(self):
        for field in (self.elementwise, self.per_sample):
            if field is not None and not np.all(np.isfinite(field)):
                raise DataError("ignorance scores must be finite")


def fit(
    calib: DataMatrix,
    k: int,
    svd_result: SvdResult | None = None,
    raw_noise_variance: bool = False,
) -> PpcaModel:
    """Fit the ``k``-component probabilistic model.

    The noise floor pools the trailing spectrum: ``sigma_eps`` is the mean
    of eigenvalues ``k+1..K*``, and each retained direction keeps the
    excess ``psi = lambda - sigma_eps``.  ``k`` must stay below the number
    of variables so the pool is never empty (``k = J-1`` and ``k = J``
    would give the same covariance anyway).

    ``raw_noise_variance=True`` pools squared singular values instead of
    eigenvalues (no division by the sample count).  That variant is offered
    for auditing only: it is inconsistent with ``psi = lambda - sigma_eps``
    unless the sample count is 1, and usually fails on real spectra.
    """
    res = svd(calib) if svd_result is None else svd_result
    k_star = res.s.shape[0]
    if not 1 <= k <= k_star - 1:
        raise ModelFitError(f"k must be in 1..{k_star - 1}, got {k}")
    lam = eigenvalues(res)
    if raw_noise_variance:
        sigma_eps = float(np.mean(res.s[k:] ** 2))
    else:
        sigma_eps = float(np.mean(lam[k:]))
    psi = lam[:k] - sigma_eps
    if np.any(psi < _PSI_CLAMP):
        raise ModelFitError(
            f"noise floor {sigma_eps} exceeds a retained eigenvalue; "
            f"spectrum too flat for k={k}"
        )
    psi = np.maximum(psi, 0.0)
    loadings = res.v[:, :k]
    sigma = (loadings * psi) @ loadings.T + sigma_eps * np.eye(res.v.shape[0])
    return PpcaModel(
        loadings=loadings,
        lam=lam,
        psi=psi,
        sigma_eps=sigma_eps,
        sigma=sigma,
        k=k,
        column_mean=calib.column_mean,
    )


def conditional_impute(
    model: PpcaModel, valid: DataMatrix, col: int
) -> tuple[np.ndarray, float]:
    """Conditional mean and variance of one column given all others.

    Returns ``(imputed, phi)``: the Gaussian regression of column ``col``
    on the remaining columns and its residual variance.  The split
    covariance is solved through a Cholesky factorization, never an
    explicit inverse.
    """
    j = model.n_variables
    if valid.n_cols != j:
        raise DataError(f"validation matrix has {valid.n_cols} columns, model expects {j}")
    if not 0 <= col < j:
        raise DataError(f"column index {col} out of range 0..{j - 1}")
    rest = np.arange(j) != col
    sigma_rr = model.sigma[np.ix_(rest, rest)]
    sigma_rc = model.sigma[rest, col]
    try:
        factor = cho_factor(sigma_rr, lower=True)
    except LinAlgError as exc:
        raise ModelFitError(f"covariance block not positive definite: {exc}") from exc
    weights = cho_solve(factor, sigma_rc)
    imputed = valid.values[:, rest] @ weights
    phi = float(model.sigma[col, col] - sigma_rc @ weights)
    if phi <= 0:
        raise ModelFitError(f"conditional variance collapsed to {phi}")
    return imputed, phi


def ignorance_element(y: float, y_hat: float, phi: float) -> float:
    """Negative log density of N(y_hat, phi) at y."""
    if phi <= 0:
        raise DataError(f"phi must be positive, got {phi}")
    return 0.5 * (_LOG_2PI + np.log(phi) + (y_hat - y) ** 2 / phi)


def _chol_lower(model: PpcaModel) -> np.ndarray:
    try:
        return cholesky(model.sigma, lower=True)
    except LinAlgError as exc:
        raise ModelFitError(f"covariance not positive definite: {exc}") from exc


def ignorance_sample(model: PpcaModel, row: np.ndarray) -> float:
    """Negative log joint density of one row, divided by the column count.

    The division puts whole-sample scores on the same scale as element
    scores.  The row must already be centered the way the model was fit.
    """
    row = np.asarray(row, dtype=float)
    j = model.n_variables
    if row.shape != (j,):
        raise DataError(f"row has shape {row.shape}, model expects ({j},)")
    return float(ignorance_samples(model, row[None, :])[0])


def ignorance_samples(model: PpcaModel, rows: np.ndarray) -> np.ndarray:
    """Whole-sample scores for many rows from one Cholesky factorization."""
    rows = np.asarray(rows, dtype=float)
    j = model.n_variables
    if rows.ndim != 2 or rows.shape[1] != j:
        raise DataError(f"rows have shape {rows.shape}, model expects (*, {j})")
    lower = _chol_lower(model)
    logdet = 2.0 * float(np.sum(np.log(np.diag(lower))))
    z = solve_triangular(lower, rows.T, lower=True)
    maha = np.einsum("ji,ji->i", z, z)
    return (j * _LOG_2PI + logdet + maha) / (2.0 * j)


def deflated_scores(model: PpcaModel, svd_result: SvdResult) -> np.ndarray:
    """Scores shrunk to the model's signal variances.

    Column k of the result is the k-th score column scaled by
    ``sqrt(psi_k / lambda_k)``, so its mean square is exactly ``psi_k``.
    """
    lam_head = model.lam[: model.k]
    if np.any(lam_head == 0):
        raise ModelFitError("cannot deflate a zero-variance direction")
    return svd_result.scores[:, : model.k] * np.sqrt(model.psi / lam_head)


def simulate_from_model(
    model: PpcaModel,
    scores: np.ndarray,
    rng: np.random.Generator,
    unit_noise: bool = False,
) -> DataMatrix:
    """Generative replay: map scores through the loadings and add noise.

    Noise is N(0, sigma_eps) per entry so a replay reproduces the fitted
    noise floor; ``unit_noise=True`` switches to N(0, 1) for auditing.  The
    model's column mean, when present, is added back.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.shape[1] != model.k:
        raise DataError(f"scores have shape {scores.shape}, model expects (*, {model.k})")
    noise_sd = 1.0 if unit_noise else np.sqrt(model.sigma_eps)
    values = scores @ model.loadings.T
    values = values + rng.normal(0.0, noise_sd, size=values.shape)
    if model.column_mean is not None:
        values = values + model.column_mean
    return DataMatrix(values)
