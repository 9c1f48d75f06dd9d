"""Cross-validated selection of the number of principal components.

The package fits principal component and probabilistic principal
component models to a data matrix and picks the component count that
minimizes a cross-validated prediction criterion: a squared-error score
built from column-wise imputation, or an ignorance (negative
log-density) score evaluated element-wise or on whole held-out rows.
"""

from .bench import (
    BenchRecord,
    BenchSummary,
    CampaignConfig,
    run_campaign,
    summarize,
)
from .crossval import (
    CvCurve,
    CvPlan,
    Method,
    latin_square_plan,
    random_plan,
    run_cv,
)
from .datagen import DatasetSpec, generate, loading_matrix, population_covariance
from .errors import ConfigError, DataError, ModelFitError, PcselectError
from .linalg import DataMatrix, SvdResult, center, eigenvalues, svd
from .matrixio import ColumnWindow, MatrixFile, read_matrix, window_columns, write_matrix
from .pca import AugmentedPcaModel, PcaModel, ctri_impute, ctri_impute_all, ekf_ctri_criterion
from .ppca import (
    PpcaModel,
    conditional_impute,
    deflated_scores,
    ignorance_element,
    ignorance_sample,
    simulate_from_model,
)
from . import pca, ppca

__version__ = "0.1.0"

__all__ = [
    "AugmentedPcaModel",
    "BenchRecord",
    "BenchSummary",
    "CampaignConfig",
    "ColumnWindow",
    "ConfigError",
    "CvCurve",
    "CvPlan",
    "DataError",
    "DataMatrix",
    "DatasetSpec",
    "MatrixFile",
    "Method",
    "ModelFitError",
    "PcaModel",
    "PcselectError",
    "PpcaModel",
    "SvdResult",
    "center",
    "conditional_impute",
    "ctri_impute",
    "ctri_impute_all",
    "deflated_scores",
    "eigenvalues",
    "ekf_ctri_criterion",
    "generate",
    "ignorance_element",
    "ignorance_sample",
    "latin_square_plan",
    "loading_matrix",
    "pca",
    "population_covariance",
    "ppca",
    "random_plan",
    "read_matrix",
    "run_campaign",
    "run_cv",
    "simulate_from_model",
    "summarize",
    "svd",
    "window_columns",
    "write_matrix",
    "__version__",
]
