"""Simulated benchmark data: four loading structures times six noise levels.

Each data set type defines a fixed linear map from standard-normal latent
variables to observed variables; noisy instances rescale so the observed
variance stays near 1 regardless of the noise level.  Generation is
deterministic given (seed, set_type, noise_level, repetition).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .linalg import DataMatrix

SET_TYPES = (1, 2, 3, 4)

#: Observed variables J per set type.
N_VARIABLES = {1: 10, 2: 10, 3: 27, 4: 50}

#: Latent variables feeding the generator of each set type.
N_LATENTS = {1: 4, 2: 8, 3: 12, 4: 15}

#: Component count the generator actually embeds (rank of the noise-free
#: covariance).  Benchmarks may override this per type when scoring.
GROUND_TRUTH_K = {1: 4, 2: 8, 3: 12, 4: 15}

#: Noise variance for levels e = 1..6.
NOISE_VARIANCES = {1: 0.05, 2: 0.1, 3: 0.15, 4: 0.2, 5: 0.25, 6: 0.5}

_SQRT_HALF = np.sqrt(0.5)


@dataclass(frozen=True)
class DatasetSpec:
    """Identifies one simulated instance: type s, noise level e, repetition r."""

    set_type: int
    noise_level: int
    repetition: int = 1
    n_samples: int = 1024
    seed: int = 0

    def __post_init__(self):
        if self.set_type not in N_VARIABLES:
            raise ConfigError(f"set_type must be 1..4, got {self.set_type}")
        if self.noise_level not in NOISE_VARIANCES:
            raise ConfigError(f"noise_level must be 1..6, got {self.noise_level}")
        if self.repetition < 1:
            raise ConfigError(f"repetition must be >= 1, got {self.repetition}")
        if self.n_samples < 1:
            raise ConfigError(f"n_samples must be >= 1, got {self.n_samples}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")

    @property
    def n_variables(self) -> int:
        return N_VARIABLES[self.set_type]

    @property
    def n_latents(self) -> int:
        return N_LATENTS[self.set_type]

    @property
    def ground_truth_k(self) -> int:
        return GROUND_TRUTH_K[self.set_type]

    @property
    def noise_variance(self) -> float:
        return NOISE_VARIANCES[self.noise_level]

    @property
    def tag(self) -> str:
        """Instance label ``s.e.r``, e.g. ``'4.6.17'``."""
        return f"{self.set_type}.{self.noise_level}.{self.repetition}"


def _pairs(indices) -> list[tuple[int, int]]:
    """Distinct unordered pairs in lexicographic order (0-based indices)."""
    return list(itertools.combinations(indices, 2))


def loading_matrix(set_type: int) -> np.ndarray:
    """The J x K_gen map W from latent variables to noise-free observations.

    Row j holds the coefficients of y_j; a sample is ``y = W @ x``.  Pair
    cases assign lexicographically ordered latent pairs to ascending j.
    """
    if set_type not in N_VARIABLES:
        raise ConfigError(f"set_type must be 1..4, got {set_type}")
    w = np.zeros((N_VARIABLES[set_type], N_LATENTS[set_type]))
    if set_type == 1:
        for j in range(5):  # y_1..y_5 blend x_1 and x_2
            frac = (j + 1) / 5.0
            w[j, 0] = np.sqrt(frac)
            w[j, 1] = np.sqrt(1.0 - frac)
        for j in range(5, 9):  # y_6..y_9 blend x_1, x_2, x_3
            frac = (j + 1) / 10.0
            w[j, 0] = _SQRT_HALF
            w[j, 1] = np.sqrt(frac - 0.5)
            w[j, 2] = np.sqrt(1.0 - frac)
        w[9, :3] = 0.01  # y_10 is x_4 plus a faint trace of the others
        w[9, 3] = 1.0
    elif set_type == 2:
        for j, (a, b) in enumerate(_pairs(range(4))):  # y_1..y_6
            w[j, a] = w[j, b] = _SQRT_HALF
        for j, (a, b) in enumerate(_pairs(range(4, 7)), start=6):  # y_7..y_9
            w[j, a] = w[j, b] = _SQRT_HALF
        w[9, 7] = 1.0
    elif set_type == 3:
        for j in range(12):  # y_1..y_12 copy x_1..x_12
            w[j, j] = 1.0
        for j, (a, b) in enumerate(_pairs(range(6)), start=12):  # y_13..y_27
            w[j, a] = w[j, b] = _SQRT_HALF
    else:
        for j, (a, b) in enumerate(_pairs(range(10))):  # y_1..y_45
            w[j, a] = w[j, b] = _SQRT_HALF
        w[45, 10] = 1.0
        w[46, 11] = 1.0
        w[47, 10] = w[47, 12] = _SQRT_HALF
        w[48, 11] = w[48, 13] = _SQRT_HALF
        w[49, 14] = 1.0
    return w


def noise_free_sample(set_type: int, latent: np.ndarray) -> np.ndarray:
    """Map one latent vector to the J observed variables of a set type."""
    latent = np.asarray(latent, dtype=float)
    w = loading_matrix(set_type)
    if latent.shape != (w.shape[1],):
        raise DataError(
            f"type {set_type} needs {w.shape[1]} latent variables, got shape {latent.shape}"
        )
    return w @ latent


def add_noise(y: np.ndarray, sigma_e: float, rng: np.random.Generator) -> np.ndarray:
    """Add N(0, sigma_e) noise per entry, then rescale by 1/sqrt(1 + sigma_e).

    ``sigma_e`` is a variance.  The rescaling keeps the total variance of a
    unit-variance signal at 1, so noise levels are comparable across types.
    """
    if sigma_e <= 0:
        raise DataError(f"sigma_e must be positive, got {sigma_e}")
    e = rng.normal(0.0, np.sqrt(sigma_e), size=np.shape(y))
    return (np.asarray(y, dtype=float) + e) / np.sqrt(1.0 + sigma_e)


def generate(spec: DatasetSpec) -> DataMatrix:
    """Draw one complete instance: I latent samples, mapped and noised.

    The RNG is seeded from (seed, s, e, r), so every instance is
    reproducible bit-exactly and distinct instances are independent.
    """
    seq = np.random.SeedSequence(
        [spec.seed, spec.set_type, spec.noise_level, spec.repetition]
    )
    rng = np.random.default_rng(seq)
    x = rng.standard_normal((spec.n_samples, spec.n_latents))
    clean = x @ loading_matrix(spec.set_type).T
    return DataMatrix(add_noise(clean, spec.noise_variance, rng))


def population_covariance(set_type: int, sigma_e: float = 0.0) -> np.ndarray:
    """Analytic covariance of generated data: (W W^T + sigma_e I) / (1 + sigma_e).

    With ``sigma_e=0`` this is the noise-free covariance, whose rank is the
    embedded component count.
    """
    if sigma_e < 0:
        raise DataError(f"sigma_e must be nonnegative, got {sigma_e}")
    w = loading_matrix(set_type)
    cov = w @ w.T
    if sigma_e > 0:
        cov = (cov + sigma_e * np.eye(cov.shape[0])) / (1.0 + sigma_e)
    return cov
