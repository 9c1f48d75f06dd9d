import numpy as np
import pytest

from pcselect import datagen
from pcselect.datagen import (
    GROUND_TRUTH_K,
    N_LATENTS,
    N_VARIABLES,
    NOISE_VARIANCES,
    DatasetSpec,
    add_noise,
    generate,
    loading_matrix,
    noise_free_sample,
    population_covariance,
)
from pcselect.errors import ConfigError, DataError


class TestDatasetSpec:
    @pytest.mark.parametrize("field,value", [
        ("set_type", 0),
        ("set_type", 5),
        ("noise_level", 0),
        ("noise_level", 7),
        ("repetition", 0),
        ("n_samples", 0),
        ("seed", -1),
        ("seed", 2**64),
    ])
    def test_rejects_out_of_range_fields(self, field, value):
        kwargs = dict(set_type=1, noise_level=1, repetition=1, n_samples=8, seed=0)
        kwargs[field] = value
        with pytest.raises(ConfigError):
            DatasetSpec(**kwargs)

    def test_derived_properties(self):
        spec = DatasetSpec(set_type=3, noise_level=5)
        assert spec.n_variables == 27
        assert spec.n_latents == 12
        assert spec.ground_truth_k == 12
        assert spec.noise_variance == 0.25
        assert spec.tag == "3.5.1"


class TestLoadingMatrix:
    @pytest.mark.parametrize("set_type", [1, 2, 3, 4])
    def test_shapes(self, set_type):
        w = loading_matrix(set_type)
        assert w.shape == (N_VARIABLES[set_type], N_LATENTS[set_type])

    @pytest.mark.parametrize("set_type", [1, 2, 3, 4])
    def test_rows_unit_norm_except_last_of_type_1(self, set_type):
        w = loading_matrix(set_type)
        norms = np.sum(w**2, axis=1)
        if set_type == 1:
            np.testing.assert_allclose(norms[:9], 1.0, atol=1e-12)
            np.testing.assert_allclose(norms[9], 1.0003, atol=1e-12)
        else:
            np.testing.assert_allclose(norms, 1.0, atol=1e-12)

    @pytest.mark.parametrize("set_type", [1, 2, 3, 4])
    def test_noise_free_covariance_rank_is_ground_truth(self, set_type):
        eigs = np.linalg.eigvalsh(population_covariance(set_type))
        assert int(np.sum(eigs > 1e-10)) == GROUND_TRUTH_K[set_type]

    def test_rejects_unknown_type(self):
        with pytest.raises(ConfigError):
            loading_matrix(7)


class TestNoiseFreeSample:
    def test_type_1_first_latent_profile(self):
        y = noise_free_sample(1, np.array([1.0, 0.0, 0.0, 0.0]))
        assert y[4] == pytest.approx(1.0)
        assert y[0] == pytest.approx(np.sqrt(1 / 5))

    def test_type_1_fourth_latent_hits_only_last_column(self):
        y = noise_free_sample(1, np.array([0.0, 0.0, 0.0, 1.0]))
        np.testing.assert_array_equal(y[:9], 0.0)
        assert y[9] == pytest.approx(1.0)

    def test_type_1_last_column_mixes_a_trace_of_the_others(self):
        y = noise_free_sample(1, np.ones(4))
        assert y[9] == pytest.approx(1.03)

    def test_type_4_last_latent_hits_only_last_column(self):
        x = np.zeros(15)
        x[14] = 1.0
        y = noise_free_sample(4, x)
        assert y[49] == pytest.approx(1.0)
        np.testing.assert_array_equal(y[:49], 0.0)

    def test_type_3_all_ones_latent(self):
        y = noise_free_sample(3, np.ones(12))
        np.testing.assert_allclose(y[:12], 1.0)
        np.testing.assert_allclose(y[12:], 2 * np.sqrt(0.5))

    def test_type_2_pair_assignment_is_lexicographic(self):
        # First pair column mixes latents 1 and 2, last mixes 6 and 7,
        # and the final variable copies latent 8.
        w = loading_matrix(2)
        np.testing.assert_allclose(np.nonzero(w[0])[0], [0, 1])
        np.testing.assert_allclose(np.nonzero(w[8])[0], [5, 6])
        np.testing.assert_allclose(w[9], np.eye(8)[7])

    def test_rejects_latent_length_mismatch(self):
        with pytest.raises(DataError):
            noise_free_sample(1, np.zeros(5))


class TestAddNoise:
    def test_affine_form(self):
        # Output is exactly (y + e) / sqrt(1 + sigma) with e ~ N(0, sigma).
        y = np.ones(4)
        out = add_noise(y, 0.25, np.random.default_rng(0))
        e = np.random.default_rng(0).normal(0.0, np.sqrt(0.25), 4)
        np.testing.assert_allclose(out, (y + e) / np.sqrt(1.25), atol=1e-12)
        # With the noise draw at zero, a unit signal lands at 1/sqrt(1.25).
        assert 1.0 / np.sqrt(1.25) == pytest.approx(0.89443, abs=1e-5)

    def test_vanishing_noise_limit(self):
        rng = np.random.default_rng(1)
        y = np.linspace(-1, 1, 8)
        out = add_noise(y, 1e-12, rng)
        np.testing.assert_allclose(out, y, atol=1e-5)

    def test_rejects_nonpositive_sigma(self):
        rng = np.random.default_rng(2)
        with pytest.raises(DataError):
            add_noise(np.ones(3), 0.0, rng)
        with pytest.raises(DataError):
            add_noise(np.ones(3), -0.1, rng)

    def test_output_variance_stays_near_one(self):
        # Unit-variance signal plus rescaled noise keeps variance at 1.
        rng = np.random.default_rng(7)
        x = rng.standard_normal((100000, 4))
        noisy = add_noise(x @ loading_matrix(1).T, 0.25, rng)
        var = noisy.var(axis=0)
        assert np.all(var > 0.97) and np.all(var < 1.03)


class TestGenerate:
    def test_output_shape(self):
        spec = DatasetSpec(set_type=1, noise_level=2, n_samples=1024)
        assert generate(spec).values.shape == (1024, 10)

    def test_deterministic_for_same_spec(self):
        spec = DatasetSpec(set_type=1, noise_level=3, repetition=2, seed=42)
        np.testing.assert_array_equal(generate(spec).values, generate(spec).values)

    @pytest.mark.parametrize("other", [
        dict(repetition=3),
        dict(noise_level=4),
        dict(set_type=2),
        dict(seed=43),
    ])
    def test_any_index_change_gives_a_different_draw(self, other):
        base = dict(set_type=1, noise_level=3, repetition=2, seed=42)
        a = generate(DatasetSpec(**base)).values
        b = generate(DatasetSpec(**{**base, **other})).values
        assert not np.array_equal(a, b)

    def test_no_centering_applied(self):
        spec = DatasetSpec(set_type=2, noise_level=1, n_samples=64)
        assert generate(spec).column_mean is None

    def test_cross_column_covariance_matches_loading_structure(self):
        # Columns 46 and 48 of type 4 share one latent with weight
        # sqrt(1/2); the noise rescaling divides covariances by 1 + sigma.
        rng = np.random.default_rng(11)
        x = rng.standard_normal((100000, 15))
        noisy = add_noise(x @ loading_matrix(4).T, 0.05, rng)
        c = np.cov(noisy[:, 45], noisy[:, 47])[0, 1]
        assert c == pytest.approx(np.sqrt(0.5) / 1.05, abs=0.02)

    @pytest.mark.parametrize("set_type", [1, 2, 3, 4])
    def test_sample_covariance_diagonal_matches_analytic(self, set_type):
        rng = np.random.default_rng(100 + set_type)
        x = rng.standard_normal((100000, N_LATENTS[set_type]))
        noisy = add_noise(x @ loading_matrix(set_type).T, 0.25, rng)
        np.testing.assert_allclose(
            noisy.var(axis=0),
            np.diag(population_covariance(set_type, 0.25)),
            atol=0.03,
        )


class TestPopulationCovariance:
    def test_noise_level_shrinks_off_diagonals(self):
        clean = population_covariance(3)
        noisy = population_covariance(3, 0.5)
        off = ~np.eye(27, dtype=bool)
        np.testing.assert_allclose(noisy[off], clean[off] / 1.5, atol=1e-12)

    def test_rejects_negative_sigma(self):
        with pytest.raises(DataError):
            population_covariance(1, -0.05)


def test_noise_variance_table():
    assert NOISE_VARIANCES == {1: 0.05, 2: 0.1, 3: 0.15, 4: 0.2, 5: 0.25, 6: 0.5}
    assert datagen.SET_TYPES == (1, 2, 3, 4)
