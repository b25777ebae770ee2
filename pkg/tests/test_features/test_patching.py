"""Tests for patch extraction and PCA."""

import numpy as np
import pytest

from clickloc.data.records import ClickRecord
from clickloc.errors import ConfigError, ShapeError
from clickloc.features.patching import (
    PatchConfig,
    PatchMatrix,
    PcaModel,
    extract_patches,
    fit_pca,
    patch_offsets,
    project,
)


class TestPatchOffsets:
    """Tests for patch_offsets."""

    def test_full_scale_grid(self):
        """Test n=2000, L=1000, p=128 gives stride 2 clipped at n-p."""
        offsets = patch_offsets(2000, PatchConfig(p=128, L=1000))
        assert offsets.shape == (1000,)
        assert offsets[0] == 0
        assert offsets[1] == 2
        assert offsets[936] == 1872
        assert np.all(offsets[936:] == 1872)
        assert offsets.max() == 2000 - 128

    def test_single_patch(self):
        """Test L=1 gives one patch at offset 0."""
        np.testing.assert_array_equal(patch_offsets(50, PatchConfig(p=10, L=1)), [0])

    def test_clipped_tail(self):
        """Test n=10, p=4, L=4 gives offsets 0, 3, 6, 6."""
        np.testing.assert_array_equal(patch_offsets(10, PatchConfig(p=4, L=4)), [0, 3, 6, 6])

    @pytest.mark.parametrize("n, p, L", [(10, 4, 4), (2000, 128, 1000), (97, 13, 40), (50, 50, 7), (33, 1, 100)])
    def test_sorted_and_in_range(self, n, p, L):
        """Test offsets are non-decreasing and lie in [0, n - p]."""
        offsets = patch_offsets(n, PatchConfig(p=p, L=L))
        assert offsets.shape == (L,)
        assert np.all(np.diff(offsets) >= 0)
        assert offsets.min() >= 0
        assert offsets.max() <= n - p

    def test_patch_longer_than_click(self):
        """Test p > n is a config error."""
        with pytest.raises(ConfigError) as info:
            patch_offsets(16, PatchConfig(p=32, L=4))
        assert info.value.field == "patch.p"


class TestExtractPatches:
    """Tests for extract_patches."""

    def test_unit_norm_columns(self, rng):
        """Test every nonzero patch has unit l2 norm."""
        click = ClickRecord(rng.normal(size=300), 10.0, 0.0, click_id=4)
        patches = extract_patches(click, PatchConfig(p=20, L=30))
        assert patches.columns.shape == (20, 30)
        assert patches.source_click_id == 4
        np.testing.assert_allclose(np.linalg.norm(patches.columns, axis=0), 1.0)

    def test_content_matches_offsets(self, rng):
        """Test column l is the normalized window at offset l."""
        samples = rng.normal(size=100)
        patches = extract_patches(ClickRecord(samples, 10.0, 0.0), PatchConfig(p=8, L=5))
        for col, offset in enumerate(patches.offsets):
            window = samples[offset:offset + 8]
            np.testing.assert_allclose(patches.columns[:, col], window / np.linalg.norm(window))

    def test_zero_patch_stays_zero(self):
        """Test a silent window is left as zeros."""
        samples = np.zeros(40)
        samples[30:] = 1.0
        patches = extract_patches(ClickRecord(samples, 10.0, 0.0), PatchConfig(p=10, L=4))
        assert not np.any(patches.columns[:, 0])
        assert np.all(np.isfinite(patches.columns))

    def test_centering(self, rng):
        """Test center=True removes each patch mean."""
        click = ClickRecord(rng.normal(size=200) + 3.0, 10.0, 0.0)
        patches = extract_patches(click, PatchConfig(p=16, L=10, center=True))
        np.testing.assert_allclose(patches.columns.mean(axis=0), 0.0, atol=1e-12)


class TestPca:
    """Tests for fit_pca and project."""

    def _sample(self, rng):
        # energy concentrated on the first two coordinates
        scales = np.array([5.0, 2.0, 0.1, 0.1, 0.1, 0.1])
        return rng.normal(size=(6, 500)) * scales[:, None]

    def test_orthonormal_basis(self, rng):
        """Test the basis columns are orthonormal and sorted by variance."""
        model = fit_pca(self._sample(rng), 3)
        np.testing.assert_allclose(model.basis.T @ model.basis, np.eye(3), atol=1e-10)
        assert np.all(np.diff(model.explained_variance) <= 0)
        assert not model.degenerate

    def test_leading_directions(self, rng):
        """Test the top two directions recover the dominant axes."""
        model = fit_pca(self._sample(rng), 2)
        assert abs(model.basis[0, 0]) > 0.99
        assert abs(model.basis[1, 1]) > 0.99

    def test_sign_convention(self, rng):
        """Test each column's largest-magnitude entry is positive."""
        model = fit_pca(self._sample(rng), 4)
        pivots = np.argmax(np.abs(model.basis), axis=0)
        assert np.all(model.basis[pivots, np.arange(4)] > 0)

    def test_rank_deficient_sample(self, rng):
        """Test a rank-1 sample still yields p' directions and is flagged."""
        direction = rng.normal(size=5)
        sample = np.outer(direction, rng.normal(size=40))
        model = fit_pca(sample, 3)
        assert model.degenerate
        assert model.basis.shape == (5, 3)
        np.testing.assert_allclose(model.basis.T @ model.basis, np.eye(3), atol=1e-10)

    def test_rank_two_reconstruction(self, rng):
        """Test data from a 2-D subspace of R^8 reconstructs exactly from p'=2."""
        plane, _ = np.linalg.qr(rng.normal(size=(8, 2)))
        offset = rng.normal(size=8)
        sample = offset[:, None] + plane @ rng.normal(size=(2, 300))
        model = fit_pca(sample, 2)
        assert not model.degenerate

        projected = project(PatchMatrix(sample, np.arange(300)), model)
        assert projected.columns.shape == (2, 300)
        rebuilt = model.mean[:, None] + model.basis @ projected.columns
        assert np.abs(rebuilt - sample).max() < 1e-10

        full = fit_pca(sample, 4)
        assert full.degenerate
        np.testing.assert_allclose(full.explained_variance[2:], 0.0, atol=1e-10)

    def test_full_dimension_is_isometry(self, rng):
        """Test p'=p on zero-mean data preserves norms and pairwise distances."""
        sample = rng.normal(size=(6, 200))
        sample -= sample.mean(axis=1, keepdims=True)
        model = fit_pca(sample, 6)
        projected = project(PatchMatrix(sample, np.arange(200)), model).columns
        np.testing.assert_allclose(np.linalg.norm(projected, axis=0), np.linalg.norm(sample, axis=0), atol=1e-10)
        np.testing.assert_allclose(
            np.linalg.norm(projected[:, :100] - projected[:, 100:], axis=0),
            np.linalg.norm(sample[:, :100] - sample[:, 100:], axis=0),
            atol=1e-10,
        )

    def test_identity_model(self, rng):
        """Test a zero-mean identity basis returns its input."""
        model = PcaModel(mean=np.zeros(5), basis=np.eye(5), explained_variance=np.ones(5))
        patches = PatchMatrix(rng.normal(size=(5, 12)), np.arange(12), source_click_id=3)
        projected = project(patches, model)
        np.testing.assert_array_equal(projected.columns, patches.columns)
        assert projected.source_click_id == 3

    def test_repeated_patch(self, rng):
        """Test a sample of one repeated patch has no variance and is flagged."""
        patch = rng.normal(size=7)
        patch /= np.linalg.norm(patch)
        model = fit_pca(np.tile(patch[:, None], (1, 50)), 3)
        assert model.degenerate
        np.testing.assert_allclose(model.explained_variance, 0.0, atol=1e-20)
        np.testing.assert_allclose(model.mean, patch, atol=1e-15)
        np.testing.assert_allclose(model.basis.T @ model.basis, np.eye(3), atol=1e-10)

    def test_too_few_patches(self, rng):
        """Test fewer sample patches than p' is rejected."""
        with pytest.raises(ConfigError):
            fit_pca(rng.normal(size=(6, 2)), 3)

    def test_project(self, rng):
        """Test projection shape and centering on the fitted mean."""
        click = ClickRecord(rng.normal(size=120), 10.0, 0.0)
        patches = extract_patches(click, PatchConfig(p=6, L=10))
        model = fit_pca(patches.columns, 3)
        projected = project(patches, model)
        assert projected.columns.shape == (3, 10)
        np.testing.assert_allclose(projected.columns.mean(axis=1), 0.0, atol=1e-12)
        np.testing.assert_array_equal(projected.offsets, patches.offsets)

    def test_project_dimension_mismatch(self, rng):
        """Test projecting patches of another p raises a shape error."""
        model = fit_pca(rng.normal(size=(6, 20)), 2)
        patches = extract_patches(ClickRecord(rng.normal(size=50), 1.0, 0.0), PatchConfig(p=5, L=3))
        with pytest.raises(ShapeError):
            project(patches, model)

    def test_save_load(self, tmp_path, rng):
        """Test a saved model reloads unchanged."""
        model = fit_pca(self._sample(rng), 2)
        path = tmp_path / "pca.npz"
        model.save(path)
        loaded = PcaModel.load(path)
        np.testing.assert_array_equal(loaded.basis, model.basis)
        np.testing.assert_array_equal(loaded.mean, model.mean)
        assert loaded.degenerate == model.degenerate


@pytest.mark.parametrize("kwargs, field", [
    ({"p": 0}, "patch.p"),
    ({"L": 0}, "patch.L"),
    ({"p": 8, "pca_dims": 9}, "patch.pca_dims"),
])
def test_invalid_config(kwargs, field):
    """Test invalid patch settings name their field."""
    with pytest.raises(ConfigError) as info:
        PatchConfig(**kwargs).validate()
    assert info.value.field == field
