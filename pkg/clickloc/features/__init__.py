"""Local patches and pooled global features."""

from .patching import PatchConfig, PatchMatrix, PcaModel, extract_patches, fit_pca, project, patch_offsets
from .pooling import PoolingConfig, PyramidSpec, GlobalFeature, LAMBDA_1, LAMBDA_2, pool_lmu, compute_rois, pool_click

__all__ = [
    "PatchConfig",
    "PatchMatrix",
    "PcaModel",
    "extract_patches",
    "fit_pca",
    "project",
    "patch_offsets",
    "PoolingConfig",
    "PyramidSpec",
    "GlobalFeature",
    "LAMBDA_1",
    "LAMBDA_2",
    "pool_lmu",
    "compute_rois",
    "pool_click",
]
