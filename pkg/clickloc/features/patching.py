"""Local patch extraction and PCA decorrelation."""

from dataclasses import dataclass
from pathlib import Path
import logging
import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import linalg

from ..data.records import ClickRecord
from ..errors import ConfigError, ShapeError

logger = logging.getLogger(__name__)

# Eigenvalues below this fraction of the largest count as zero variance
RANK_TOL = 1e-10


@dataclass(frozen=True)
class PatchConfig:
    """Patch length p, patch count L and optional PCA dimension p'."""
    p: int = 128
    L: int = 1000
    pca_dims: int | None = None  # None disables PCA
    center: bool = False  # subtract each patch mean before normalizing

    def validate(self, n: int | None = None) -> None:
        """Check the config, optionally against a click length."""
        if self.p < 1:
            raise ConfigError("patch.p", f"must be >= 1, got {self.p}")
        if self.L < 1:
            raise ConfigError("patch.L", f"must be >= 1, got {self.L}")
        if n is not None and self.p > n:
            raise ConfigError("patch.p", f"patch length {self.p} exceeds click length {n}")
        if self.pca_dims is not None and not 1 <= self.pca_dims <= self.p:
            raise ConfigError("patch.pca_dims", f"must lie in [1, p={self.p}], got {self.pca_dims}")

    @property
    def output_dims(self) -> int:
        """Patch dimension after optional projection (p')."""
        return self.pca_dims or self.p


@dataclass(frozen=True, eq=False)
class PatchMatrix:
    """L patches of one click, one per column."""
    columns: np.ndarray
    offsets: np.ndarray
    source_click_id: int = 0

    @property
    def dims(self) -> int:
        return self.columns.shape[0]

    @property
    def count(self) -> int:
        return self.columns.shape[1]


@dataclass(frozen=True, eq=False)
class PcaModel:
    """Mean and top principal directions of a patch sample."""
    mean: np.ndarray
    basis: np.ndarray  # p x p', orthonormal columns
    explained_variance: np.ndarray
    degenerate: bool = False

    @property
    def input_dims(self) -> int:
        return self.basis.shape[0]

    @property
    def output_dims(self) -> int:
        return self.basis.shape[1]

    def save(self, path: Path | str) -> None:
        """Persist as .npz."""
        np.savez(
            path, mean=self.mean, basis=self.basis,
            explained_variance=self.explained_variance, degenerate=np.array(self.degenerate),
        )

    @classmethod
    def load(cls, path: Path | str) -> "PcaModel":
        """Read a model written by save()."""
        with np.load(path) as data:
            return cls(
                mean=data["mean"], basis=data["basis"],
                explained_variance=data["explained_variance"], degenerate=bool(data["degenerate"]),
            )


def patch_offsets(n: int, cfg: PatchConfig) -> np.ndarray:
    """Start offsets min(l * ceil(n/L), n - p) for l = 0..L-1."""
    cfg.validate(n)
    stride = math.ceil(n / cfg.L)
    return np.minimum(np.arange(cfg.L) * stride, n - cfg.p)


def extract_patches(click: ClickRecord, cfg: PatchConfig) -> PatchMatrix:
    """Cut L equally spaced, l2-normalized patches out of a click."""
    offsets = patch_offsets(click.n, cfg)
    windows = sliding_window_view(click.samples, cfg.p)
    columns = windows[offsets].T.copy()

    if cfg.center:
        columns -= columns.mean(axis=0, keepdims=True)

    norms = np.linalg.norm(columns, axis=0)
    nonzero = norms > 0
    columns[:, nonzero] /= norms[nonzero]
    return PatchMatrix(columns=columns, offsets=offsets, source_click_id=click.click_id)


def fit_pca(patches: np.ndarray, p_prime: int) -> PcaModel:
    """Fit the top-p' principal directions of a (p, M) patch sample.

    Each basis column is signed so its largest-magnitude entry is positive.
    A sample of rank below p' still yields p' orthonormal directions, the
    extra ones with zero variance, and the model is flagged degenerate.
    """
    patches = np.asarray(patches, dtype=np.float64)
    if patches.ndim != 2:
        raise ShapeError(f"patch sample must be (p, M), got shape {patches.shape}")
    p, count = patches.shape
    if not 1 <= p_prime <= p:
        raise ConfigError("patch.pca_dims", f"must lie in [1, p={p}], got {p_prime}")
    if count < p_prime:
        raise ConfigError("patch.pca_dims", f"need at least {p_prime} sample patches, got {count}")

    mean = patches.mean(axis=1)
    centered = patches - mean[:, None]
    covariance = centered @ centered.T / max(count - 1, 1)

    eigenvalues, eigenvectors = linalg.eigh(covariance)
    order = np.argsort(eigenvalues)[::-1][:p_prime]
    variance = np.clip(eigenvalues[order], 0.0, None)
    basis = eigenvectors[:, order]

    pivots = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[pivots, np.arange(p_prime)])
    basis = basis * np.where(signs == 0, 1.0, signs)

    # centering round-off leaves ~eps^2 variance on a constant sample; measure against the sample energy too
    energy = float(np.mean(np.sum(patches ** 2, axis=0)))
    reference = max(eigenvalues.max(initial=0.0), np.finfo(float).eps * energy)
    rank = int(np.sum(eigenvalues > RANK_TOL * reference)) if reference > 0 else 0
    degenerate = rank < p_prime
    if degenerate:
        logger.warning("PCA sample has rank %d < p'=%d; padding with zero-variance directions", rank, p_prime)

    return PcaModel(mean=mean, basis=basis, explained_variance=variance, degenerate=degenerate)


def project(patches: PatchMatrix, model: PcaModel) -> PatchMatrix:
    """Replace each column by basis^T (column - mean)."""
    if patches.dims != model.input_dims:
        raise ShapeError(f"patch dimension {patches.dims} does not match PCA input {model.input_dims}")
    columns = model.basis.T @ (patches.columns - model.mean[:, None])
    return PatchMatrix(columns=columns, offsets=patches.offsets, source_click_id=patches.source_click_id)
