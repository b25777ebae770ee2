"""Click-level feature extraction: patches, PCA, codes and pooled features."""

from dataclasses import dataclass
from typing import Sequence
import logging

import numpy as np
from joblib import Parallel, delayed

from ..data.records import ClickDataset, ClickRecord
from ..errors import ConfigError, ShapeError
from ..features.patching import PatchConfig, PcaModel, extract_patches, fit_pca, project
from ..features.pooling import GlobalFeature, PyramidSpec, pool_click
from ..seeding import derive_seed
from .base import Dictionary, EncoderConfig, make_encoder
from .learning import LearnerConfig, LearnerState, OnlineDictionaryLearner

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FeatureExtractor:
    """Everything needed to turn a click into a global feature."""
    patch: PatchConfig
    dictionary: Dictionary
    encoder: EncoderConfig
    pyramid: PyramidSpec
    pca: PcaModel | None = None

    def __post_init__(self) -> None:
        dims = self.pca.output_dims if self.pca is not None else self.patch.p
        if self.pca is not None and self.pca.input_dims != self.patch.p:
            raise ShapeError(f"PCA expects {self.pca.input_dims}-sample patches, patch.p is {self.patch.p}")
        if dims != self.dictionary.p:
            raise ShapeError(f"dictionary atoms have dimension {self.dictionary.p}, patches have {dims}")

    @property
    def feature_dims(self) -> int:
        """d = D * k."""
        return self.pyramid.feature_dims(self.dictionary.k)

    def features(self, click: ClickRecord, mus: Sequence[float]) -> list[GlobalFeature]:
        """Pooled features of one click, one per pooling exponent."""
        encoder = make_encoder(self.encoder)
        patches = extract_patches(click, self.patch)
        if self.pca is not None:
            patches = project(patches, self.pca)
        codes, _ = encoder.encode_matrix(patches.columns, self.dictionary)
        return [pool_click(codes, patches.offsets, click.n, self.pyramid, mu, click.click_id) for mu in mus]

    def _features_chunk(self, clicks: Sequence[ClickRecord], mus: Sequence[float]) -> np.ndarray:
        rows = np.zeros((len(mus), len(clicks), self.feature_dims))
        for i, click in enumerate(clicks):
            for m, feature in enumerate(self.features(click, mus)):
                rows[m, i] = feature.values
        return rows


def encode_dataset(
    dataset: ClickDataset,
    extractor: FeatureExtractor,
    mus: Sequence[float],
    n_jobs: int = 1,
) -> dict[float, np.ndarray]:
    """Global features of every click, as an (N, d) matrix per pooling exponent.

    Clicks are encoded once and pooled for every mu, so a mu sweep shares the
    sparse codes. Rows follow dataset order regardless of n_jobs.
    """
    mus = list(mus)
    if not mus:
        raise ConfigError("pooling.mu", "need at least one pooling exponent")
    clicks = list(dataset)
    if not clicks:
        return {mu: np.zeros((0, extractor.feature_dims)) for mu in mus}

    if n_jobs == 1:
        stacked = extractor._features_chunk(clicks, mus)
    else:
        chunks = [chunk for chunk in np.array_split(np.arange(len(clicks)), min(len(clicks), 64)) if chunk.size]
        parts = Parallel(n_jobs=n_jobs)(
            delayed(extractor._features_chunk)([clicks[i] for i in chunk], mus) for chunk in chunks
        )
        stacked = np.concatenate(parts, axis=1)

    logger.info("Encoded %d clicks into d=%d features for mu=%s", len(clicks), extractor.feature_dims, mus)
    return {mu: stacked[m] for m, mu in enumerate(mus)}


def sample_patches(
    dataset: ClickDataset,
    cfg: PatchConfig,
    count: int,
    seed: int,
    indices: Sequence[int] | None = None,
) -> np.ndarray:
    """Draw up to `count` nonzero (click, patch) pairs as a (p, M) matrix.

    Pairs are drawn uniformly without replacement from the clicks in
    `indices` (all clicks by default), in ascending pair order.
    """
    indices = np.arange(len(dataset)) if indices is None else np.asarray(indices)
    if indices.size == 0:
        raise ShapeError("no clicks to sample patches from")

    total = indices.size * cfg.L
    pairs = np.sort(np.random.default_rng(seed).choice(total, size=min(count, total), replace=False))
    clicks, columns = np.divmod(pairs, cfg.L)

    blocks = []
    for position in np.unique(clicks):
        patches = extract_patches(dataset[int(indices[position])], cfg)
        blocks.append(patches.columns[:, columns[clicks == position]])
    sample = np.concatenate(blocks, axis=1)

    drawn = sample.shape[1]
    sample = sample[:, np.linalg.norm(sample, axis=0) > 0]
    if sample.shape[1] < drawn:
        logger.debug("Dropped %d all-zero patches of %d drawn", drawn - sample.shape[1], drawn)
    return sample


def fit_extractor(
    dataset: ClickDataset,
    patch: PatchConfig,
    learner: LearnerConfig,
    encoder: EncoderConfig,
    pyramid: PyramidSpec,
    seed: int,
    n_jobs: int = 1,
    indices: Sequence[int] | None = None,
    stage: str = "dictionary",
) -> tuple[FeatureExtractor, LearnerState]:
    """Fit PCA and learn the dictionary from the clicks in `indices`.

    Only the selected clicks are read, so a held-out set cannot leak into
    the extractor. The dictionary is learnt with the encoder's lambda.
    """
    patch.validate(dataset.n)
    learner.validate()
    encoder.validate()

    sample = sample_patches(dataset, patch, learner.sample_size, derive_seed(seed, f"{stage}/sample"), indices)
    logger.info("Sampled %d training patches of p=%d", sample.shape[1], patch.p)

    pca = None
    if patch.pca_dims is not None:
        pca = fit_pca(sample, patch.pca_dims)
        sample = pca.basis.T @ (sample - pca.mean[:, None])

    online = OnlineDictionaryLearner(
        learner.k,
        lam=encoder.lam,
        iterations=learner.iterations,
        batch_size=learner.batch_size,
        seed=derive_seed(seed, stage),
        n_jobs=n_jobs,
        validation_size=learner.validation_size,
        lars_max_steps=encoder.lars_max_steps,
    )
    dictionary = online.fit(sample)
    return FeatureExtractor(patch, dictionary, encoder, pyramid, pca), online.state
