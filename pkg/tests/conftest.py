"""Shared fixtures: small synthetic datasets and a desk-scale pipeline config."""

import numpy as np
import pytest

from clickloc.coding.base import EncoderConfig
from clickloc.coding.learning import LearnerConfig
from clickloc.config import DataConfig, PipelineConfig
from clickloc.data.synthetic import SyntheticConfig, generate_synthetic
from clickloc.eval.experiment import EvalConfig
from clickloc.features.patching import PatchConfig
from clickloc.regress.model import TrainConfig


def tiny_config(**overrides) -> PipelineConfig:
    """A pipeline config that runs in seconds."""
    values = dict(
        seed=7,
        data=DataConfig(count=30),
        synthetic=SyntheticConfig(n=256, noise_std=0.001, hydrophone_count=2),
        patch=PatchConfig(p=32, L=24),
        encoder=EncoderConfig(lam=0.1),
        learner=LearnerConfig(k=8, iterations=2, batch_size=64, sample_size=300, validation_size=64),
        regress=TrainConfig(select_C=False),
        eval=EvalConfig(K=2),
    )
    values.update(overrides)
    return PipelineConfig(**values)


@pytest.fixture
def small_clicks():
    """24 short synthetic clicks over 2 hydrophones."""
    return generate_synthetic(SyntheticConfig(n=256, noise_std=0.001, rng_seed=3, hydrophone_count=2), 24)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def make_config():
    """Factory for tiny pipeline configs; keyword arguments replace sections."""
    return tiny_config
