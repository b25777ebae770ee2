"""Sparse coding of local patches and dictionary learning."""

from .base import Dictionary, SparseCode, SparseCodeSet, EncoderConfig, SparseEncoder, ENCODERS, make_encoder
from .encoders import encode_ols, encode_ridge, encode_lasso, encode_omp, encode_batch, lars_lasso_path
from .learning import (
    LearnerConfig,
    LearnerState,
    OnlineDictionaryLearner,
    init_dictionary,
    learn_dictionary,
    replace_dead_atoms,
    objective,
)
from .store import save_dictionary, load_dictionary
from .extract import FeatureExtractor, encode_dataset, sample_patches, fit_extractor

__all__ = [
    "Dictionary",
    "SparseCode",
    "SparseCodeSet",
    "EncoderConfig",
    "SparseEncoder",
    "ENCODERS",
    "make_encoder",
    "encode_ols",
    "encode_ridge",
    "encode_lasso",
    "encode_omp",
    "encode_batch",
    "lars_lasso_path",
    "LearnerConfig",
    "LearnerState",
    "OnlineDictionaryLearner",
    "init_dictionary",
    "learn_dictionary",
    "replace_dead_atoms",
    "objective",
    "save_dictionary",
    "load_dictionary",
    "FeatureExtractor",
    "encode_dataset",
    "sample_patches",
    "fit_extractor",
]
