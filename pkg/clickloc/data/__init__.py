"""Click datasets: ingestion, synthesis and artifact caches."""

from .records import ClickRecord, ClickDataset
from .io import load_clicks, save_clicks
from .synthetic import SyntheticConfig, generate_synthetic
from .cache import save_features, load_features

__all__ = [
    "ClickRecord",
    "ClickDataset",
    "load_clicks",
    "save_clicks",
    "SyntheticConfig",
    "generate_synthetic",
    "save_features",
    "load_features",
]
