"""Pipeline stages behind the command-line subcommands."""

from dataclasses import replace
from pathlib import Path
from typing import Sequence
import logging

import numpy as np
from rich.console import Console

from .coding.extract import FeatureExtractor, encode_dataset, fit_extractor
from .coding.store import load_dictionary, save_dictionary
from .config import PipelineConfig
from .data.cache import load_features, load_index, save_features
from .data.io import format_for_path, load_clicks, save_clicks
from .data.records import ClickDataset
from .data.synthetic import generate_synthetic
from .errors import ConfigError
from .eval.experiment import evaluate_features, sweep
from .eval.report import write_report_csv, write_sweep_csv
from .eval.splits import make_splits
from .features.patching import PcaModel
from .regress.model import TARGETS, fit_target
from .regress.store import save_model
from .seeding import derive_seed
from .ui.console import render_report, render_sweep

logger = logging.getLogger(__name__)

REPORT_NAME = "report.csv"


def pca_path(dictionary_path: Path | str) -> Path:
    """PCA model stored next to its dictionary."""
    path = Path(dictionary_path)
    return path.with_name(path.name + ".pca.npz")


def load_dataset(cfg: PipelineConfig, path: Path | str) -> ClickDataset:
    """Read clicks in the configured (or inferred) format."""
    fmt = format_for_path(path) if cfg.data.format == "auto" else cfg.data.format
    return load_clicks(path, fmt, n=cfg.data.n or cfg.synthetic.n, azimuth_unit=cfg.data.azimuth_unit)


def synthesize(cfg: PipelineConfig, count: int | None = None) -> ClickDataset:
    """Synthetic clicks seeded from the root seed."""
    synthetic = replace(cfg.synthetic, rng_seed=derive_seed(cfg.seed, "synthetic"))
    return generate_synthetic(synthetic, count or cfg.data.count)


def cmd_gen(
    cfg: PipelineConfig,
    count: int | None = None,
    out_path: Path | str | None = None,
    format: str | None = None,
) -> Path:
    """Generate synthetic clicks and write them as CSV or binary."""
    out = Path(out_path or cfg.paths.clicks)
    fmt = format or format_for_path(out)
    if fmt not in ("csv", "binary"):
        raise ConfigError("format", f"gen writes 'csv' or 'binary', got {fmt!r}")
    save_clicks(synthesize(cfg, count), out, fmt)
    return out


def cmd_train_dict(
    cfg: PipelineConfig,
    clicks_path: Path | str | None = None,
    dict_out: Path | str | None = None,
) -> Path:
    """Fit PCA and learn the dictionary on every click."""
    dataset = load_dataset(cfg, clicks_path or cfg.paths.clicks)
    cfg.validate(dataset.n)
    extractor, state = fit_extractor(
        dataset, cfg.patch, cfg.learner, cfg.encoder, cfg.pooling.pyramid,
        seed=cfg.seed, n_jobs=cfg.n_jobs, stage="dictionary",
    )
    if state.rejected_passes:
        logger.warning("%d of %d learning passes were rolled back", state.rejected_passes, state.iterations)

    out = Path(dict_out or cfg.paths.dictionary)
    save_dictionary(extractor.dictionary, out)
    if extractor.pca is not None:
        extractor.pca.save(pca_path(out))
    elif pca_path(out).exists():
        pca_path(out).unlink()
    return out


def cmd_encode(
    cfg: PipelineConfig,
    clicks_path: Path | str | None = None,
    dict_path: Path | str | None = None,
    features_out: Path | str | None = None,
) -> Path:
    """Encode and pool every click into the feature cache."""
    dataset = load_dataset(cfg, clicks_path or cfg.paths.clicks)
    cfg.validate(dataset.n)
    dict_path = Path(dict_path or cfg.paths.dictionary)
    pca = PcaModel.load(pca_path(dict_path)) if cfg.patch.pca_dims is not None else None
    extractor = FeatureExtractor(cfg.patch, load_dictionary(dict_path), cfg.encoder, cfg.pooling.pyramid, pca)

    mu = cfg.pooling.mu
    features = encode_dataset(dataset, extractor, [mu], n_jobs=cfg.n_jobs)[mu]
    labels = np.column_stack([dataset.ranges(), dataset.azimuths()])

    out = Path(features_out or cfg.paths.features)
    save_features(features, labels, out, click_ids=dataset.click_ids(), hydrophone_ids=dataset.hydrophone_ids())
    return out


def cmd_train_eval(
    cfg: PipelineConfig,
    features_path: Path | str | None = None,
    output_dir: Path | str | None = None,
    console: Console | None = None,
) -> Path:
    """Cross-validate the regressors, then train final models on all rows."""
    cfg.validate()
    features_path = Path(features_path or cfg.paths.features)
    features, labels = load_features(features_path)
    _, hydrophones = load_index(features_path, features.shape[0])

    splits = make_splits(features.shape[0], cfg.eval.K, cfg.eval.train_fraction, cfg.seed, groups=hydrophones)
    result = evaluate_features(
        features, labels[:, 0], labels[:, 1], hydrophones, splits, cfg.regress,
        seed=cfg.seed, scope=cfg.eval.scope, n_jobs=cfg.n_jobs, config=cfg.to_dict(),
    )

    out_dir = Path(output_dir or cfg.paths.output_dir)
    report = write_report_csv(out_dir / REPORT_NAME, [(None, result)])
    for column, target in enumerate(TARGETS):
        seed = derive_seed(cfg.seed, f"final/model-selection/{target}")
        save_model(fit_target(features, labels[:, column], cfg.regress, target, seed), out_dir / f"{target}.ccm")

    if console is not None:
        render_report(console, result, cfg.eval.armse_mode)
    return report


def cmd_sweep(
    cfg: PipelineConfig,
    axis: str,
    values: Sequence[float],
    clicks_path: Path | str | None = None,
    output_dir: Path | str | None = None,
    console: Console | None = None,
) -> Path:
    """Run the strict protocol once per value; write summary and detailed CSVs."""
    clicks = Path(clicks_path or cfg.paths.clicks)
    if clicks.exists():
        dataset = load_dataset(cfg, clicks)
    else:
        logger.info("%s not found; sweeping over %d synthetic clicks", clicks, cfg.data.count)
        dataset = synthesize(cfg)

    points = sweep(dataset, cfg, axis, values, n_jobs=cfg.n_jobs)

    out_dir = Path(output_dir or cfg.paths.output_dir)
    summary = write_sweep_csv(out_dir / f"sweep_{axis}.csv", points, cfg.eval.armse_mode)
    write_report_csv(out_dir / f"sweep_{axis}_{REPORT_NAME}", [(p.value, p.result) for p in points])
    if console is not None:
        render_sweep(console, axis, points, cfg.eval.armse_mode)
    return summary


def cmd_pipeline(cfg: PipelineConfig, console: Console | None = None) -> Path:
    """gen, train-dict, encode and train-eval with the configured paths."""
    cfg.validate(cfg.synthetic.n)
    cmd_gen(cfg)
    cmd_train_dict(cfg)
    cmd_encode(cfg)
    return cmd_train_eval(cfg, console=console)
