"""Cross-validated experiments: per-round training, baselines and sweeps."""

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Literal, Sequence
import logging

import numpy as np
from joblib import Parallel, delayed

from ..coding.extract import FeatureExtractor, encode_dataset, fit_extractor
from ..coding.learning import LearnerState
from ..data.records import ClickDataset
from ..errors import ConfigError, ShapeError
from ..regress.model import TARGETS, LinearModel, TrainConfig, fit_target, predict
from ..seeding import derive_seed
from .metrics import ARMSE_MODES, ArmseMode, EvalReport, build_report
from .splits import Split, SplitPlan, make_splits

if TYPE_CHECKING:
    from ..config import PipelineConfig

logger = logging.getLogger(__name__)

Scope = Literal["pooled", "per_hydrophone"]
SweepAxis = Literal["mu", "k"]
BASELINE_SUFFIX = "_baseline"


@dataclass(frozen=True)
class EvalConfig:
    """Split protocol and metric settings."""
    K: int = 10
    train_fraction: float = 0.7
    armse_mode: ArmseMode = "normalized"
    scope: Scope = "pooled"

    def validate(self) -> None:
        if self.K < 1:
            raise ConfigError("eval.K", f"must be >= 1, got {self.K}")
        if not 0 < self.train_fraction < 1:
            raise ConfigError("eval.train_fraction", f"must lie in (0, 1), got {self.train_fraction}")
        if self.armse_mode not in ARMSE_MODES:
            raise ConfigError("eval.armse_mode", f"unknown mode {self.armse_mode!r}, choose from {list(ARMSE_MODES)}")
        if self.scope not in ("pooled", "per_hydrophone"):
            raise ConfigError("eval.scope", f"must be 'pooled' or 'per_hydrophone', got {self.scope!r}")


@dataclass(frozen=True, eq=False)
class RoundResult:
    """Models and test-set estimates of one round."""
    index: int
    split: Split
    estimates: dict[str, np.ndarray]  # target (and its baseline) -> estimates on split.test
    models: dict[str, LinearModel]  # pooled model per target
    extractor: FeatureExtractor | None = None
    learner: LearnerState | None = None


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    """All rounds of one configuration."""
    rounds: tuple[RoundResult, ...]
    truth: dict[str, np.ndarray]
    hydrophones: np.ndarray
    feature_dims: int
    seed: int
    config: dict = field(default_factory=dict, repr=False)

    @property
    def hydrophone_ids(self) -> tuple[int, ...]:
        return tuple(int(h) for h in np.unique(self.hydrophones))

    @property
    def targets(self) -> list[str]:
        """Report targets: each regressed target followed by its baseline."""
        return [name for target in TARGETS for name in (target, target + BASELINE_SUFFIX)]

    def report(self, target: str, mode: ArmseMode = "normalized") -> EvalReport:
        """ARMSE report of a target or of a '<target>_baseline'."""
        truth_key = target.removesuffix(BASELINE_SUFFIX)
        if truth_key not in self.truth:
            raise ConfigError("target", f"unknown target {target!r}")
        return build_report(
            target,
            [self.truth[truth_key][r.split.test] for r in self.rounds],
            [r.estimates[target] for r in self.rounds],
            [self.hydrophones[r.split.test] for r in self.rounds],
            self.hydrophone_ids,
            mode=mode,
            config=self.config,
        )

    def reports(self, modes: Sequence[ArmseMode] = ARMSE_MODES) -> list[EvalReport]:
        """Every (target, mode) report, targets first."""
        return [self.report(target, mode) for target in self.targets for mode in modes]


def _fit_scoped(
    X: np.ndarray,
    y: np.ndarray,
    hydrophones: np.ndarray,
    split: Split,
    cfg: TrainConfig,
    scope: Scope,
    target: str,
    seed: int,
) -> tuple[LinearModel, np.ndarray]:
    """Pooled model plus test estimates, per hydrophone when scoped so."""
    model = fit_target(X[split.train], y[split.train], cfg, target, seed)
    estimates = predict(model, X[split.test])
    if scope == "pooled":
        return model, estimates

    train_labels = hydrophones[split.train]
    test_labels = hydrophones[split.test]
    for h in np.unique(test_labels):
        rows = split.train[train_labels == h]
        if rows.size < 2:
            logger.debug("hydrophone %d has %d training clicks; using the pooled %s model", h, rows.size, target)
            continue
        local = fit_target(X[rows], y[rows], cfg, target, derive_seed(seed, f"hydrophone-{h}"))
        estimates[test_labels == h] = predict(local, X[split.test[test_labels == h]])
    return model, estimates


def evaluate_round(
    X: np.ndarray,
    truth: dict[str, np.ndarray],
    hydrophones: np.ndarray,
    split: Split,
    index: int,
    regress: TrainConfig,
    scope: Scope,
    seed: int,
) -> RoundResult:
    """Train both targets on split.train and estimate split.test."""
    estimates, models = {}, {}
    for target in TARGETS:
        y = truth[target]
        round_seed = derive_seed(seed, f"round-{index}/model-selection/{target}")
        models[target], estimates[target] = _fit_scoped(X, y, hydrophones, split, regress, scope, target, round_seed)
        estimates[target + BASELINE_SUFFIX] = np.full(split.test.size, y[split.train].mean())
    return RoundResult(index=index, split=split, estimates=estimates, models=models)


def evaluate_features(
    X: np.ndarray,
    y_range: np.ndarray,
    y_azimuth: np.ndarray,
    hydrophones: np.ndarray,
    splits: SplitPlan,
    regress: TrainConfig,
    seed: int = 0,
    scope: Scope = "pooled",
    n_jobs: int = 1,
    config: dict | None = None,
) -> ExperimentResult:
    """Regression-only protocol over a fixed (N, d) feature matrix."""
    X = np.asarray(X, dtype=np.float64)
    hydrophones = np.asarray(hydrophones)
    truth = {"range": np.asarray(y_range, dtype=np.float64), "azimuth": np.asarray(y_azimuth, dtype=np.float64)}
    if X.ndim != 2 or any(y.shape != (X.shape[0],) for y in truth.values()) or hydrophones.shape != (X.shape[0],):
        raise ShapeError(f"features {X.shape}, targets and hydrophone labels must share N rows")
    if splits.N != X.shape[0]:
        raise ShapeError(f"split plan covers {splits.N} clicks, features have {X.shape[0]}")

    rounds = Parallel(n_jobs=n_jobs)(
        delayed(evaluate_round)(X, truth, hydrophones, split, i, regress, scope, seed)
        for i, split in enumerate(splits)
    )
    return ExperimentResult(
        rounds=tuple(rounds), truth=truth, hydrophones=hydrophones,
        feature_dims=X.shape[1], seed=seed, config=config or {},
    )


def _run_round(
    dataset: ClickDataset,
    cfg: "PipelineConfig",
    split: Split,
    index: int,
    mus: Sequence[float],
    n_jobs: int,
) -> list[RoundResult]:
    """Fit the extractor on the training clicks, then evaluate each mu."""
    extractor, learner = fit_extractor(
        dataset, cfg.patch, cfg.learner, cfg.encoder, cfg.pooling.pyramid,
        seed=cfg.seed, n_jobs=n_jobs, indices=split.train, stage=f"round-{index}/dictionary",
    )
    features = encode_dataset(dataset, extractor, mus, n_jobs=n_jobs)
    truth = {target: dataset.targets(target) for target in TARGETS}
    hydrophones = dataset.hydrophone_ids()

    results = []
    for mu in mus:
        evaluated = evaluate_round(features[mu], truth, hydrophones, split, index, cfg.regress, cfg.eval.scope, cfg.seed)
        results.append(replace(evaluated, extractor=extractor, learner=learner))
    logger.info("round %d done: %d train / %d test clicks", index + 1, split.train.size, split.test.size)
    return results


def run_experiment_over_mu(
    dataset: ClickDataset,
    cfg: "PipelineConfig",
    mus: Sequence[float],
    splits: SplitPlan | None = None,
    n_jobs: int = 1,
) -> dict[float, ExperimentResult]:
    """Strict protocol for several pooling exponents sharing each round's codes.

    PCA and the dictionary are refit on the training clicks of every round,
    so no test click influences any model. Rounds run in parallel when
    n_jobs allows; results keep round order.
    """
    cfg.validate(dataset.n)
    mus = list(mus)
    splits = splits or make_splits(
        len(dataset), cfg.eval.K, cfg.eval.train_fraction, cfg.seed, groups=dataset.hydrophone_ids()
    )
    if splits.N != len(dataset):
        raise ShapeError(f"split plan covers {splits.N} clicks, dataset has {len(dataset)}")

    if n_jobs != 1 and len(splits) > 1:
        per_round = Parallel(n_jobs=n_jobs)(
            delayed(_run_round)(dataset, cfg, split, i, mus, 1) for i, split in enumerate(splits)
        )
    else:
        per_round = [_run_round(dataset, cfg, split, i, mus, n_jobs) for i, split in enumerate(splits)]

    truth = {target: dataset.targets(target) for target in TARGETS}
    feature_dims = cfg.pooling.pyramid.feature_dims(cfg.learner.k)
    results = {}
    for m, mu in enumerate(mus):
        snapshot = cfg.with_mu(mu).to_dict()
        results[mu] = ExperimentResult(
            rounds=tuple(rounds[m] for rounds in per_round), truth=truth, hydrophones=dataset.hydrophone_ids(),
            feature_dims=feature_dims, seed=cfg.seed, config=snapshot,
        )
    return results


def run_experiment(
    dataset: ClickDataset,
    cfg: "PipelineConfig",
    splits: SplitPlan | None = None,
    n_jobs: int = 1,
) -> ExperimentResult:
    """Strict protocol at cfg.pooling.mu."""
    return run_experiment_over_mu(dataset, cfg, [cfg.pooling.mu], splits, n_jobs)[cfg.pooling.mu]


@dataclass(frozen=True, eq=False)
class SweepPoint:
    """One value of the swept axis and its experiment."""
    value: float
    result: ExperimentResult


def sweep(
    dataset: ClickDataset,
    cfg: "PipelineConfig",
    axis: SweepAxis,
    values: Sequence[float],
    splits: SplitPlan | None = None,
    n_jobs: int = 1,
) -> list[SweepPoint]:
    """One experiment per axis value, all on the same split plan.

    A mu sweep shares each round's dictionary and codes across values;
    the dictionary does not depend on mu, so this equals separate runs.
    """
    if axis not in ("mu", "k"):
        raise ConfigError("sweep.axis", f"must be 'mu' or 'k', got {axis!r}")
    values = list(values)
    if not values:
        return []
    if axis == "mu":
        for value in values:
            cfg.with_mu(float(value)).pooling.validate()
    cfg.validate(dataset.n)
    splits = splits or make_splits(
        len(dataset), cfg.eval.K, cfg.eval.train_fraction, cfg.seed, groups=dataset.hydrophone_ids()
    )

    if axis == "mu":
        results = run_experiment_over_mu(dataset, cfg, [float(v) for v in values], splits, n_jobs)
        return [SweepPoint(float(v), results[float(v)]) for v in values]

    points = []
    for value in values:
        if int(value) != value or value < 1:
            raise ConfigError("sweep.values", f"k must be a positive integer, got {value}")
        point_cfg = cfg.with_k(int(value))
        points.append(SweepPoint(int(value), run_experiment(dataset, point_cfg, splits, n_jobs)))
        logger.info("sweep k=%d done", int(value))
    return points
