"""Per-target linear regressors on global features."""

from dataclasses import dataclass, field, replace
from typing import Literal
import logging
import math

import numpy as np
from scipy import linalg, optimize

from ..errors import ConfigError, NumericError, ShapeError
from ..features.pooling import GlobalFeature
from . import losses

logger = logging.getLogger(__name__)

Target = Literal["range", "azimuth"]
TARGETS = ("range", "azimuth")

# Model-selection grid for C
C_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)


@dataclass(frozen=True)
class TrainConfig:
    """Regressor settings."""
    C: float = 1.0
    loss: losses.Loss = "squared"
    max_iter: int = 100
    tol: float = 1e-8
    normalize_targets: bool = True
    select_C: bool = True
    C_grid: tuple[float, ...] = C_GRID
    selection_fraction: float = 0.7  # training share of the nested split

    def validate(self) -> None:
        """Check ranges."""
        if not self.C > 0:
            raise ConfigError("regress.C", f"must be positive, got {self.C}")
        if self.loss not in losses.LOSSES:
            raise ConfigError("regress.loss", f"unknown loss {self.loss!r}, choose from {list(losses.LOSSES)}")
        if self.max_iter < 1:
            raise ConfigError("regress.max_iter", f"must be >= 1, got {self.max_iter}")
        if not self.tol > 0:
            raise ConfigError("regress.tol", f"must be positive, got {self.tol}")
        if not self.C_grid or any(not c > 0 for c in self.C_grid):
            raise ConfigError("regress.C_grid", f"needs positive values, got {list(self.C_grid)}")
        if not 0 < self.selection_fraction < 1:
            raise ConfigError("regress.selection_fraction", f"must lie in (0, 1), got {self.selection_fraction}")


@dataclass(frozen=True, eq=False)
class LinearModel:
    """w, b and the affine map between raw targets and training labels."""
    weights: np.ndarray
    bias: float
    target: Target
    C: float
    label_scale: tuple[float, float] = (0.0, 1.0)  # (offset, scale): label = (y - offset) / scale
    loss: losses.Loss = "squared"
    converged: bool = True
    n_iter: int = 0
    history: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.weights)) or not math.isfinite(self.bias):
            raise NumericError(f"{self.target} model has non-finite coefficients")
        if not self.label_scale[1] > 0:
            raise ConfigError("label_scale", f"scale must be positive, got {self.label_scale[1]}")

    @property
    def d(self) -> int:
        return self.weights.shape[0]


def label_scale(y: np.ndarray, normalize: bool) -> tuple[float, float]:
    """Affine map taking targets onto [-1, 1]."""
    if not normalize:
        return 0.0, 1.0
    low, high = float(np.min(y)), float(np.max(y))
    half_width = (high - low) / 2.0
    return (high + low) / 2.0, half_width if half_width > 0 else 1.0


def _check_problem(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ShapeError(f"features {X.shape} and targets {y.shape} do not align")
    if X.shape[0] < 2:
        raise ShapeError(f"need at least 2 training rows, got {X.shape[0]}")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
        raise NumericError("training data contains non-finite values")
    return X, y


def _solve_squared(X: np.ndarray, y: np.ndarray, C: float) -> np.ndarray:
    """Exact minimizer of the squared objective, returned as [w, b].

    The bias is profiled out by centering; w comes from the primal d x d
    system or the dual N x N system, whichever is smaller.
    """
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean
    count, dims = X.shape
    try:
        if dims <= count:
            w = linalg.solve(np.eye(dims) + 2.0 * C * (Xc.T @ Xc), 2.0 * C * (Xc.T @ yc), assume_a="pos")
        else:
            w = Xc.T @ linalg.solve(np.eye(count) / (2.0 * C) + Xc @ Xc.T, yc, assume_a="pos")
    except linalg.LinAlgError as e:
        raise NumericError(f"squared-loss system is not positive definite for C={C}") from e
    return np.append(w, y_mean - x_mean @ w)


def train(features: np.ndarray, targets: np.ndarray, cfg: TrainConfig, target: Target = "range") -> LinearModel:
    """Fit one target with cfg.C."""
    cfg.validate()
    X, y = _check_problem(features, targets)
    offset, scale = label_scale(y, cfg.normalize_targets)
    labels = (y - offset) / scale

    if cfg.loss == "squared":
        params = _solve_squared(X, labels, cfg.C)
        value = losses.objective(params, X, labels, cfg.C, "squared")
        return LinearModel(
            weights=params[:-1], bias=float(params[-1]), target=target, C=cfg.C,
            label_scale=(offset, scale), loss="squared", converged=True, n_iter=1, history=[value],
        )

    history: list[float] = []
    x0 = np.zeros(X.shape[1] + 1)
    history.append(losses.objective(x0, X, labels, cfg.C, "logistic"))
    result = optimize.minimize(
        losses.loss_and_grad,
        x0,
        args=(X, labels, cfg.C, "logistic"),
        method="trust-ncg",
        jac=True,
        hessp=losses.hessp,
        callback=lambda xk: history.append(losses.objective(xk, X, labels, cfg.C, "logistic")),
        options={"gtol": cfg.tol, "maxiter": cfg.max_iter},
    )
    converged = bool(result.success) or float(np.linalg.norm(result.jac)) <= cfg.tol
    if not converged:
        logger.warning("%s regressor stopped after %d iterations: %s", target, result.nit, result.message)
    return LinearModel(
        weights=result.x[:-1], bias=float(result.x[-1]), target=target, C=cfg.C,
        label_scale=(offset, scale), loss="logistic", converged=converged, n_iter=int(result.nit), history=history,
    )


def predict(model: LinearModel, x: GlobalFeature | np.ndarray) -> float | np.ndarray:
    """Raw-unit estimate for one feature vector, or one per row of a matrix."""
    values = x.values if isinstance(x, GlobalFeature) else np.asarray(x, dtype=np.float64)
    if values.shape[-1] != model.d:
        raise ShapeError(f"feature dimension {values.shape[-1]} does not match model dimension {model.d}")
    offset, scale = model.label_scale
    estimate = scale * (values @ model.weights + model.bias) + offset
    return float(estimate) if values.ndim == 1 else estimate


def select_C(features: np.ndarray, targets: np.ndarray, cfg: TrainConfig, seed: int) -> float:
    """Pick C from cfg.C_grid by validation RMSE on a nested random split.

    Ties go to the first grid value. Too few rows for a split leaves cfg.C.
    """
    X, y = _check_problem(features, targets)
    count = X.shape[0]
    n_train = math.floor(cfg.selection_fraction * count + 0.5)
    if n_train < 2 or n_train >= count:
        logger.debug("%d rows are too few for model selection; keeping C=%g", count, cfg.C)
        return cfg.C

    order = np.random.default_rng(seed).permutation(count)
    fit_rows, held_rows = order[:n_train], order[n_train:]

    best_C, best_error = cfg.C, math.inf
    for C in cfg.C_grid:
        model = train(X[fit_rows], y[fit_rows], replace(cfg, C=C))
        error = float(np.sqrt(np.mean((predict(model, X[held_rows]) - y[held_rows]) ** 2)))
        logger.debug("C=%g: validation RMSE %.6g", C, error)
        if error < best_error:
            best_C, best_error = C, error
    return best_C


def fit_target(
    features: np.ndarray,
    targets: np.ndarray,
    cfg: TrainConfig,
    target: Target,
    seed: int = 0,
) -> LinearModel:
    """Train one target, choosing C by model selection when enabled."""
    cfg.validate()
    if cfg.select_C:
        cfg = replace(cfg, C=select_C(features, targets, cfg, seed))
    return train(features, targets, cfg, target)
