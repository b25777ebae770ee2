"""ARMSE: root-square error per hydrophone, averaged over rounds and hydrophones."""

from dataclasses import dataclass, field
from typing import Literal, Sequence
import math
import warnings

import numpy as np

from ..errors import ConfigError, ShapeError

ArmseMode = Literal["literal", "normalized"]
ARMSE_MODES = ("normalized", "literal")


def armse(truth, estimates, mode: ArmseMode = "normalized") -> float:
    """Root error of one test set.

    literal:    sqrt(sum e^2)
    normalized: sqrt(sum e^2 / N_test), the usual RMSE
    """
    truth = np.asarray(truth, dtype=np.float64)
    estimates = np.asarray(estimates, dtype=np.float64)
    if truth.shape != estimates.shape or truth.ndim != 1:
        raise ShapeError(f"truth {truth.shape} and estimates {estimates.shape} must be equal-length vectors")
    if truth.size == 0:
        raise ShapeError("armse of an empty test set")
    errors = estimates - truth
    total = float(errors @ errors)
    if mode == "literal":
        return math.sqrt(total)
    if mode == "normalized":
        return math.sqrt(total / truth.size)
    raise ConfigError("eval.armse_mode", f"unknown mode {mode!r}, choose from {list(ARMSE_MODES)}")


def _nanmean(values: np.ndarray, axis=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return np.nanmean(values, axis=axis)


@dataclass(frozen=True, eq=False)
class EvalReport:
    """ARMSE of one target over all rounds."""
    target: str
    mode: ArmseMode
    hydrophone_ids: tuple[int, ...]
    per_fold: np.ndarray  # K x H, NaN where a round tested no click of that hydrophone
    config: dict = field(default_factory=dict, repr=False)

    @property
    def K(self) -> int:
        return self.per_fold.shape[0]

    @property
    def per_hydrophone_armse(self) -> dict[int, float]:
        """ARMSE(l): mean over rounds, per hydrophone."""
        means = _nanmean(self.per_fold, axis=0)
        return {h: float(v) for h, v in zip(self.hydrophone_ids, means)}

    @property
    def global_armse(self) -> float:
        """Mean of the per-hydrophone values."""
        return float(_nanmean(np.array(list(self.per_hydrophone_armse.values()))))

    def fold_global(self, fold: int) -> float:
        """Mean over hydrophones within one round."""
        return float(_nanmean(self.per_fold[fold]))


def build_report(
    target: str,
    truth: Sequence[np.ndarray],
    estimates: Sequence[np.ndarray],
    hydrophones: Sequence[np.ndarray],
    hydrophone_ids: Sequence[int],
    mode: ArmseMode = "normalized",
    config: dict | None = None,
) -> EvalReport:
    """Fill the K x H matrix from per-round test truth, estimates and hydrophone labels."""
    hydrophone_ids = tuple(int(h) for h in hydrophone_ids)
    per_fold = np.full((len(truth), len(hydrophone_ids)), np.nan)
    for fold, (t, e, labels) in enumerate(zip(truth, estimates, hydrophones)):
        for column, h in enumerate(hydrophone_ids):
            rows = labels == h
            if rows.any():
                per_fold[fold, column] = armse(t[rows], e[rows], mode)
    return EvalReport(target=target, mode=mode, hydrophone_ids=hydrophone_ids, per_fold=per_fold, config=config or {})
