"""Report and sweep CSV files."""

from pathlib import Path
from typing import Sequence
import csv
import logging
import math

from .experiment import BASELINE_SUFFIX, ExperimentResult, SweepPoint
from .metrics import ARMSE_MODES, ArmseMode

logger = logging.getLogger(__name__)

SWEEP_HEADER = ["axis_value", "feature_dim", "range_armse", "azimuth_armse", "range_baseline", "azimuth_baseline"]


def format_value(value: float | int | None) -> str:
    """CSV text of a number: integers plain, floats at repr precision."""
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    return repr(float(value))


def report_header(hydrophone_ids: Sequence[int]) -> list[str]:
    return ["axis_value", "target", "armse_mode", "armse_global"] + [f"armse_h{h}" for h in hydrophone_ids] + ["fold", "seed"]


def report_rows(
    result: ExperimentResult,
    hydrophone_ids: Sequence[int],
    axis_value: float | int | None = None,
    modes: Sequence[ArmseMode] = ARMSE_MODES,
) -> list[list[str]]:
    """One row per round, then the fold=mean row, for every (target, mode)."""
    rows = []
    axis = format_value(axis_value)
    for report in result.reports(modes):
        columns = {h: i for i, h in enumerate(report.hydrophone_ids)}
        for fold in range(report.K):
            values = [
                format_value(float(report.per_fold[fold, columns[h]])) if h in columns else "nan"
                for h in hydrophone_ids
            ]
            rows.append([axis, report.target, report.mode, format_value(report.fold_global(fold)), *values, str(fold), str(result.seed)])
        means = report.per_hydrophone_armse
        values = [format_value(means[h]) if h in means else "nan" for h in hydrophone_ids]
        rows.append([axis, report.target, report.mode, format_value(report.global_armse), *values, "mean", str(result.seed)])
    return rows


def write_report_csv(
    path: Path | str,
    entries: Sequence[tuple[float | int | None, ExperimentResult]],
    modes: Sequence[ArmseMode] = ARMSE_MODES,
) -> Path:
    """Write the detailed report of one or more (axis value, result) entries."""
    hydrophone_ids = sorted({h for _, result in entries for h in result.hydrophone_ids})
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(report_header(hydrophone_ids))
        for axis_value, result in entries:
            writer.writerows(report_rows(result, hydrophone_ids, axis_value, modes))
    logger.info("Wrote report to %s", path)
    return path


def sweep_rows(points: Sequence[SweepPoint], mode: ArmseMode = "normalized") -> list[list[str]]:
    """Summary row per sweep value: global ARMSE of both targets and their baselines."""
    rows = []
    for point in points:
        result = point.result
        values = [
            result.report(target, mode).global_armse
            for target in ("range", "azimuth", "range" + BASELINE_SUFFIX, "azimuth" + BASELINE_SUFFIX)
        ]
        rows.append([format_value(point.value), str(result.feature_dims), *(format_value(v) for v in values)])
    return rows


def write_sweep_csv(path: Path | str, points: Sequence[SweepPoint], mode: ArmseMode = "normalized") -> Path:
    """Write the sweep summary; no points gives a header-only file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        writer.writerows(sweep_rows(points, mode))
    logger.info("Wrote %d-row sweep table to %s", len(points), path)
    return path
