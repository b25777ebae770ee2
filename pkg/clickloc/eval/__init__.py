"""Split protocol, ARMSE metrics and experiment harness."""

from .splits import Split, SplitPlan, make_splits
from .metrics import ARMSE_MODES, EvalReport, armse, build_report
from .experiment import (
    EvalConfig,
    ExperimentResult,
    RoundResult,
    SweepPoint,
    evaluate_features,
    run_experiment,
    run_experiment_over_mu,
    sweep,
)
from .report import write_report_csv, write_sweep_csv

__all__ = [
    "Split",
    "SplitPlan",
    "make_splits",
    "ARMSE_MODES",
    "EvalReport",
    "armse",
    "build_report",
    "EvalConfig",
    "ExperimentResult",
    "RoundResult",
    "SweepPoint",
    "evaluate_features",
    "run_experiment",
    "run_experiment_over_mu",
    "sweep",
    "write_report_csv",
    "write_sweep_csv",
]
