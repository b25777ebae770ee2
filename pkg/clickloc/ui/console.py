"""Terminal output: themed console, log handler and result tables."""

from typing import Sequence
import logging
import math

from rich.console import Console
from rich.logging import RichHandler
from rich.style import Style
from rich.table import Table
from rich.theme import Theme

from ..eval.experiment import BASELINE_SUFFIX, ExperimentResult, SweepPoint
from ..eval.metrics import ArmseMode


class ConsoleStyle:
    """Colors for result tables."""

    def __init__(self, primary: str = "cyan", dim: str = "grey50", bright: str = "bright_white") -> None:
        self.primary = primary
        self.dim = dim
        self.bright = bright

    def get_theme(self) -> Theme:
        """Get Rich theme for console styling."""
        return Theme({
            "primary": Style(color=self.primary),
            "dim": Style(color=self.dim),
            "bright": Style(color=self.bright, bold=True),
            "header": Style(color=self.primary, bold=True),
            "baseline": Style(color=self.dim, italic=True),
        })


def make_console(stderr: bool = False) -> Console:
    return Console(theme=ConsoleStyle().get_theme(), stderr=stderr)


def setup_logging(level: int = logging.INFO, console: Console | None = None) -> None:
    """Route the clickloc logger through a single RichHandler."""
    logger = logging.getLogger("clickloc")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = RichHandler(console=console or make_console(stderr=True), show_path=False, markup=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False


def _cell(value: float) -> str:
    return "-" if math.isnan(value) else f"{value:.4g}"


def report_table(result: ExperimentResult, mode: ArmseMode = "normalized", title: str = "ARMSE") -> Table:
    """Per-hydrophone and global ARMSE of every target."""
    table = Table(title=f"{title} ({mode})", header_style="header", border_style="dim")
    table.add_column("target", style="primary")
    for h in result.hydrophone_ids:
        table.add_column(f"h{h}", justify="right")
    table.add_column("global", justify="right", style="bright")

    for target in result.targets:
        report = result.report(target, mode)
        per_hydrophone = report.per_hydrophone_armse
        style = "baseline" if target.endswith(BASELINE_SUFFIX) else None
        table.add_row(
            target,
            *(_cell(per_hydrophone[h]) for h in result.hydrophone_ids),
            _cell(report.global_armse),
            style=style,
        )
    return table


def render_report(console: Console, result: ExperimentResult, mode: ArmseMode = "normalized") -> None:
    console.print(report_table(result, mode))


def sweep_table(axis: str, points: Sequence[SweepPoint], mode: ArmseMode = "normalized") -> Table:
    """Global ARMSE per swept value."""
    table = Table(title=f"Sweep over {axis} ({mode})", header_style="header", border_style="dim")
    for column in (axis, "d", "range", "azimuth", "range baseline", "azimuth baseline"):
        table.add_column(column, justify="right")
    for point in points:
        result = point.result
        table.add_row(
            f"{point.value:g}",
            str(result.feature_dims),
            *(
                _cell(result.report(target, mode).global_armse)
                for target in ("range", "azimuth", "range" + BASELINE_SUFFIX, "azimuth" + BASELINE_SUFFIX)
            ),
        )
    return table


def render_sweep(console: Console, axis: str, points: Sequence[SweepPoint], mode: ArmseMode = "normalized") -> None:
    console.print(sweep_table(axis, points, mode))
