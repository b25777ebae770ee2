"""Tests for the console, log handler and result tables."""

import logging

import numpy as np
import pytest
from rich.console import Console
from rich.logging import RichHandler

from clickloc.eval.experiment import SweepPoint, evaluate_features
from clickloc.eval.splits import make_splits
from clickloc.regress.model import TrainConfig
from clickloc.ui.console import ConsoleStyle, render_report, report_table, setup_logging, sweep_table


@pytest.fixture
def result(rng):
    X = rng.normal(size=(24, 3))
    hydrophones = np.array([1, 4] * 12)
    splits = make_splits(24, 2, 0.7, seed=0, groups=hydrophones)
    return evaluate_features(X, 100.0 * X[:, 0], X[:, 1], hydrophones, splits, TrainConfig(select_C=False))


class TestLogging:
    """Tests for setup_logging."""

    def test_single_handler(self):
        """Test repeated setup keeps one RichHandler on the package logger."""
        setup_logging(logging.INFO)
        setup_logging(logging.DEBUG)
        logger = logging.getLogger("clickloc")
        assert len(logger.handlers) == 1
        assert isinstance(logger.handlers[0], RichHandler)
        assert logger.level == logging.DEBUG
        assert not logger.propagate

    def test_messages_reach_console(self):
        """Test records from submodules are written to the given console."""
        console = Console(record=True, width=120)
        setup_logging(logging.INFO, console=console)
        logging.getLogger("clickloc.coding.learning").info("pass 3 rolled back")
        logging.getLogger("clickloc.coding.learning").debug("hidden")
        text = console.export_text()
        assert "pass 3 rolled back" in text
        assert "hidden" not in text


class TestTables:
    """Tests for the report and sweep tables."""

    def test_report_table(self, result):
        """Test one row per target and one column per hydrophone plus global."""
        table = report_table(result)
        assert table.row_count == 4
        assert [str(column.header) for column in table.columns] == ["target", "h1", "h4", "global"]

    def test_render_report(self, result):
        """Test the rendered table names every target."""
        console = Console(record=True, width=120, theme=ConsoleStyle().get_theme())
        render_report(console, result, "literal")
        text = console.export_text()
        assert "literal" in text
        for target in result.targets:
            assert target in text

    def test_sweep_table(self, result):
        """Test one row per swept value."""
        table = sweep_table("mu", [SweepPoint(1.0, result), SweepPoint(float("inf"), result)])
        assert table.row_count == 2
        assert table.columns[0].header == "mu"
