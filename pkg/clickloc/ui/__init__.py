"""Terminal output."""

from .console import ConsoleStyle, make_console, setup_logging, render_report, render_sweep

__all__ = ["ConsoleStyle", "make_console", "setup_logging", "render_report", "render_sweep"]
