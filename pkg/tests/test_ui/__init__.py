"""Tests for terminal output."""
