"""Tests for clickloc."""
