"""Tests for click datasets."""
