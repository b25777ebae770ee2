"""Tests for the regressors."""
