"""Tests for the evaluation harness."""
