"""Tests for sparse coding and dictionary learning."""
