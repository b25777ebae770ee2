"""Tests for patching and pooling."""
