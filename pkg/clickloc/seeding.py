"""Seed derivation: every random stream descends from one root seed."""

import hashlib

import numpy as np


def derive_seed(root: int, tag: str) -> int:
    """Derive a stage seed from the root seed and a stage tag."""
    digest = hashlib.sha256(f"{root}:{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def make_rng(root: int, tag: str) -> np.random.Generator:
    """Random generator for one pipeline stage."""
    return np.random.default_rng(derive_seed(root, tag))
