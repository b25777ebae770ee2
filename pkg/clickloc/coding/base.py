"""Dictionary, sparse code types and the encoder base class."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Literal
import logging

import numpy as np
from joblib import Parallel, delayed, effective_n_jobs

from ..errors import ConfigError, ShapeError

logger = logging.getLogger(__name__)

EncoderMethod = Literal["ols", "ridge", "lasso_lars", "omp"]

UNIT_NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Dictionary:
    """p' x k matrix of unit-norm atoms."""
    atoms: np.ndarray

    def __post_init__(self) -> None:
        atoms = np.array(self.atoms, dtype=np.float64)
        if atoms.ndim != 2:
            raise ShapeError(f"atoms must be (p', k), got shape {atoms.shape}")
        norms = np.sum(atoms * atoms, axis=0)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)
        if bad.size:
            raise ConfigError("dictionary", f"atom {bad[0]} has squared norm {norms[bad[0]]}, expected 1")
        atoms.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_columns(cls, columns: np.ndarray) -> "Dictionary":
        """Normalize raw columns into a dictionary."""
        columns = np.array(columns, dtype=np.float64)
        norms = np.linalg.norm(columns, axis=0)
        if np.any(norms == 0):
            raise ConfigError("dictionary", "cannot normalize an all-zero atom")
        return cls(columns / norms)

    @property
    def p(self) -> int:
        """Atom dimension p'."""
        return self.atoms.shape[0]

    @property
    def k(self) -> int:
        """Atom count."""
        return self.atoms.shape[1]

    @cached_property
    def gram(self) -> np.ndarray:
        """D^T D."""
        return self.atoms.T @ self.atoms


@dataclass(frozen=True, eq=False)
class SparseCode:
    """Code vector alpha of one patch."""
    values: np.ndarray
    converged: bool = True
    degenerate: bool = False

    @property
    def nnz(self) -> int:
        """Entries with |alpha_j| > 0."""
        return int(np.count_nonzero(self.values))


@dataclass(frozen=True, eq=False)
class SparseCodeSet:
    """k x L code matrix V of one click."""
    values: np.ndarray
    click_id: int = 0
    nonconverged: int = 0

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def L(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class EncoderConfig:
    """Encoder choice and its parameters."""
    method: EncoderMethod = "lasso_lars"
    beta: float = 0.1  # ridge
    lam: float = 0.2  # lasso penalty lambda
    omp_sparsity: int = 10
    lars_max_steps: int = 500
    tol: float = 1e-10

    def validate(self) -> None:
        """Check that the chosen method has valid parameters."""
        if self.method not in ENCODERS:
            raise ConfigError("encoder.method", f"unknown method {self.method!r}, choose from {sorted(ENCODERS)}")
        if self.method == "ridge" and not self.beta > 0:
            raise ConfigError("encoder.beta", f"must be positive, got {self.beta}")
        if self.method == "lasso_lars" and not self.lam > 0:
            raise ConfigError("encoder.lam", f"must be positive, got {self.lam}")
        if self.omp_sparsity < 1:
            raise ConfigError("encoder.omp_sparsity", f"must be >= 1, got {self.omp_sparsity}")
        if self.lars_max_steps < 1:
            raise ConfigError("encoder.lars_max_steps", f"must be >= 1, got {self.lars_max_steps}")
        if not self.tol > 0:
            raise ConfigError("encoder.tol", f"must be positive, got {self.tol}")


class SparseEncoder(ABC):
    """Abstract base class for patch encoders.

    Encoders are read-only on the dictionary; per-dictionary factorizations
    are cached by prepare() so a batch pays for them once.
    """

    METHOD: str = "unknown"

    def __init__(self, cfg: EncoderConfig) -> None:
        self._cfg = cfg
        self._prepared: Dictionary | None = None

    @property
    def config(self) -> EncoderConfig:
        return self._cfg

    def prepare(self, dictionary: Dictionary) -> None:
        """Cache dictionary-dependent factorizations."""
        if self._prepared is not dictionary:
            self._prepare(dictionary)
            self._prepared = dictionary

    def _prepare(self, dictionary: Dictionary) -> None:
        """Hook for subclasses; default caches nothing."""

    @abstractmethod
    def _encode(self, z: np.ndarray, dictionary: Dictionary) -> SparseCode:
        """Encode one patch against a prepared dictionary."""

    def encode(self, z: np.ndarray, dictionary: Dictionary) -> SparseCode:
        """Encode one p'-vector."""
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (dictionary.p,):
            raise ShapeError(f"patch of shape {z.shape} does not match dictionary dimension {dictionary.p}")
        self.prepare(dictionary)
        if not np.any(z):
            return SparseCode(np.zeros(dictionary.k))
        return self._encode(z, dictionary)

    def _encode_columns(self, columns: np.ndarray, dictionary: Dictionary) -> tuple[np.ndarray, int]:
        codes = np.zeros((dictionary.k, columns.shape[1]))
        nonconverged = 0
        for i in range(columns.shape[1]):
            code = self.encode(columns[:, i], dictionary)
            codes[:, i] = code.values
            nonconverged += not code.converged
        return codes, nonconverged

    def encode_matrix(self, columns: np.ndarray, dictionary: Dictionary, n_jobs: int = 1) -> tuple[np.ndarray, int]:
        """Encode every column of a (p', M) matrix.

        Columns may be fanned out over threads; each is encoded by the same
        per-column routine, so the result does not depend on n_jobs.
        """
        columns = np.asarray(columns, dtype=np.float64)
        if columns.ndim != 2 or columns.shape[0] != dictionary.p:
            raise ShapeError(f"patch matrix {columns.shape} does not match dictionary dimension {dictionary.p}")
        self.prepare(dictionary)

        if n_jobs == 1 or columns.shape[1] < 2:
            return self._encode_columns(columns, dictionary)

        chunks = np.array_split(np.arange(columns.shape[1]), min(columns.shape[1], 4 * effective_n_jobs(n_jobs)))
        results = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(self._encode_columns)(columns[:, chunk], dictionary) for chunk in chunks if chunk.size
        )
        codes = np.concatenate([codes for codes, _ in results], axis=1)
        return codes, sum(count for _, count in results)


# Encoder registry - maps method names to their classes
ENCODERS: dict[str, type[SparseEncoder]] = {}


def register_encoder(cls: type[SparseEncoder]) -> type[SparseEncoder]:
    """Class decorator adding an encoder to the registry."""
    ENCODERS[cls.METHOD] = cls
    return cls


def make_encoder(cfg: EncoderConfig) -> SparseEncoder:
    """Instantiate the encoder named by cfg.method."""
    cfg.validate()
    return ENCODERS[cfg.method](cfg)
