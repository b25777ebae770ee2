"""Online dictionary learning.

Alternates LARS coding of a mini-batch against the current dictionary with a
block coordinate descent update of the atoms, driven by the accumulators
A = sum alpha alpha^T and B = sum z alpha^T.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from ..errors import ConfigError, ShapeError
from ..seeding import derive_seed, make_rng
from .base import Dictionary, EncoderConfig, make_encoder

logger = logging.getLogger(__name__)

# Atoms whose accumulated code energy A_jj stays below this are left alone
DEAD_ATOM_TOL = 1e-12


@dataclass(frozen=True)
class LearnerConfig:
    """Dictionary size and training schedule."""
    k: int = 128
    iterations: int = 15
    batch_size: int = 256
    sample_size: int = 400_000  # M, patches drawn for training
    validation_size: int = 1024  # frozen batch used to monitor the objective

    def validate(self) -> None:
        """Check ranges."""
        for name in ("k", "iterations", "batch_size", "sample_size", "validation_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"learner.{name}", f"must be >= 1, got {getattr(self, name)}")
        if self.sample_size < self.k:
            raise ConfigError("learner.sample_size", f"must be >= k={self.k}, got {self.sample_size}")


@dataclass(eq=False)
class LearnerState:
    """Accumulators and bookkeeping of an online learning run."""
    A: np.ndarray  # k x k, sum of alpha alpha^T
    B: np.ndarray  # p' x k, sum of z alpha^T
    seen: int = 0
    lam: float = 0.2
    batch_size: int = 256
    iterations: int = 15
    history: list[float] = field(default_factory=list)  # frozen-batch objective, init then per pass
    rejected_passes: int = 0

    @classmethod
    def empty(cls, p: int, k: int, lam: float = 0.2, batch_size: int = 256, iterations: int = 15) -> "LearnerState":
        return cls(A=np.zeros((k, k)), B=np.zeros((p, k)), lam=lam, batch_size=batch_size, iterations=iterations)

    def accumulate(self, patches: np.ndarray, codes: np.ndarray) -> None:
        """Fold a coded mini-batch into A and B."""
        self.A += codes @ codes.T
        self.B += patches @ codes.T
        self.seen += patches.shape[1]

    def dead_atoms(self) -> np.ndarray:
        return np.flatnonzero(np.diag(self.A) < DEAD_ATOM_TOL)


def _as_patch_sample(patches: np.ndarray) -> np.ndarray:
    patches = np.asarray(patches, dtype=np.float64)
    if patches.ndim != 2:
        raise ShapeError(f"patch sample must be (p', M), got shape {patches.shape}")
    if patches.shape[1] == 0:
        raise ShapeError("patch sample is empty")
    return patches


def _draw_atoms(patches: np.ndarray, count: int, seed: int) -> np.ndarray:
    """Draw `count` distinct nonzero sample columns, renormalized."""
    norms = np.linalg.norm(patches, axis=0)
    usable = np.flatnonzero(norms > 0)
    if usable.size < count:
        raise ConfigError("learner.k", f"need {count} nonzero sample patches, got {usable.size}")
    picks = usable[np.random.default_rng(seed).choice(usable.size, size=count, replace=False)]
    return patches[:, picks] / norms[picks]


def init_dictionary(patches: np.ndarray, k: int, seed: int) -> Dictionary:
    """k sample patches chosen uniformly without replacement, as unit-norm atoms."""
    patches = _as_patch_sample(patches)
    if k < 1:
        raise ConfigError("learner.k", f"must be >= 1, got {k}")
    if patches.shape[1] < k:
        raise ConfigError("learner.k", f"sample of {patches.shape[1]} patches is smaller than k={k}")
    return Dictionary(_draw_atoms(patches, k, seed))


def replace_dead_atoms(dictionary: Dictionary, state: LearnerState, patches: np.ndarray, seed: int) -> Dictionary:
    """Swap atoms that never got used for fresh sample patches.

    With every atom dead the result is init_dictionary(patches, k, seed).
    """
    dead = state.dead_atoms()
    if not dead.size:
        return dictionary

    patches = _as_patch_sample(patches)
    available = int(np.count_nonzero(np.linalg.norm(patches, axis=0)))
    count = min(dead.size, available)
    if count < dead.size:
        logger.warning("Only %d nonzero patches to replace %d dead atoms", available, dead.size)
    if count == 0:
        return dictionary

    atoms = np.array(dictionary.atoms)
    atoms[:, dead[:count]] = _draw_atoms(patches, count, seed)
    logger.debug("Replaced %d dead atoms", count)
    return Dictionary(atoms)


def update_atoms(atoms: np.ndarray, state: LearnerState) -> None:
    """One block coordinate descent sweep over the columns, in place."""
    A, B = state.A, state.B
    for j in range(atoms.shape[1]):
        if A[j, j] < DEAD_ATOM_TOL:
            continue
        u = atoms[:, j] + (B[:, j] - atoms @ A[:, j]) / A[j, j]
        norm = np.linalg.norm(u)
        if norm > 0:
            atoms[:, j] = u / norm


def objective(patches: np.ndarray, dictionary: Dictionary, lam: float, n_jobs: int = 1) -> float:
    """Empirical risk: mean of 1/2 |z - D alpha|^2 + lam |alpha|_1 with fresh LARS codes."""
    patches = _as_patch_sample(patches)
    encoder = make_encoder(EncoderConfig(method="lasso_lars", lam=lam))
    codes, _ = encoder.encode_matrix(patches, dictionary, n_jobs=n_jobs)
    residual = patches - dictionary.atoms @ codes
    losses = 0.5 * np.sum(residual * residual, axis=0) + lam * np.sum(np.abs(codes), axis=0)
    return float(np.mean(losses))


class OnlineDictionaryLearner:
    """Mini-batch online learner with a frozen-batch objective monitor.

    A pass that raises the monitored objective is rolled back, so the
    recorded history never increases.
    """

    def __init__(
        self,
        k: int,
        lam: float = 0.2,
        iterations: int = 15,
        batch_size: int = 256,
        seed: int = 0,
        n_jobs: int = 1,
        validation_size: int = 1024,
        lars_max_steps: int = 500,
    ) -> None:
        if iterations < 1:
            raise ConfigError("learner.iterations", f"must be >= 1, got {iterations}")
        if batch_size < 1:
            raise ConfigError("learner.batch_size", f"must be >= 1, got {batch_size}")
        self.k = k
        self.iterations = iterations
        self.batch_size = batch_size
        self.seed = seed
        self.n_jobs = n_jobs
        self.validation_size = validation_size
        self.encoder_config = EncoderConfig(method="lasso_lars", lam=lam, lars_max_steps=lars_max_steps)
        self.encoder_config.validate()
        self.state: LearnerState | None = None
        self.dictionary: Dictionary | None = None

    @property
    def lam(self) -> float:
        return self.encoder_config.lam

    def fit(self, patches: np.ndarray, init: Dictionary | None = None) -> Dictionary:
        """Learn a dictionary from a (p', M) patch sample."""
        patches = _as_patch_sample(patches)
        p, count = patches.shape
        dictionary = init or init_dictionary(patches, self.k, derive_seed(self.seed, "init"))
        if dictionary.p != p:
            raise ShapeError(f"initial dictionary has dimension {dictionary.p}, patches have {p}")

        if count > self.validation_size:
            held = make_rng(self.seed, "validation").choice(count, size=self.validation_size, replace=False)
            validation = patches[:, np.sort(held)]
        else:
            validation = patches

        encoder = make_encoder(self.encoder_config)
        state = LearnerState.empty(p, dictionary.k, self.lam, self.batch_size, self.iterations)
        state.history.append(objective(validation, dictionary, self.lam, self.n_jobs))
        logger.info("Learning k=%d atoms from %d patches; initial objective %.6g", dictionary.k, count, state.history[0])

        for iteration in range(self.iterations):
            saved = (dictionary, state.A.copy(), state.B.copy(), state.seen)
            atoms = np.array(dictionary.atoms)
            order = make_rng(self.seed, f"pass-{iteration}").permutation(count)

            nonconverged = 0
            for start in range(0, count, self.batch_size):
                batch = patches[:, order[start:start + self.batch_size]]
                codes, missed = encoder.encode_matrix(batch, Dictionary(atoms), n_jobs=self.n_jobs)
                nonconverged += missed
                state.accumulate(batch, codes)
                update_atoms(atoms, state)

            dictionary = replace_dead_atoms(
                Dictionary(atoms), state, patches, derive_seed(self.seed, f"pass-{iteration}/dead")
            )
            value = objective(validation, dictionary, self.lam, self.n_jobs)
            if nonconverged:
                logger.warning("pass %d: %d patches hit the LARS step limit", iteration + 1, nonconverged)

            if value > state.history[-1]:
                dictionary, state.A, state.B, state.seen = saved
                state.rejected_passes += 1
                state.history.append(state.history[-1])
                logger.warning(
                    "pass %d/%d raised the objective to %.6g; rolled back", iteration + 1, self.iterations, value
                )
                continue

            state.history.append(value)
            logger.info("pass %d/%d: objective %.6g", iteration + 1, self.iterations, value)

        self.state = state
        self.dictionary = dictionary
        return dictionary


def learn_dictionary(
    patches: np.ndarray,
    k: int,
    lam: float = 0.2,
    iterations: int = 15,
    batch_size: int = 256,
    seed: int = 0,
    n_jobs: int = 1,
    validation_size: int = 1024,
) -> Dictionary:
    """Learn k unit-norm atoms from a (p', M) patch sample."""
    learner = OnlineDictionaryLearner(
        k, lam=lam, iterations=iterations, batch_size=batch_size,
        seed=seed, n_jobs=n_jobs, validation_size=validation_size,
    )
    return learner.fit(patches)
