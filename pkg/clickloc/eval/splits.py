"""Repeated random train/test splits, stratified by hydrophone."""

from dataclasses import dataclass
import logging
import math

import numpy as np

from ..errors import ConfigError, ShapeError
from ..seeding import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Split:
    """One round: sorted, disjoint train and test indices covering 0..N-1."""
    train: np.ndarray
    test: np.ndarray


@dataclass(frozen=True, eq=False)
class SplitPlan:
    """K independent random partitions of N clicks."""
    N: int
    K: int
    train_fraction: float
    seed: int
    assignments: tuple[Split, ...]

    def __len__(self) -> int:
        return len(self.assignments)

    def __iter__(self):
        return iter(self.assignments)

    def __getitem__(self, index: int) -> Split:
        return self.assignments[index]


def _test_quota(sizes: np.ndarray, n_test: int, K: int) -> np.ndarray:
    """Test clicks per group: proportional, largest remainder, ties to the lower group.

    A group with at least K clicks gets at least one test click whenever
    the test set is large enough to give every such group one.
    """
    exact = n_test * sizes / sizes.sum()
    quota = np.floor(exact).astype(np.int64)
    remainders = exact - quota
    for group in np.argsort(-remainders, kind="stable")[: n_test - quota.sum()]:
        quota[group] += 1

    starving = np.flatnonzero((quota == 0) & (sizes >= K))
    if starving.size and np.count_nonzero(sizes >= K) <= n_test:
        for group in starving:
            donor = int(np.argmax(quota))
            if quota[donor] <= 1:
                break
            quota[donor] -= 1
            quota[group] += 1
    return quota


def make_splits(
    N: int,
    K: int,
    train_fraction: float,
    seed: int,
    groups: np.ndarray | None = None,
) -> SplitPlan:
    """Draw K fresh train/test partitions with round(train_fraction * N) training clicks.

    Rounds are independent shuffles, not disjoint folds. With `groups`
    (hydrophone ids) the test set of every round is allocated to each group
    in proportion to its size.
    """
    if N < 2:
        raise ConfigError("eval.N", f"need at least 2 clicks, got {N}")
    if K < 1:
        raise ConfigError("eval.K", f"must be >= 1, got {K}")
    n_train = math.floor(train_fraction * N + 0.5)
    if not 0 < n_train < N:
        raise ConfigError("eval.train_fraction", f"{train_fraction} of {N} clicks leaves an empty train or test set")

    groups = np.zeros(N, dtype=np.int64) if groups is None else np.asarray(groups)
    if groups.shape != (N,):
        raise ShapeError(f"groups must have {N} entries, got shape {groups.shape}")
    labels, inverse = np.unique(groups, return_inverse=True)
    members = [np.flatnonzero(inverse == g) for g in range(labels.size)]
    quota = _test_quota(np.array([m.size for m in members]), N - n_train, K)

    assignments = []
    for round_index in range(K):
        rng = make_rng(seed, f"splits/round-{round_index}")
        test = np.concatenate([rng.permutation(m)[:q] for m, q in zip(members, quota)])
        mask = np.zeros(N, dtype=bool)
        mask[test] = True
        assignments.append(Split(train=np.flatnonzero(~mask), test=np.flatnonzero(mask)))

    logger.debug("Split %d clicks into %d rounds of %d train / %d test", N, K, n_train, N - n_train)
    return SplitPlan(N=N, K=K, train_fraction=train_fraction, seed=seed, assignments=tuple(assignments))
