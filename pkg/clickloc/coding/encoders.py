"""Patch encoders: OLS, ridge, Lasso by LARS, and OMP."""

import logging

import numpy as np
from scipy import linalg

from ..errors import ConfigError, NumericError, ShapeError
from ..features.patching import PatchMatrix
from .base import (
    Dictionary,
    EncoderConfig,
    SparseCode,
    SparseCodeSet,
    SparseEncoder,
    make_encoder,
    register_encoder,
)

logger = logging.getLogger(__name__)


@register_encoder
class OlsEncoder(SparseEncoder):
    """Least squares through the normal equations.

    Falls back to the minimum-norm solution when D^T D is singular or
    numerically so (more atoms than dimensions, dependent atoms).
    """

    METHOD = "ols"

    def _prepare(self, dictionary: Dictionary) -> None:
        self._factor = None
        self._pinv = None
        if dictionary.k <= dictionary.p:
            try:
                factor = linalg.cho_factor(dictionary.gram)
                diagonal = np.abs(np.diag(factor[0]))
                if diagonal.min() ** 2 > np.finfo(float).eps * dictionary.k * diagonal.max() ** 2:
                    self._factor = factor
            except linalg.LinAlgError:
                pass
        if self._factor is None:
            logger.debug("D^T D is singular for a %dx%d dictionary; using minimum-norm solutions", dictionary.p, dictionary.k)
            self._pinv = linalg.pinv(dictionary.atoms)

    def _encode(self, z: np.ndarray, dictionary: Dictionary) -> SparseCode:
        if self._factor is not None:
            return SparseCode(linalg.cho_solve(self._factor, dictionary.atoms.T @ z))
        return SparseCode(self._pinv @ z, degenerate=True)


@register_encoder
class RidgeEncoder(SparseEncoder):
    """(D^T D + beta I)^-1 D^T z via a Cholesky factor."""

    METHOD = "ridge"

    def _prepare(self, dictionary: Dictionary) -> None:
        system = dictionary.gram + self.config.beta * np.eye(dictionary.k)
        try:
            self._factor = linalg.cho_factor(system)
        except linalg.LinAlgError as e:
            raise NumericError(f"Cholesky factorization failed for beta={self.config.beta}") from e

    def _encode(self, z: np.ndarray, dictionary: Dictionary) -> SparseCode:
        return SparseCode(linalg.cho_solve(self._factor, dictionary.atoms.T @ z))


def lars_lasso_path(
    correlations: np.ndarray,
    gram: np.ndarray,
    lam: float,
    max_steps: int = 500,
    tol: float = 1e-10,
) -> tuple[np.ndarray, bool]:
    """Solve min 1/2 |z - D a|^2 + lam |a|_1 by LARS with the Lasso modification.

    Works on the Gram form: `correlations` is D^T z and `gram` is D^T D. The
    path is followed downward in the common correlation C of the active set
    until C reaches lam. An active coefficient crossing zero is dropped from
    the active set. Entering ties go to the lowest atom index.

    Returns:
        (alpha, converged) - converged is False when max_steps ran out, the
        active Gram block stopped being positive definite, or the end point
        fails the optimality conditions.
    """
    k = gram.shape[0]
    alpha = np.zeros(k)
    if k == 0:
        return alpha, True

    magnitudes = np.abs(correlations)
    first = int(np.argmax(magnitudes))
    C = magnitudes[first]
    if C <= lam:
        return alpha, True

    active = [first]
    signs = [float(np.sign(correlations[first]))]
    # a dropped atom sits at |c| = C with its old sign; only the opposite sign may re-enter next step
    just_dropped, dropped_sign = -1, 0.0

    for _ in range(max_steps):
        A = np.array(active)
        s = np.array(signs)
        try:
            direction = linalg.solve(gram[np.ix_(A, A)], s, assume_a="pos")
        except (linalg.LinAlgError, ValueError):
            logger.debug("Active Gram block lost definiteness at |A|=%d", len(active))
            return alpha, False

        # along the step: active |c| = C - gamma, inactive c_j - gamma * a_j
        c = correlations - gram[:, A] @ alpha[A]
        a = gram[:, A] @ direction

        gamma = C - lam
        event, position = "stop", -1

        candidates = np.ones(k, dtype=bool)
        candidates[A] = False
        index = np.flatnonzero(candidates)
        if index.size:
            with np.errstate(divide="ignore", invalid="ignore"):
                lower = 1.0 - a[index]
                upper = 1.0 + a[index]
                g_plus = np.where(lower > tol, (C - c[index]) / lower, np.inf)
                g_minus = np.where(upper > tol, (C + c[index]) / upper, np.inf)
            if just_dropped >= 0:
                slot = int(np.searchsorted(index, just_dropped))
                if dropped_sign > 0:
                    g_plus[slot] = np.inf
                else:
                    g_minus[slot] = np.inf
            steps = np.maximum(np.minimum(g_plus, g_minus), 0.0)
            best = int(np.argmin(steps))
            if steps[best] < gamma:
                gamma, event, position = steps[best], "enter", int(index[best])

        with np.errstate(divide="ignore", invalid="ignore"):
            crossings = np.where(alpha[A] * direction < 0, -alpha[A] / direction, np.inf)
        crossing = int(np.argmin(crossings))
        if crossings[crossing] > tol and crossings[crossing] < gamma:
            gamma, event, position = crossings[crossing], "drop", crossing

        alpha[A] += gamma * direction
        C -= gamma
        just_dropped, dropped_sign = -1, 0.0

        if event == "stop":
            alpha = _polish(alpha, correlations, gram, A, s, lam)
            return alpha, _satisfies_kkt(alpha, correlations, gram, lam)
        if event == "enter":
            active.append(position)
            signs.append(float(np.sign(c[position] - gamma * a[position])))
        else:
            atom = active.pop(position)
            dropped_sign = signs.pop(position)
            alpha[atom] = 0.0
            just_dropped = atom
            if not active:
                return alpha, _satisfies_kkt(alpha, correlations, gram, lam)

    return alpha, False


def _satisfies_kkt(alpha, correlations, gram, lam, slack: float = 1e-9) -> bool:
    """|d_j^T r| <= lam everywhere, with equality and matching sign on the support."""
    residual_corr = correlations - gram @ alpha
    bound = lam + slack * max(1.0, lam)
    if np.abs(residual_corr).max() > bound:
        logger.debug("LARS stopped with max |D^T r| = %.3g > lam = %.3g", np.abs(residual_corr).max(), lam)
        return False
    support = alpha != 0
    return bool(np.all(np.abs(residual_corr[support] - lam * np.sign(alpha[support])) <= slack * max(1.0, lam)))


def _polish(alpha, correlations, gram, A, s, lam) -> np.ndarray:
    """Re-solve the active block exactly; keep the path iterate if signs flip."""
    try:
        exact = linalg.solve(gram[np.ix_(A, A)], correlations[A] - lam * s, assume_a="pos")
    except (linalg.LinAlgError, ValueError):
        return alpha
    if np.all(np.sign(exact) == s):
        alpha = alpha.copy()
        alpha[A] = exact
    return alpha


@register_encoder
class LassoLarsEncoder(SparseEncoder):
    """l1-penalized coding solved by LARS-Lasso."""

    METHOD = "lasso_lars"

    def _encode(self, z: np.ndarray, dictionary: Dictionary) -> SparseCode:
        values, converged = lars_lasso_path(
            dictionary.atoms.T @ z,
            dictionary.gram,
            self.config.lam,
            max_steps=self.config.lars_max_steps,
            tol=self.config.tol,
        )
        return SparseCode(values, converged=converged)


@register_encoder
class OmpEncoder(SparseEncoder):
    """Orthogonal matching pursuit with a full least-squares refit per step."""

    METHOD = "omp"

    def _prepare(self, dictionary: Dictionary) -> None:
        sparsity = self.config.omp_sparsity
        if sparsity > min(dictionary.p, dictionary.k):
            raise ConfigError("encoder.omp_sparsity", f"must be <= min(p'={dictionary.p}, k={dictionary.k}), got {sparsity}")

    def _encode(self, z: np.ndarray, dictionary: Dictionary) -> SparseCode:
        sparsity = self.config.omp_sparsity
        atoms = dictionary.atoms
        values = np.zeros(dictionary.k)
        selected: list[int] = []
        residual = z.copy()
        scale = np.linalg.norm(z)

        for _ in range(sparsity):
            correlations = np.abs(atoms.T @ residual)
            correlations[selected] = -1.0
            best = int(np.argmax(correlations))
            if correlations[best] <= self.config.tol * scale:
                break
            selected.append(best)
            coefficients, *_ = np.linalg.lstsq(atoms[:, selected], z, rcond=None)
            residual = z - atoms[:, selected] @ coefficients
            if np.linalg.norm(residual) <= self.config.tol * scale:
                break

        if selected:
            values[selected] = coefficients
        return SparseCode(values)


def encode_ols(z: np.ndarray, dictionary: Dictionary) -> SparseCode:
    """Minimize 1/2 |z - D a|^2."""
    return OlsEncoder(EncoderConfig(method="ols")).encode(z, dictionary)


def encode_ridge(z: np.ndarray, dictionary: Dictionary, beta: float) -> SparseCode:
    """Ridge code (D^T D + beta I)^-1 D^T z."""
    return make_encoder(EncoderConfig(method="ridge", beta=beta)).encode(z, dictionary)


def encode_lasso(z: np.ndarray, dictionary: Dictionary, lam: float, max_steps: int = 500) -> SparseCode:
    """Minimize 1/2 |z - D a|^2 + lam |a|_1."""
    return make_encoder(EncoderConfig(method="lasso_lars", lam=lam, lars_max_steps=max_steps)).encode(z, dictionary)


def encode_omp(z: np.ndarray, dictionary: Dictionary, sparsity: int) -> SparseCode:
    """Greedy approximation with at most `sparsity` atoms."""
    return make_encoder(EncoderConfig(method="omp", omp_sparsity=sparsity)).encode(z, dictionary)


def encode_batch(
    patches: PatchMatrix | np.ndarray,
    dictionary: Dictionary,
    cfg: EncoderConfig,
    n_jobs: int = 1,
    encoder: SparseEncoder | None = None,
) -> SparseCodeSet:
    """Encode every patch column into the k x L code matrix V."""
    columns = patches.columns if isinstance(patches, PatchMatrix) else np.asarray(patches, dtype=np.float64)
    click_id = patches.source_click_id if isinstance(patches, PatchMatrix) else 0
    if columns.ndim != 2:
        raise ShapeError(f"patches must be a (p', L) matrix, got shape {columns.shape}")

    encoder = encoder or make_encoder(cfg)
    codes, nonconverged = encoder.encode_matrix(columns, dictionary, n_jobs=n_jobs)
    if nonconverged:
        logger.debug("click %d: %d of %d patches did not converge", click_id, nonconverged, columns.shape[1])
    return SparseCodeSet(values=codes, click_id=click_id, nonconverged=nonconverged)
