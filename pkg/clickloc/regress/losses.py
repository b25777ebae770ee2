"""Regularized objectives over (w, b), bias unregularized.

    squared:  1/2 |w|^2 + C sum (y_i - w^T x_i - b)^2
    logistic: 1/2 |w|^2 + C sum log(1 + exp(-y_i (w^T x_i + b)))

The logistic form takes the continuous targets as they are. Parameters are
packed as one vector [w, b].
"""

from typing import Literal

import numpy as np
from scipy.special import expit

from ..errors import ConfigError

Loss = Literal["squared", "logistic"]
LOSSES = ("squared", "logistic")


def _check(loss: str) -> None:
    if loss not in LOSSES:
        raise ConfigError("regress.loss", f"unknown loss {loss!r}, choose from {list(LOSSES)}")


def decision(params: np.ndarray, X: np.ndarray) -> np.ndarray:
    """w^T x_i + b for every row."""
    return X @ params[:-1] + params[-1]


def loss_and_grad(params: np.ndarray, X: np.ndarray, y: np.ndarray, C: float, loss: Loss) -> tuple[float, np.ndarray]:
    """Objective value and gradient at params."""
    _check(loss)
    w = params[:-1]
    f = decision(params, X)
    grad = np.empty_like(params)

    if loss == "squared":
        residual = y - f
        value = 0.5 * w @ w + C * residual @ residual
        weights = -2.0 * C * residual
    else:
        margins = y * f
        value = 0.5 * w @ w + C * np.sum(np.logaddexp(0.0, -margins))
        weights = -C * y * expit(-margins)

    grad[:-1] = w + X.T @ weights
    grad[-1] = np.sum(weights)
    return float(value), grad


def hessp(params: np.ndarray, vector: np.ndarray, X: np.ndarray, y: np.ndarray, C: float, loss: Loss) -> np.ndarray:
    """Hessian-vector product at params."""
    _check(loss)
    if loss == "squared":
        curvature = np.full(X.shape[0], 2.0 * C)
    else:
        s = expit(y * decision(params, X))
        curvature = C * y * y * s * (1.0 - s)

    u = curvature * decision(vector, X)
    out = np.empty_like(vector)
    out[:-1] = vector[:-1] + X.T @ u
    out[-1] = np.sum(u)
    return out


def objective(params: np.ndarray, X: np.ndarray, y: np.ndarray, C: float, loss: Loss) -> float:
    return loss_and_grad(params, X, y, C, loss)[0]
