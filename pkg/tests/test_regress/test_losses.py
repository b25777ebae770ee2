"""Tests for the regression objectives."""

import numpy as np
import pytest

from clickloc.errors import ConfigError
from clickloc.regress import losses


def finite_difference_grad(params, X, y, C, loss, h=1e-5):
    grad = np.zeros_like(params)
    for i in range(params.size):
        step = np.zeros_like(params)
        step[i] = h
        grad[i] = (losses.objective(params + step, X, y, C, loss) - losses.objective(params - step, X, y, C, loss)) / (2 * h)
    return grad


@pytest.fixture
def problem(rng):
    X = rng.normal(size=(50, 10))
    y = rng.uniform(-1.0, 1.0, size=50)
    return X, y


@pytest.mark.parametrize("loss", losses.LOSSES)
def test_gradient_matches_finite_differences(problem, rng, loss):
    """Test the analytic gradient against central differences at random points."""
    X, y = problem
    for _ in range(50):
        params = rng.normal(scale=0.3, size=11)
        _, grad = losses.loss_and_grad(params, X, y, 0.5, loss)
        numeric = finite_difference_grad(params, X, y, 0.5, loss)
        np.testing.assert_allclose(grad, numeric, rtol=1e-5, atol=1e-5 * np.abs(numeric).max())


@pytest.mark.parametrize("loss", losses.LOSSES)
def test_hessian_vector_product(problem, rng, loss):
    """Test hessp against a difference of gradients."""
    X, y = problem
    params = rng.normal(scale=0.3, size=11)
    vector = rng.normal(size=11)
    h = 1e-6
    _, plus = losses.loss_and_grad(params + h * vector, X, y, 0.5, loss)
    _, minus = losses.loss_and_grad(params - h * vector, X, y, 0.5, loss)
    numeric = (plus - minus) / (2 * h)
    np.testing.assert_allclose(losses.hessp(params, vector, X, y, 0.5, loss), numeric, rtol=1e-5, atol=1e-6)


def test_bias_is_not_regularized(problem):
    """Test the regularizer only sees the weights."""
    X, y = problem
    params = np.zeros(11)
    params[-1] = 3.0
    value, _ = losses.loss_and_grad(params, np.zeros_like(X), np.full(50, 3.0), 1.0, "squared")
    assert value == 0.0


def test_squared_value(problem):
    """Test the squared objective at zero is C * sum(y^2)."""
    X, y = problem
    assert losses.objective(np.zeros(11), X, y, 2.0, "squared") == pytest.approx(2.0 * np.sum(y ** 2))


def test_logistic_value(problem):
    """Test the logistic objective at zero is C * N * log 2."""
    X, y = problem
    assert losses.objective(np.zeros(11), X, y, 2.0, "logistic") == pytest.approx(2.0 * 50 * np.log(2.0))


def test_unknown_loss(problem):
    """Test an unknown loss is a config error."""
    X, y = problem
    with pytest.raises(ConfigError):
        losses.loss_and_grad(np.zeros(11), X, y, 1.0, "hinge")
