"""Tests for training, prediction and model files."""

import struct

import numpy as np
import pytest

from clickloc.errors import ConfigError, FormatError, NumericError, ShapeError
from clickloc.features.pooling import GlobalFeature
from clickloc.regress import losses
from clickloc.regress.model import (
    C_GRID,
    LinearModel,
    TrainConfig,
    fit_target,
    label_scale,
    predict,
    select_C,
    train,
)
from clickloc.regress.store import load_model, save_model


@pytest.fixture
def linear_problem(rng):
    X = rng.normal(size=(60, 5))
    w = rng.normal(size=5)
    y = X @ w + 2000.0 + 1e-4 * rng.normal(size=60)
    return X, y


class TestTrain:
    """Tests for train and predict."""

    def test_proportional_feature(self, rng):
        """Test a feature proportional to the target is fit to machine accuracy."""
        y = rng.uniform(1000.0, 5000.0, size=20)
        X = (y / 2.0)[:, None]
        model = train(X, y, TrainConfig(C=1e6))
        rmse = np.sqrt(np.mean((predict(model, X) - y) ** 2))
        assert rmse < 1e-6 * (y.max() - y.min())
        assert predict(model, X[3]) == pytest.approx(y[3], rel=1e-9)

    def test_constant_targets(self, rng):
        """Test identical targets give zero weights and a bias at the target."""
        X = rng.normal(size=(10, 3))
        model = train(X, np.full(10, 5.0), TrainConfig(normalize_targets=False))
        np.testing.assert_allclose(model.weights, 0.0, atol=1e-12)
        assert model.bias == pytest.approx(5.0)
        assert predict(model, X[0]) == pytest.approx(5.0)

    def test_zero_features_predict_mean(self, rng):
        """Test all-zero features predict the training mean."""
        y = rng.uniform(0.0, 10.0, size=12)
        X = np.zeros((12, 4))
        model = train(X, y, TrainConfig())
        assert predict(model, np.zeros(4)) == pytest.approx(y.mean())

    def test_scale_invariance(self, linear_problem):
        """Test scaling features by c and C by 1/c^2 keeps the predictions."""
        X, y = linear_problem
        base = train(X, y, TrainConfig(C=0.5))
        scaled = train(4.0 * X, y, TrainConfig(C=0.5 / 16.0))
        np.testing.assert_allclose(predict(scaled, 4.0 * X), predict(base, X), rtol=0, atol=1e-8 * np.abs(y).max())

    def test_primal_and_dual_agree(self, rng):
        """Test the d > N dual path matches the primal solution."""
        X = rng.normal(size=(8, 20))
        y = rng.normal(size=8)
        model = train(X, y, TrainConfig(C=0.3, normalize_targets=False))
        # stationarity of the squared objective
        params = np.append(model.weights, model.bias)
        _, grad = losses.loss_and_grad(params, X, y, 0.3, "squared")
        np.testing.assert_allclose(grad, 0.0, atol=1e-9)

    def test_label_normalization(self, linear_problem):
        """Test labels are mapped onto [-1, 1] and mapped back at prediction."""
        X, y = linear_problem
        offset, scale = label_scale(y, True)
        labels = (y - offset) / scale
        assert labels.min() == pytest.approx(-1.0)
        assert labels.max() == pytest.approx(1.0)
        model = train(X, y, TrainConfig(C=100.0))
        assert model.label_scale == (offset, scale)
        assert np.sqrt(np.mean((predict(model, X) - y) ** 2)) < 0.1

    def test_logistic(self, linear_problem):
        """Test the logistic loss converges with a non-increasing objective."""
        X, y = linear_problem
        model = train(X, y, TrainConfig(C=1.0, loss="logistic", tol=1e-6))
        assert model.loss == "logistic"
        assert model.converged
        assert all(b <= a + 1e-12 for a, b in zip(model.history, model.history[1:]))
        params = np.append(model.weights, model.bias)
        offset, scale = model.label_scale
        _, grad = losses.loss_and_grad(params, X, (y - offset) / scale, 1.0, "logistic")
        assert np.linalg.norm(grad) <= 1e-5

    def test_too_few_rows(self):
        """Test a single training row is rejected."""
        with pytest.raises(ShapeError):
            train(np.ones((1, 2)), np.ones(1), TrainConfig())

    def test_non_finite(self, linear_problem):
        """Test NaN targets raise a numeric error."""
        X, y = linear_problem
        y = y.copy()
        y[0] = np.nan
        with pytest.raises(NumericError):
            train(X, y, TrainConfig())


class TestPredict:
    """Tests for predict."""

    def test_zero_model(self):
        """Test zero weights and bias with identity scale predict 0."""
        model = LinearModel(np.zeros(3), 0.0, "range", 1.0)
        assert predict(model, np.array([1.0, 2.0, 3.0])) == 0.0

    def test_global_feature_input(self):
        """Test a GlobalFeature is accepted."""
        model = LinearModel(np.array([1.0, 2.0]), 0.5, "azimuth", 1.0)
        assert predict(model, GlobalFeature(np.array([1.0, 1.0]))) == pytest.approx(3.5)

    def test_dimension_mismatch(self):
        """Test a feature of another d raises a shape error."""
        with pytest.raises(ShapeError):
            predict(LinearModel(np.zeros(3), 0.0, "range", 1.0), np.zeros(4))

    def test_non_finite_model(self):
        """Test non-finite coefficients are rejected."""
        with pytest.raises(NumericError):
            LinearModel(np.array([np.inf]), 0.0, "range", 1.0)


class TestModelSelection:
    """Tests for select_C and fit_target."""

    def test_selects_from_grid(self, linear_problem):
        """Test the chosen C is a grid value and is deterministic."""
        X, y = linear_problem
        cfg = TrainConfig()
        chosen = select_C(X, y, cfg, seed=4)
        assert chosen in C_GRID
        assert select_C(X, y, cfg, seed=4) == chosen

    def test_prefers_weak_regularization_on_clean_data(self, linear_problem):
        """Test a nearly noiseless linear problem picks the largest C."""
        X, y = linear_problem
        assert select_C(X, y, TrainConfig(), seed=0) == max(C_GRID)

    def test_too_few_rows_keep_C(self):
        """Test two rows leave the configured C."""
        assert select_C(np.eye(2), np.array([0.0, 1.0]), TrainConfig(C=3.0), seed=0) == 3.0

    def test_fit_target(self, linear_problem):
        """Test fit_target honours select_C=False."""
        X, y = linear_problem
        model = fit_target(X, y, TrainConfig(C=0.7, select_C=False), "azimuth")
        assert model.C == 0.7
        assert model.target == "azimuth"

    @pytest.mark.parametrize("kwargs, field", [
        ({"C": 0.0}, "regress.C"),
        ({"loss": "hinge"}, "regress.loss"),
        ({"C_grid": ()}, "regress.C_grid"),
        ({"selection_fraction": 1.0}, "regress.selection_fraction"),
    ])
    def test_invalid_config(self, kwargs, field):
        """Test invalid settings name their field."""
        with pytest.raises(ConfigError) as info:
            TrainConfig(**kwargs).validate()
        assert info.value.field == field


class TestModelStore:
    """Tests for model files."""

    @pytest.mark.parametrize("loss", losses.LOSSES)
    def test_round_trip(self, tmp_path, linear_problem, loss):
        """Test a saved model reloads and predicts identically."""
        X, y = linear_problem
        model = train(X, y, TrainConfig(C=2.0, loss=loss), target="azimuth")
        path = tmp_path / "azimuth.ccm"
        save_model(model, path)
        loaded = load_model(path)

        assert (loaded.target, loaded.loss, loaded.C) == ("azimuth", loss, 2.0)
        assert loaded.label_scale == model.label_scale
        np.testing.assert_array_equal(predict(loaded, X), predict(model, X))

    def test_layout(self, tmp_path):
        """Test the header fields and file size."""
        path = tmp_path / "range.ccm"
        save_model(LinearModel(np.arange(3.0), 1.5, "range", 10.0, label_scale=(2.0, 4.0)), path)
        data = path.read_bytes()
        assert len(data) == struct.calcsize("<4sBBId") + 8 * 6
        assert struct.unpack_from("<4sBBId", data) == (b"CCM1", 0, 0, 3, 10.0)

    def test_bad_magic(self, tmp_path):
        """Test a foreign file is rejected."""
        path = tmp_path / "range.ccm"
        save_model(LinearModel(np.zeros(2), 0.0, "range", 1.0), path)
        path.write_bytes(b"CCD1" + path.read_bytes()[4:])
        with pytest.raises(FormatError):
            load_model(path)

    def test_truncated(self, tmp_path):
        """Test a short file is rejected."""
        path = tmp_path / "range.ccm"
        save_model(LinearModel(np.zeros(2), 0.0, "range", 1.0), path)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(FormatError):
            load_model(path)
