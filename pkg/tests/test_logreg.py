import numpy as np
import pytest

from lcml import ConfigError, LogisticRegression, NumericError, ShapeError, sigmoid
from lcml.models.logreg import logistic_gradient, logistic_loss

from oracles import central_difference_gradient


def test_sigmoid_values():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(np.log(3.0)) == pytest.approx(0.75, abs=1e-12)


def test_sigmoid_symmetry():
    for x in (0.1, 1.0, 10.0, 100.0):
        assert sigmoid(-x) == pytest.approx(1.0 - sigmoid(x), abs=1e-12)


def test_sigmoid_extreme_arguments_are_stable():
    assert sigmoid(700.0) == pytest.approx(1.0)
    assert sigmoid(-700.0) > 0.0
    big = sigmoid(np.array([-1e6, 1e6]))
    assert np.isfinite(big).all()
    assert big[0] == 0.0 or big[0] < 1e-300
    assert big[1] == 1.0


def test_gradient_at_origin_frozen_value():
    # central finite differences at 1e-6 give (-0.5, 0.0)
    X = np.array([[1.0], [-1.0]])
    y = np.array([1.0, 0.0])
    gw, gb = logistic_gradient(X, y, np.zeros(1), 0.0)
    assert gw[0] == pytest.approx(-0.5, abs=1e-12)
    assert gb == pytest.approx(0.0, abs=1e-12)
    fd_w, fd_b = central_difference_gradient(
        lambda w, b: logistic_loss(X, y, w, b), np.zeros(1), 0.0
    )
    assert fd_w[0] == pytest.approx(-0.5, abs=1e-8)
    assert fd_b == pytest.approx(0.0, abs=1e-8)


def test_gradient_matches_finite_differences_on_random_instances(rng):
    # 50 random problems of width <= 10, relative error <= 1e-4
    for _ in range(50):
        n = int(rng.integers(2, 30))
        width = int(rng.integers(1, 11))
        X = rng.normal(size=(n, width))
        y = rng.integers(0, 2, size=n).astype(float)
        w = rng.normal(size=width)
        b = float(rng.normal())
        lam = float(rng.uniform(0, 0.5))
        gw, gb = logistic_gradient(X, y, w, b, lam)
        fd_w, fd_b = central_difference_gradient(
            lambda wv, bv: logistic_loss(X, y, wv, bv, lam), w, b
        )
        scale = max(np.max(np.abs(fd_w)), abs(fd_b), 1e-8)
        assert np.max(np.abs(gw - fd_w)) / scale <= 1e-4
        assert abs(gb - fd_b) / scale <= 1e-4


def test_separable_toy_is_learned():
    X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    y = np.array([0, 0, 1, 1])
    model = LogisticRegression(max_iter=500).fit(X, y)
    assert model.weights[0] > 0
    assert np.array_equal(model.predict(X), y)


def test_loss_history_is_monotone_under_backtracking(rng):
    X = rng.normal(size=(60, 8))
    y = rng.integers(0, 2, size=60)
    model = LogisticRegression(max_iter=300, l2_lambda=0.01).fit(X, y)
    losses = np.array(model.loss_history)
    assert losses.shape[0] >= 2
    assert np.all(np.diff(losses) <= 1e-12)


def test_all_zero_labels_push_probabilities_down(rng):
    X = rng.normal(size=(30, 4))
    y = np.zeros(30, dtype=int)
    model = LogisticRegression(max_iter=300, l2_lambda=0.1).fit(X, y)
    assert np.all(model.predict_proba(X) < 0.5)


def test_zero_weights_predict_half_and_label_one():
    model = LogisticRegression()
    model.weights = np.zeros(3)
    model.bias = 0.0
    X = np.ones((4, 3))
    assert np.allclose(model.predict_proba(X), 0.5)
    assert np.array_equal(model.predict(X), np.ones(4, dtype=int))  # >= 0.5 -> 1


def test_probabilities_match_direct_recomputation(rng):
    X = rng.normal(size=(40, 5))
    y = rng.integers(0, 2, size=40)
    model = LogisticRegression(max_iter=100).fit(X, y)
    Q = rng.normal(size=(7, 5))
    direct = 1.0 / (1.0 + np.exp(-(Q @ model.weights + model.bias)))
    assert np.allclose(model.predict_proba(Q), direct, atol=1e-12)


def test_monotone_in_positive_weight_feature():
    model = LogisticRegression()
    model.weights = np.array([2.0, -1.0])
    model.bias = 0.3
    base = model.predict_proba(np.array([[1.0, 1.0]]))[0]
    bumped = model.predict_proba(np.array([[1.5, 1.0]]))[0]
    assert bumped >= base


def test_width_mismatch_raises():
    model = LogisticRegression(max_iter=10).fit(np.zeros((4, 3)), [0, 1, 0, 1])
    with pytest.raises(ShapeError):
        model.predict(np.zeros((2, 5)))
    with pytest.raises(ShapeError):
        LogisticRegression().predict(np.zeros((1, 1)))


def test_non_finite_features_raise_numeric_error():
    X = np.array([[1e308], [-1e308]])
    y = np.array([1, 0])
    with pytest.raises(NumericError, match="iteration"):
        LogisticRegression(max_iter=5, step_rule="fixed", learning_rate=1e8).fit(X, y)


def test_fixed_step_rule_runs():
    X = np.array([[-1.0], [1.0]])
    y = np.array([0, 1])
    model = LogisticRegression(max_iter=200, step_rule="fixed", learning_rate=0.5).fit(X, y)
    assert np.array_equal(model.predict(X), y)


def test_convergence_flag_and_iteration_count():
    X = np.array([[-1.0], [1.0], [-0.5], [0.5]])
    y = np.array([0, 1, 0, 1])
    model = LogisticRegression(max_iter=5000, tol=1e-3, l2_lambda=1.0).fit(X, y)
    assert model.converged
    assert 0 < model.iters_used < 5000


def test_config_validation():
    with pytest.raises(ConfigError):
        LogisticRegression(max_iter=0)
    with pytest.raises(ConfigError):
        LogisticRegression(l2_lambda=-1.0)
    with pytest.raises(ConfigError):
        LogisticRegression(step_rule="newton")
