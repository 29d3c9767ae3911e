import numpy as np
import pytest

from srwdro.core import (Architecture, Dataset, DiscreteDistribution,
                         ModelParams, Sample, grad_theta, grad_x, init_params,
                         logits, model_loss, predict)
from srwdro.exceptions import (ConfigError, DimensionMismatchError,
                               InvalidDistributionError)

from oracles import central_diff


def _model(kind, seed=0, activation="tanh"):
    arch = Architecture(kind, dim=3, num_classes=2, hidden=5,
                        activation=activation)
    return init_params(arch, seed)


def test_param_counts():
    assert Architecture("softmax_linear", 3, 2).param_count == 8
    assert Architecture("mlp1", 3, 2, hidden=5).param_count == 5 * 3 + 5 + 2 * 5 + 2


def test_init_deterministic():
    a = _model("mlp1", seed=7)
    b = _model("mlp1", seed=7)
    assert np.array_equal(a.theta, b.theta)
    assert not np.array_equal(a.theta, _model("mlp1", seed=8).theta)


def test_loss_matches_manual_softmax():
    m = _model("softmax_linear")
    x = np.array([0.2, 0.5, 0.9])
    s = logits(m, x)
    expected = -np.log(np.exp(s[1]) / np.exp(s).sum())
    assert model_loss(m, Sample(x, 1)) == pytest.approx(expected, abs=1e-12)


def test_loss_stable_for_large_logits():
    arch = Architecture("softmax_linear", 2, 2)
    theta = np.array([500.0, 0.0, -500.0, 0.0, 0.0, 0.0])
    m = ModelParams(arch, theta)
    val = model_loss(m, Sample(np.array([1.0, 0.0]), 1))
    assert np.isfinite(val) and val == pytest.approx(1000.0, rel=1e-9)


@pytest.mark.parametrize("kind", ["softmax_linear", "mlp1"])
@pytest.mark.parametrize("activation", ["tanh", "relu"])
def test_gradients_match_finite_differences(kind, activation):
    m = _model(kind, seed=3, activation=activation)
    rng = np.random.default_rng(11)
    for _ in range(5):
        x = rng.uniform(0.05, 0.95, 3)
        y = int(rng.integers(0, 2))
        s = Sample(x, y)
        gt = grad_theta(m, s)
        gt_num = central_diff(
            lambda t: model_loss(ModelParams(m.arch, t), s), m.theta)
        assert np.allclose(gt, gt_num, atol=1e-6)
        gx = grad_x(m, s)
        gx_num = central_diff(lambda xv: model_loss(m, Sample(xv, y)), x)
        assert np.allclose(gx, gx_num, atol=1e-6)


def test_predict_is_argmax():
    m = _model("mlp1")
    x = np.array([0.1, 0.2, 0.3])
    assert predict(m, x) == int(np.argmax(logits(m, x)))


def test_dimension_checks():
    m = _model("softmax_linear")
    with pytest.raises(DimensionMismatchError):
        model_loss(m, Sample(np.array([0.1, 0.2]), 0))
    with pytest.raises(DimensionMismatchError):
        ModelParams(m.arch, np.zeros(3))


def test_dataset_validation():
    s = Sample(np.array([0.5, 0.5]), 0)
    Dataset([s], dim=2, num_classes=2)
    with pytest.raises(ConfigError):
        Dataset([Sample(np.array([0.5, 1.5]), 0)], dim=2, num_classes=2)
    with pytest.raises(ConfigError):
        Dataset([Sample(np.array([0.5, 0.5]), 3)], dim=2, num_classes=2)


def test_distribution_validation():
    DiscreteDistribution([0, 1], np.array([0.4, 0.6]))
    with pytest.raises(InvalidDistributionError):
        DiscreteDistribution([0, 1], np.array([0.4, 0.7]))
    with pytest.raises(InvalidDistributionError):
        DiscreteDistribution([0, 1], np.array([-0.2, 1.2]))


def test_unknown_architecture_rejected():
    with pytest.raises(ConfigError):
        Architecture("cnn", 3, 2)
    with pytest.raises(ConfigError):
        Architecture("mlp1", 3, 2, hidden=0)
