import numpy as np
import pytest

from srwdro.adversary import (AttackConfig, dhat, grad_dhat, pgd_attack,
                              sample_shift_cost, udr_attack, _dist)
from srwdro.core import Architecture, Sample, init_params, model_loss
from srwdro.exceptions import ConfigError, DimensionMismatchError

from oracles import central_diff


def _model(seed=0):
    return init_params(Architecture("mlp1", 2, 2, hidden=8), seed)


def test_dhat_branches():
    x0 = np.zeros(2)
    assert dhat(np.array([0.05, 0.02]), x0, 0.1, 2.0) == pytest.approx(0.05)
    # at the threshold both branches give eps
    assert dhat(np.array([0.1, 0.0]), x0, 0.1, 2.0) == pytest.approx(0.1)
    # beyond it the excess is tempered by tau
    assert dhat(np.array([0.3, 0.0]), x0, 0.1, 2.0) == pytest.approx(0.2)
    assert dhat(np.array([0.3, 0.0]), x0, 0.1, 1.0) == pytest.approx(0.3)


def test_dhat_l2_norm():
    x0 = np.zeros(2)
    x = np.array([0.3, 0.4])
    assert dhat(x, x0, 1.0, 2.0, norm="l2") == pytest.approx(0.5)


def test_grad_dhat_matches_finite_differences():
    x0 = np.array([0.2, 0.7])
    rng = np.random.default_rng(0)
    for norm in ("linf", "l2"):
        for _ in range(10):
            x = x0 + rng.uniform(-0.3, 0.3, 2)
            if abs(abs(x - x0).max() - 0.1) < 1e-3:
                continue  # skip the kink itself
            if norm == "linf" and abs(abs(x[0] - x0[0]) - abs(x[1] - x0[1])) < 1e-3:
                continue  # skip coordinate ties where linf is nonsmooth
            g = grad_dhat(x, x0, 0.1, 2.0, norm)
            g_num = central_diff(lambda v: dhat(v, x0, 0.1, 2.0, norm), x)
            assert np.allclose(g, g_num, atol=1e-6)


def test_grad_dhat_threshold_owned_by_linear_branch():
    x0 = np.zeros(1)
    g_below = grad_dhat(np.array([0.1]), x0, 0.1, 2.0)
    assert g_below[0] == pytest.approx(1.0)
    g_above = grad_dhat(np.array([0.100001]), x0, 0.1, 2.0)
    assert g_above[0] == pytest.approx(0.5)


def test_grad_dist_tie_averaging():
    x0 = np.zeros(2)
    g = grad_dhat(np.array([0.05, 0.05]), x0, 0.1, 1.0, "linf")
    assert np.allclose(g, [0.5, 0.5])


def test_sample_shift_cost():
    a = Sample(np.array([0.0, 0.0]), 0)
    b = Sample(np.array([0.3, 0.1]), 0)
    c = Sample(np.array([0.3, 0.1]), 1)
    assert sample_shift_cost(a, b, 10.0) == pytest.approx(0.3)
    assert sample_shift_cost(a, c, 10.0) == pytest.approx(10.3)


def test_pgd_stays_in_ball_and_box():
    m = _model()
    rng = np.random.default_rng(1)
    for i in range(20):
        x = rng.uniform(0, 1, 2)
        s = Sample(x, int(rng.integers(0, 2)))
        cfg = AttackConfig(eps=0.1, K=10, eta=0.03, seed=i)
        adv = pgd_attack(m, s, cfg)
        assert np.abs(adv.x - x).max() <= 0.1 + 1e-12
        assert adv.x.min() >= 0.0 and adv.x.max() <= 1.0
        assert adv.y == s.y


def test_pgd_increases_loss():
    m = _model()
    rng = np.random.default_rng(2)
    wins = 0
    for i in range(20):
        s = Sample(rng.uniform(0, 1, 2), int(rng.integers(0, 2)))
        cfg = AttackConfig(eps=0.2, K=20, eta=0.02, random_start=False, seed=i)
        adv = pgd_attack(m, s, cfg)
        wins += model_loss(m, adv) >= model_loss(m, s) - 1e-12
    assert wins == 20  # no random start, pure ascent never loses


def test_udr_deterministic_and_boxed():
    m = _model()
    s = Sample(np.array([0.4, 0.6]), 1)
    cfg = AttackConfig(eps=0.1, K=10, eta=0.025, seed=5, lam=1.0)
    a = udr_attack(m, s, cfg)
    b = udr_attack(m, s, cfg)
    assert np.array_equal(a.x, b.x)
    assert a.x.min() >= 0.0 and a.x.max() <= 1.0


def test_udr_large_multiplier_limits_excursion():
    """A huge penalty multiplier pulls iterates back toward the clean point."""
    m = _model()
    s = Sample(np.array([0.5, 0.5]), 0)
    free = udr_attack(m, s, AttackConfig(0.1, 20, 0.05, seed=3, lam=0.0))
    pinned = udr_attack(m, s, AttackConfig(0.1, 20, 0.05, seed=3, lam=50.0, tau=0.1))
    assert _dist(pinned.x, s.x, "linf") <= _dist(free.x, s.x, "linf") + 1e-12


def test_zero_steps_is_just_the_start():
    m = _model()
    s = Sample(np.array([0.3, 0.3]), 0)
    adv = pgd_attack(m, s, AttackConfig(eps=0.0, K=0))
    assert np.array_equal(adv.x, s.x)


def test_config_validation():
    with pytest.raises(ConfigError):
        AttackConfig(eps=-0.1)
    with pytest.raises(ConfigError):
        AttackConfig(eps=0.1, K=5, eta=0.0)
    with pytest.raises(ConfigError):
        AttackConfig(eps=0.1, norm="l7")
    with pytest.raises(ConfigError):
        AttackConfig(eps=0.1, tau=0.0)
    m = _model()
    with pytest.raises(DimensionMismatchError):
        pgd_attack(m, Sample(np.zeros(3), 0), AttackConfig(0.1))
