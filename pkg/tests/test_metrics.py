"""Discrepancy functions: oracle agreement and the relations between them."""

import numpy as np
import pytest

from srwdro.metrics import (CostMatrix, kl_divergence, lp_eps, lp_metric,
                            tv_distance, wasserstein_p)
from srwdro.exceptions import DimensionMismatchError, InvalidDistributionError

from oracles import kl as kl_oracle
from oracles import transport_lp


def _random_space(rng, m):
    pts = rng.uniform(0, 1, (m, 2))
    return pts, CostMatrix.from_points(pts, norm="linf")


def test_wasserstein_matches_lp_oracle():
    rng = np.random.default_rng(0)
    for _ in range(30):
        m = int(rng.integers(2, 6))
        _, cost = _random_space(rng, m)
        mu = rng.dirichlet(np.ones(m))
        nu = rng.dirichlet(np.ones(m))
        for p in (1, 2):
            expected = transport_lp(cost.entries ** p, mu, nu) ** (1.0 / p)
            assert wasserstein_p(mu, nu, cost, p) == pytest.approx(
                expected, abs=1e-9)


def test_wasserstein_metric_axioms():
    rng = np.random.default_rng(1)
    _, cost = _random_space(rng, 4)
    mu = rng.dirichlet(np.ones(4))
    nu = rng.dirichlet(np.ones(4))
    rho = rng.dirichlet(np.ones(4))
    assert wasserstein_p(mu, mu, cost) == pytest.approx(0.0, abs=1e-12)
    assert wasserstein_p(mu, nu, cost) == pytest.approx(
        wasserstein_p(nu, mu, cost), abs=1e-10)
    assert (wasserstein_p(mu, rho, cost)
            <= wasserstein_p(mu, nu, cost) + wasserstein_p(nu, rho, cost) + 1e-10)


def test_kl_and_tv_basics():
    mu = np.array([0.7, 0.3])
    nu = np.array([0.3, 0.7])
    assert kl_divergence(mu, nu) == pytest.approx(kl_oracle(mu, nu), abs=1e-12)
    assert kl_divergence(mu, mu) == 0.0
    assert tv_distance(mu, nu) == pytest.approx(0.4, abs=1e-15)
    # mass on a null atom of nu makes KL infinite
    assert kl_divergence(np.array([0.5, 0.5]), np.array([1.0, 0.0])) == np.inf
    # but null atoms of mu are fine (0 ln 0 = 0)
    assert np.isfinite(kl_divergence(np.array([1.0, 0.0]), np.array([0.5, 0.5])))


def test_pinsker():
    rng = np.random.default_rng(2)
    for _ in range(200):
        m = int(rng.integers(2, 6))
        mu = rng.dirichlet(np.ones(m))
        nu = rng.dirichlet(np.ones(m))
        assert tv_distance(mu, nu) <= np.sqrt(kl_divergence(mu, nu) / 2.0) + 1e-12


def test_lp_eps_monotone_and_clipped():
    rng = np.random.default_rng(3)
    _, cost = _random_space(rng, 4)
    mu = rng.dirichlet(np.ones(4))
    nu = rng.dirichlet(np.ones(4))
    vals = [lp_eps(mu, nu, cost, e) for e in np.linspace(0, cost.diameter, 9)]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(0.0, abs=1e-12)


def test_lp_metric_is_a_crossing_point():
    rng = np.random.default_rng(4)
    for _ in range(10):
        m = int(rng.integers(2, 5))
        _, cost = _random_space(rng, m)
        mu = rng.dirichlet(np.ones(m))
        nu = rng.dirichlet(np.ones(m))
        tau = lp_metric(mu, nu, cost)
        assert lp_eps(mu, nu, cost, tau + 1e-9) <= tau + 1e-9 + 1e-12
        if tau > 1e-9:
            assert lp_eps(mu, nu, cost, tau - 1e-9) > tau - 1e-9 - 1e-6


def test_sandwich_relations():
    """LP^{(p+1)/p} <= W_p <= (diam+1) LP^{1/p} and W_p <= diam TV^{1/p}."""
    rng = np.random.default_rng(5)
    for _ in range(100):
        m = int(rng.integers(2, 5))
        _, cost = _random_space(rng, m)
        mu = rng.dirichlet(np.ones(m))
        nu = rng.dirichlet(np.ones(m))
        diam = cost.diameter
        tv = tv_distance(mu, nu)
        lp = lp_metric(mu, nu, cost)
        for p in (1, 2):
            w = wasserstein_p(mu, nu, cost, p)
            assert lp ** ((p + 1.0) / p) <= w + 1e-9
            assert w <= (diam + 1.0) * lp ** (1.0 / p) + 1e-9
            assert w <= diam * tv ** (1.0 / p) + 1e-9


def test_cost_matrix_validation():
    with pytest.raises(InvalidDistributionError):
        CostMatrix(np.array([[0.0, -1.0], [1.0, 0.0]]))
    with pytest.raises(DimensionMismatchError):
        CostMatrix(np.zeros(3))
    with pytest.raises(DimensionMismatchError):
        wasserstein_p(np.array([0.5, 0.5]), np.array([0.5, 0.5]),
                      CostMatrix(np.zeros((3, 3))))


def test_sample_shift_cost():
    pts = np.array([[0.0, 0.0], [1.0, 0.0]])
    cm = CostMatrix.sample_shift(pts, np.array([0, 1]), M=10.0, norm="linf")
    assert cm.entries[0, 0] == 0.0
    assert cm.entries[0, 1] == pytest.approx(11.0)
