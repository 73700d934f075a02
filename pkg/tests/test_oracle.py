import numpy as np
import pytest

from fairscore import DiscreteMeasure, OracleGuardError, empirical_from_samples
from fairscore.oracle import (
    barycenter_coordinate_oracle,
    lp_transport_exact,
    ot_cost_bruteforce,
)
from fairscore.transport1d import barycenter_1d


def test_bruteforce_identity():
    assert ot_cost_bruteforce([1, 2, 3], [1, 2, 3]) == 0.0


def test_bruteforce_sorted_pairing():
    assert ot_cost_bruteforce([0, 1], [1, 2]) == 1.0


def test_bruteforce_cross_pairing():
    assert ot_cost_bruteforce([0, 3], [3, 0]) == 0.0


def test_bruteforce_vectors():
    x = [(0.0, 0.0), (1.0, 1.0)]
    y = [(1.0, 1.0), (0.0, 0.0)]
    assert ot_cost_bruteforce(x, y) == 0.0


def test_bruteforce_guard():
    with pytest.raises(OracleGuardError):
        ot_cost_bruteforce(list(range(9)), list(range(9)))


def test_lp_point_to_point():
    mu = DiscreteMeasure([[0.0]], [1.0])
    nu = DiscreteMeasure([[3.0]], [1.0])
    cost, plan = lp_transport_exact(mu, nu)
    assert cost == pytest.approx(9.0)
    np.testing.assert_allclose(plan, [[1.0]])


def test_lp_symmetric_two_point():
    mu = DiscreteMeasure([[0.0], [1.0]], [0.5, 0.5])
    nu = DiscreteMeasure([[0.0], [1.0]], [0.5, 0.5])
    cost, plan = lp_transport_exact(mu, nu)
    assert cost == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(plan, np.diag([0.5, 0.5]), atol=1e-12)


def test_lp_unbalanced_masses():
    mu = DiscreteMeasure([[0.0], [1.0]], [0.3, 0.7])
    nu = DiscreteMeasure([[0.0], [1.0]], [0.7, 0.3])
    cost, plan = lp_transport_exact(mu, nu)
    assert cost == pytest.approx(0.4)
    np.testing.assert_allclose(plan, [[0.3, 0.0], [0.4, 0.3]], atol=1e-12)


def test_lp_marginal_feasibility():
    rng = np.random.default_rng(10)
    for _ in range(10):
        n, m = rng.integers(2, 8), rng.integers(2, 8)
        mu = DiscreteMeasure(rng.normal(size=(n, 2)), rng.dirichlet(np.ones(n)))
        nu = DiscreteMeasure(rng.normal(size=(m, 2)), rng.dirichlet(np.ones(m)))
        _, plan = lp_transport_exact(mu, nu)
        assert np.abs(plan.sum(axis=1) - mu.masses).max() <= 1e-12
        assert np.abs(plan.sum(axis=0) - nu.masses).max() <= 1e-12


def test_lp_guard():
    big = DiscreteMeasure(np.zeros((21, 1)), np.full(21, 1 / 21))
    with pytest.raises(OracleGuardError):
        lp_transport_exact(big, big)


def test_coordinate_oracle_hand_case():
    dists = [empirical_from_samples([0, 2]), empirical_from_samples([2, 4])]
    grid = barycenter_coordinate_oracle(dists, [0.5, 0.5], 2, grid_resolution=1e-4)
    np.testing.assert_allclose(grid.quantiles, [1, 3], atol=1e-4)


def test_coordinate_oracle_single_dist():
    d = empirical_from_samples([1, 5, 9])
    grid = barycenter_coordinate_oracle([d], [1.0], 6, grid_resolution=1e-4)
    np.testing.assert_allclose(
        grid.quantiles, barycenter_1d([d], [1.0], 6).grid.quantiles, atol=1e-4
    )


def test_coordinate_oracle_matches_closed_form_random():
    rng = np.random.default_rng(44)
    for _ in range(10):
        k = int(rng.integers(2, 4))
        dists = [
            empirical_from_samples(rng.normal(loc=rng.uniform(-2, 2), size=rng.integers(2, 9)))
            for _ in range(k)
        ]
        w = rng.dirichlet(np.ones(k))
        m = int(rng.integers(2, 12))
        closed = barycenter_1d(dists, w, m).grid.quantiles
        searched = barycenter_coordinate_oracle(dists, w, m, grid_resolution=1e-4).quantiles
        assert np.abs(closed - searched).max() <= 1e-4


def test_coordinate_oracle_guard():
    d = empirical_from_samples([0, 1])
    with pytest.raises(OracleGuardError):
        barycenter_coordinate_oracle([d], [1.0], 51)
