import math

import numpy as np
import pytest

from pairpot import (
    ConfigError,
    LennardJones,
    PiecewiseStrauss,
    Poisson,
    Strauss,
    Triplets,
    UnsupportedModelError,
    log_papangelou,
    log_papangelou_multi,
    model_from_mapping,
    pair_potential,
)


def test_poisson_intensity_is_constant():
    x = np.random.default_rng(0).uniform(0, 5, (30, 2))
    assert log_papangelou(Poisson(3.0), (1.0, 1.0), x) == math.log(3.0)


def test_strauss_three_neighbours():
    m = Strauss(2.0, 1.0, 0.5)
    x = [[0.5, 0.0], [0.0, 0.5], [-0.3, -0.3], [3.0, 3.0]]
    assert math.isclose(log_papangelou(m, (0.0, 0.0), x), math.log(0.25), rel_tol=1e-15)


def test_lennard_jones_single_neighbour():
    theta, r = 0.4, 0.7
    m = LennardJones(1.0, 1.0, theta)
    want = theta**6 * r**-6 - theta**12 * r**-12
    assert math.isclose(log_papangelou(m, (0.0, 0.0), [[r, 0.0]]), want, rel_tol=1e-14)


@pytest.mark.parametrize(
    "m",
    [Poisson(1.5, 1.0), Strauss(1.5, 1.0, 0.3), PiecewiseStrauss(1.5, [0.4, 1.0], [0.2, 0.6]),
     LennardJones(1.5, 1.0, 0.3), Triplets(1.5, 1.0, 0.4)],
)
def test_finite_range(m):
    x = [[3.0, 3.0], [3.5, 3.2], [3.2, 3.6]]
    assert log_papangelou(m, (0.5, 0.5), x) == m.log_beta


def test_hard_core_gives_minus_infinity():
    assert log_papangelou(Strauss(1.0, 1.0, 0.0), (0.0, 0.0), [[0.5, 0.0]]) == -math.inf


def test_pair_potential_values():
    s = Strauss(1.0, 1.0, 0.5)
    assert pair_potential(s, 1.5) == 0.0
    assert math.isclose(pair_potential(s, 0.5), 0.693147, abs_tol=1e-6)
    ps = PiecewiseStrauss(1.0, [0.5, 1.0], [0.3, 0.8])
    assert pair_potential(ps, 0.7) == -math.log(0.8)
    assert pair_potential(ps, 0.5) == -math.log(0.3)
    assert pair_potential(ps, 1.0) == -math.log(0.8)
    assert pair_potential(ps, 1.01) == 0.0
    lj = LennardJones(1.0, 1.0, 0.4)
    assert pair_potential(lj, 0.6) == pytest.approx((0.4 / 0.6) ** 12 - (0.4 / 0.6) ** 6)
    assert pair_potential(lj, 1.2) == 0.0


def test_pair_potential_errors():
    with pytest.raises(UnsupportedModelError):
        pair_potential(Triplets(1.0, 1.0, 0.5), 0.5)
    with pytest.raises(ValueError):
        pair_potential(Strauss(1.0, 1.0, 0.5), 0.0)


def test_multi_point_examples():
    x = np.zeros((0, 2))
    s = Strauss(2.0, 1.0, 0.5)
    u = np.array([1.0, 1.0])
    assert log_papangelou_multi(s, [u], [[1.5, 1.0]]) == log_papangelou(s, u, [[1.5, 1.0]])
    assert log_papangelou_multi(Poisson(2.0), [[0.0, 0.0], [3.0, 3.0]], x) == 2 * math.log(2.0)
    got = log_papangelou_multi(s, [[0.0, 0.0], [0.5, 0.0]], x)
    assert math.isclose(got, 2 * math.log(2.0) + math.log(0.5), rel_tol=1e-15)
    with pytest.raises(ValueError):
        log_papangelou_multi(s, [[0.0, 0.0], [0.0, 0.0]], x)


def test_triplets_counts_new_triangles():
    m = Triplets(1.0, 1.0, 0.5)
    # two mutually close neighbours of u form one triangle with u
    x = [[0.5, 0.0], [0.5, 0.4], [5.0, 5.0]]
    assert math.isclose(log_papangelou(m, (0.0, 0.0), x), math.log(0.5), rel_tol=1e-15)
    assert log_papangelou(m, (0.0, 0.0), [[0.5, 0.0], [-0.9, 0.0]]) == 0.0


def test_monotone_repulsion():
    rng = np.random.default_rng(4)
    for m in (Strauss(1.0, 1.0, 0.4), PiecewiseStrauss(1.0, [0.3, 1.0], [0.5, 0.9]), Triplets(1.0, 1.0, 0.4)):
        for _ in range(50):
            x = rng.uniform(0, 3, (10, 2))
            u = rng.uniform(1, 2, 2)
            v = u + rng.uniform(-0.6, 0.6, 2)
            assert log_papangelou(m, u, np.vstack([x, v])) <= log_papangelou(m, u, x)


@pytest.mark.parametrize(
    "kw",
    [dict(beta=0.0, range=1.0, phi=0.5), dict(beta=1.0, range=-1.0, phi=0.5), dict(beta=1.0, range=1.0, phi=1.5)],
)
def test_strauss_validation(kw):
    with pytest.raises(ConfigError):
        Strauss(**kw)


def test_piecewise_validation():
    with pytest.raises(ConfigError):
        PiecewiseStrauss(1.0, [0.5, 0.4], [0.5, 0.5])
    with pytest.raises(ConfigError):
        PiecewiseStrauss(1.0, [0.5, 1.0], [0.5])
    assert PiecewiseStrauss(1.0, [0.0, 0.5, 1.0], [0.5, 0.7]).range == 1.0


def test_model_from_mapping():
    m = model_from_mapping({"kind": "strauss", "beta": "0.5", "range": "1", "phi": "0.5"})
    assert m == Strauss(0.5, 1.0, 0.5)
    ps = model_from_mapping({"kind": "piecewise_strauss", "beta": 1, "breaks": "0.5, 1.0", "phis": "0.3 0.8"})
    assert ps.breaks == (0.0, 0.5, 1.0)
    assert model_from_mapping({"kind": "poisson", "beta": 2}).beta == 2.0
    for bad in ({"kind": "hardcore", "beta": 1}, {"kind": "strauss", "beta": 1, "range": 1},
                {"kind": "strauss", "beta": 1, "range": 1, "phi": 0.5, "gamma": 2}):
        with pytest.raises(ConfigError):
            model_from_mapping(bad)


def test_lennard_jones_repulsion_flag():
    assert LennardJones(1.0, 0.25, 0.3).is_repulsive()
    # gamma turns negative past theta, which lies inside the range here
    assert not LennardJones(1.0, 1.0, 0.5).is_repulsive()
