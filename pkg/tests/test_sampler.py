import math

import numpy as np
import pytest
from scipy import stats

from pairpot import ConfigError, Poisson, Strauss, Triplets
from pairpot.errors import ResourceError
from pairpot.sampler import (
    ChainConfig,
    chain_rng,
    gnz_pair_terms,
    gnz_report,
    gnz_residual,
    gnz_terms,
    log_papangelou_field,
    run_birth_death,
    run_chain,
    sample_poisson,
    simulate_many,
)
from pairpot.models import log_papangelou
from pairpot.spatial import PointPattern, Window


def test_sample_poisson_counts():
    W = Window(2, 10.0)
    n = np.array([len(sample_poisson(W, 0.5, chain_rng(1, k))) for k in range(400)])
    assert abs(n.mean() - 50.0) < 4 * math.sqrt(50.0 / 400)
    assert len(sample_poisson(W, 0.0, 3)) == 0
    with pytest.raises(ValueError):
        sample_poisson(W, -1.0, 3)
    with pytest.raises(ResourceError):
        sample_poisson(Window(3, 1000.0), 1000.0, 3)


def test_chain_config_validation():
    for kw in (dict(steps=10, burn_in=10), dict(steps=0, burn_in=1), dict(steps=10, burn_in=5, initial="grid"),
               dict(steps=10, burn_in=5, boundary="mirror"), dict(steps=10, burn_in=5, seed=-1)):
        with pytest.raises(ConfigError):
            ChainConfig(**kw)
    c = ChainConfig.default(Strauss(0.5, 1.0, 0.5), Window(2, 10.0), seed=4)
    assert (c.burn_in, c.steps) == (500, 1000)
    assert c.for_chain(0).seed != c.for_chain(1).seed


def test_chain_is_deterministic():
    m, W = Strauss(1.0, 1.0, 0.5), Window(2, 8.0)
    cfg = ChainConfig.default(m, W, seed=9)
    a, b = run_birth_death(m, W, cfg), run_birth_death(m, W, cfg)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, run_birth_death(m, W, cfg.for_chain(1)).points)


def test_chain_without_interaction_matches_poisson_counts():
    m, W = Poisson(1.0, 1.0), Window(2, 5.0)
    cfg = ChainConfig.default(m, W, seed=12)
    chains = [len(x) for x in simulate_many(m, W, cfg, 150)]
    exact = [len(sample_poisson(W, 1.0, chain_rng(13, k))) for k in range(150)]
    assert stats.ks_2samp(chains, exact).pvalue > 1e-3
    assert abs(np.mean(chains) - 25.0) < 4 * math.sqrt(25.0 / 150)


def test_strauss_phi_one_is_poisson_and_repulsion_thins():
    W = Window(2, 8.0)
    free = Strauss(0.5, 1.0, 1.0)
    cfg = ChainConfig.default(free, W, seed=21)
    n1 = np.array([len(x) for x in simulate_many(free, W, cfg, 100)])
    assert abs(n1.mean() - 32.0) < 4 * math.sqrt(32.0 / 100)
    n2 = np.array([len(x) for x in simulate_many(Strauss(0.5, 1.0, 0.5), W, cfg, 100)])
    assert n2.mean() < n1.mean() - 4 * n1.std() / 10


def test_count_distribution_in_a_fully_interacting_window():
    # every pair interacts, so P(N = n) is proportional to (beta |W|)^n phi^(n choose 2) / n!
    m, W = Strauss(4.0, 1.0, 0.5), Window(2, 0.5)
    _, counts = run_chain(m, W, ChainConfig(400_000, 1000, seed=3), record_counts=True)
    emp = np.bincount(counts, minlength=4)[:4] / len(counts)
    w = np.array([0.5 ** (n * (n - 1) / 2) / math.factorial(n) for n in range(12)])
    assert np.allclose(emp, (w / w.sum())[:4], atol=0.01)


def test_torus():
    m, W = Strauss(0.5, 1.0, 0.5), Window(2, 6.0)
    x = run_birth_death(m, W, ChainConfig.default(m, W, seed=5, boundary="torus"))
    assert len(x) > 0
    with pytest.raises(ConfigError):
        run_birth_death(m, Window(2, 2.0), ChainConfig(10, 5, boundary="torus"))
    # a point near one edge sees its neighbour across the opposite edge
    pts = np.array([[0.1, 3.0]])
    y = PointPattern(W, pts)
    q = np.array([[5.8, 3.0]])
    assert log_papangelou_field(m, q, y, "torus")[0] == pytest.approx(math.log(0.25))
    assert log_papangelou_field(m, q, y, "free")[0] == pytest.approx(math.log(0.5))


def test_field_matches_pointwise_intensity():
    rng = np.random.default_rng(8)
    W = Window(2, 6.0)
    x = PointPattern(W, rng.uniform(0, 6, (40, 2)))
    q = rng.uniform(0, 6, (30, 2))
    for m in (Strauss(1.0, 1.0, 0.3), Triplets(1.0, 1.0, 0.5)):
        got = log_papangelou_field(m, q, x)
        want = [log_papangelou(m, u, x.points) for u in q]
        assert np.allclose(got, want, rtol=1e-12)


def test_gnz_edge_cases():
    W = Window(2, 5.0)
    x = PointPattern(W, [[1.0, 1.0]])
    assert gnz_terms(Strauss(1.0, 1.0, 0.5), x, box=(2.0, 2.0)) == (0.0, 0.0)
    assert gnz_pair_terms(Strauss(1.0, 1.0, 0.5), x, box=(2.0, 2.0)) == (0.0, 0.0)
    with pytest.raises(ConfigError):
        gnz_terms(Strauss(1.0, 1.0, 0.5), x, box=(-1.0, 2.0))
    with pytest.raises(ConfigError):
        gnz_report([])
    with pytest.raises(ConfigError):
        gnz_residual(Strauss(1.0, 1.0, 0.5), W, 0, ChainConfig(10, 5))
    rep = gnz_report([(1.0, 1.0), (2.0, 2.0)])
    assert rep.z_score == 0.0 and rep.n_chains == 2


def test_gnz_poisson_indicator_is_exact_on_the_integral_side():
    W = Window(2, 4.0)
    x = PointPattern(W, [[1.0, 1.0], [2.0, 3.0]])
    lhs, rhs = gnz_terms(Poisson(0.7), x)
    assert lhs == 2.0 and rhs == pytest.approx(0.7 * 16.0)


def test_small_gnz_residual_is_centred():
    m, W = Strauss(0.5, 1.0, 0.5), Window(2, 8.0)
    rep = gnz_residual(m, W, 60, ChainConfig.default(m, W, seed=31), grid_res=32)
    assert abs(rep.z_score) < 4
