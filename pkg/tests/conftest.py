import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from peakmanip.graph import SocialNetwork
from peakmanip.model import Electorate
from peakmanip.scenario import Scenario

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def tiny_network(rng, n_min=3, n_max=8, max_edges=12):
    n = int(rng.integers(n_min, n_max + 1))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    k = int(rng.integers(1, min(max_edges, len(pairs)) + 1))
    idx = rng.choice(len(pairs), k, replace=False)
    return SocialNetwork.from_edges(n, [pairs[i] for i in idx], rng.random(k))


def zero_noise_electorate(rng, n, m):
    cands = rng.uniform(-1, 1, m)
    voters = rng.uniform(-1, 1, n)
    return Electorate(cands, voters, np.broadcast_to(cands, (n, m)), int(rng.integers(m)))


def tiny_scenario(rng, max_edges=12):
    """Zero-noise instance on at most 8 nodes; returns ``(scenario, budget)``."""
    net = tiny_network(rng, max_edges=max_edges)
    electorate = zero_noise_electorate(rng, net.n, int(rng.integers(3, 6)))
    delta = float(rng.choice([0.1, 0.2, 0.3, 0.4]))
    return Scenario(electorate, net, delta), int(rng.integers(1, 3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
