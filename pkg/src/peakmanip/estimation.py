"""Monte Carlo estimators and the run counts that make them reliable.

Both run-count rules come from Hoeffding's inequality for variables confined
to a range of width ``b - a``: with ``((b - a) / epsilon)**2 * ln(1 / lam)``
runs the sample mean is within ``epsilon`` of the truth with probability at
least ``1 - 2 * lam**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffusion import LiveGraphTable, simulate_ic
from .errors import ConfigurationError
from .model import best_opponent, max_delta_mov, tally

#: Run count used throughout the experiments: 300 runs.
DEFAULT_EPSILON = 0.05 * math.sqrt(2)
DEFAULT_LAMBDA = math.sqrt(0.05)


@dataclass(frozen=True)
class SampleBudget:
    runs: int
    epsilon: float
    lam: float

    def __post_init__(self):
        _check(self.epsilon, self.lam)
        if self.runs < 1:
            raise ConfigurationError("need at least one run")

    @property
    def failure_probability(self):
        return 2 * self.lam**2


def _check(epsilon, lam):
    if not epsilon > 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    if not 0 < lam < 1:
        raise ConfigurationError(f"lambda must lie in (0, 1), got {lam}")


def hoeffding_runs(value_range, epsilon, lam):
    """Real-valued run count ``(value_range / epsilon)**2 * ln(1 / lam)``."""
    _check(epsilon, lam)
    return (value_range / epsilon) ** 2 * math.log(1.0 / lam)


def sims_for_sigma(n_weighted, epsilon=DEFAULT_EPSILON, lam=DEFAULT_LAMBDA):
    """Runs needed for a relative ``epsilon`` estimate of a 0/1-weighted spread.

    ``n_weighted`` is the number of nodes carrying weight 1.
    """
    if n_weighted < 1:
        raise ConfigurationError("need at least one weighted node")
    return max(1, math.ceil(hoeffding_runs(n_weighted, epsilon, lam)))


def sims_for_dmov(n_voters, votes_target, votes_best_opponent, epsilon, lam=DEFAULT_LAMBDA):
    """Runs needed for an additive ``epsilon`` estimate of the expected margin change."""
    if not (0 <= votes_target <= n_voters and 0 <= votes_best_opponent <= n_voters):
        raise ConfigurationError("vote counts must lie in [0, n_voters]")
    if votes_target + votes_best_opponent > n_voters:
        raise ConfigurationError("vote counts exceed the electorate")
    span = n_voters - votes_target + votes_best_opponent
    return max(1, math.ceil(hoeffding_runs(span, epsilon, lam)))


def estimate_sigma_w(net, weights, seeds, runs, rng):
    """Mean total weight of activated nodes over ``runs`` cascades."""
    weights = np.asarray(weights, dtype=float)
    if not weights.any() or not len(seeds):
        return 0.0
    totals = []
    for _ in range(runs):
        hit = simulate_ic(net, seeds, rng).activated
        totals.append(weights[list(hit)].sum())
    return math.fsum(totals) / runs


def estimate_dmov(scenario, seeds, runs, rng):
    """Sample mean and standard deviation of the margin change.

    Every run diffuses from ``seeds``, moves the activated voters, re-tallies
    and compares with the untouched electorate.
    """
    if not len(seeds):
        return 0.0, 0.0
    values = np.array(
        [scenario.dmov_of(simulate_ic(scenario.network, seeds, rng).activated) for _ in range(runs)],
        dtype=float,
    )
    mean = math.fsum(values.tolist()) / runs
    return mean, float(values.std())


def dmov_range(electorate):
    """Upper end of the per-run margin change, ``|V| - |V_target| + |V_best|``."""
    return max_delta_mov(tally(electorate), electorate.target)


def dmov_runs(scenario, epsilon=0.05, lam=DEFAULT_LAMBDA):
    votes = tally(scenario.electorate)
    target = scenario.target
    return sims_for_dmov(scenario.electorate.n_voters, votes[target], votes[best_opponent(votes, target)], epsilon, lam)


# exact counterparts on enumerable graphs


def exact_sigma_w(net, weights, seeds, table=None):
    if table is None:
        table = LiveGraphTable(net)
    return table.weighted_reach(seeds, weights)


def exact_dmov(scenario, seeds, table=None):
    if table is None:
        table = LiveGraphTable(scenario.network)
    return table.expectation(seeds, scenario.dmov_of)
