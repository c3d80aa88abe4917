"""Greedy seed selection with a constant-factor guarantee, and exact oracles.

The manipulator marks every voter it believes would switch to the target
after one message (the manipulable set) with weight 1, then greedily
maximises the expected number of reached weight-1 voters. Expected values
come either from Monte Carlo cascades or, on tiny graphs, from the exact
live-graph table.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .diffusion import LiveGraphTable, simulate_ic
from .errors import CapabilityError, ConfigurationError
from .estimation import estimate_sigma_w, sims_for_sigma
from .model import apply_influence, predicted_votes, preferences

BRUTE_FORCE_LIMIT = 10**7


@dataclass(frozen=True, eq=False)
class ManipulableSet:
    """``members``: voters predicted to switch to the target after one message.

    ``switch_to[c]`` lists the voters predicted to switch to opponent ``c``
    instead.
    """

    members: np.ndarray
    switch_to: dict
    predicted: np.ndarray

    def weights(self, n):
        w = np.zeros(n)
        w[self.members] = 1.0
        return w


def manipulable_set(electorate, delta):
    """Classify voters using the true candidate positions, as the manipulator sees them."""
    target = electorate.target
    before = predicted_votes(electorate)
    moved = apply_influence(electorate.voters, electorate.candidates[target], delta)
    views = np.broadcast_to(electorate.candidates, electorate.views.shape)
    # sticky tie-break keeps the predicted vote
    after = preferences(moved, views, hints=before)
    changed = after != before
    members = np.flatnonzero(changed & (after == target))
    switch_to = {
        c: np.flatnonzero(changed & (after == c))
        for c in range(electorate.n_candidates)
        if c != target
    }
    return ManipulableSet(members, switch_to, before)


def greedy_maximize(objective, ground, budget, lazy=False):
    """Hill climbing on a set function; returns ``(seeds, marginal_gains)``.

    Each step adds the element with the largest marginal gain, smallest id on
    ties. ``lazy`` switches to CELF-style re-evaluation, which only pays off
    for submodular objectives.
    """
    ground = sorted(int(v) for v in ground)
    budget = min(budget, len(ground))
    seeds, gains = [], []
    current = objective([]) if budget else 0.0
    if not lazy:
        remaining = list(ground)
        for _ in range(budget):
            best_v, best_val = None, -math.inf
            for v in remaining:
                val = objective(seeds + [v])
                if val > best_val:
                    best_v, best_val = v, val
            seeds.append(best_v)
            gains.append(best_val - current)
            current = best_val
            remaining.remove(best_v)
        return seeds, gains

    heap = [(-math.inf, v, -1) for v in ground]
    heapq.heapify(heap)
    while len(seeds) < budget:
        neg_gain, v, stamp = heapq.heappop(heap)
        if stamp == len(seeds):
            seeds.append(v)
            gains.append(-neg_gain)
            current += -neg_gain
            continue
        gain = objective(seeds + [v]) - current
        heapq.heappush(heap, (-gain, v, len(seeds)))
    return seeds, gains


def greedy_seed_selection(net, weights, budget, runs=None, rng=None, table=None, lazy=False):
    """Pick ``min(budget, n)`` seeds maximising the expected reached weight.

    With ``table`` (a :class:`LiveGraphTable`) the objective is exact,
    otherwise it is a Monte Carlo mean of ``runs`` cascades.
    """
    if budget < 1:
        raise ConfigurationError("budget must be at least 1")
    weights = np.asarray(weights, dtype=float)
    if table is not None:
        def objective(seeds):
            return table.weighted_reach(seeds, weights)
    else:
        if runs is None:
            runs = sims_for_sigma(1)

        def objective(seeds):
            return estimate_sigma_w(net, weights, seeds, runs, rng)

    seeds, _ = greedy_maximize(objective, range(net.n), budget, lazy=lazy)
    return seeds


def greedy_apx(scenario, budget, rng, runs=None, lazy=False):
    """The approximation algorithm on a scenario: weights from the manipulable set."""
    mset = manipulable_set(scenario.electorate, scenario.delta)
    weights = mset.weights(scenario.network.n)
    return greedy_seed_selection(scenario.network, weights, budget, runs=runs, rng=rng, lazy=lazy)


def _collateral(scenario, mset):
    n = scenario.network.n
    indicator = np.zeros((len(mset.switch_to), n))
    for row, voters in enumerate(mset.switch_to.values()):
        indicator[row, voters] = 1.0
    return indicator


def x_of_s(scenario, seeds, runs, rng):
    """Monte Carlo estimate of the expected largest collateral gain of an opponent."""
    if not len(seeds):
        return 0.0
    mset = manipulable_set(scenario.electorate, scenario.delta)
    indicator = _collateral(scenario, mset)
    if not indicator.any():
        return 0.0
    total = []
    for _ in range(runs):
        hit = list(simulate_ic(scenario.network, seeds, rng).activated)
        total.append(indicator[:, hit].sum(axis=1).max())
    return math.fsum(total) / runs


def exact_x_of_s(scenario, seeds, table=None):
    if table is None:
        table = LiveGraphTable(scenario.network)
    mset = manipulable_set(scenario.electorate, scenario.delta)
    indicator = _collateral(scenario, mset)
    if not len(seeds) or not indicator.any():
        return 0.0
    return table.expectation(seeds, lambda hit: indicator[:, hit].sum(axis=1).max())


def brute_force_optimal(scenario, budget, table=None, limit=BRUTE_FORCE_LIMIT):
    """Seed set of size at most ``budget`` with the largest exact expected margin change.

    Returns ``(seeds, value)``; among equal values the first set in
    size-then-lexicographic order wins.
    """
    n = scenario.network.n
    budget = min(budget, n)
    n_sets = sum(math.comb(n, k) for k in range(budget + 1))
    if n_sets * 2**scenario.network.n_edges > limit:
        raise CapabilityError(f"{n_sets} seed sets x 2^{scenario.network.n_edges} live graphs exceed {limit}")
    if budget <= 0:
        return (), 0.0
    if table is None:
        table = LiveGraphTable(scenario.network)
    cache = {}

    def value(hit):
        key = tuple(hit)
        if key not in cache:
            cache[key] = scenario.dmov_of(hit)
        return cache[key]

    best, best_val = (), 0.0
    for k in range(1, budget + 1):
        for seeds in itertools.combinations(range(n), k):
            val = table.expectation(seeds, value)
            if val > best_val + 1e-12:
                best, best_val = seeds, val
    return best, best_val
