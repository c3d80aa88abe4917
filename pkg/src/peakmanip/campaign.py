"""Multi-round manipulation campaigns.

Each round picks seeds on the current electorate, runs one cascade, moves
every activated voter towards its view of the target and re-tallies.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .diffusion import simulate_ic
from .errors import ConfigurationError
from .greedy import greedy_apx
from .heuristics import resolve_name, run_named_heuristic
from .model import margin_of_victory, max_delta_mov, tally

GREEDY = "greedy-apx"


def budget_for(budget_fraction, n_voters):
    """Seeds per round: ``floor(fraction * n)`` but never fewer than one."""
    if not 0 < budget_fraction <= 1:
        raise ConfigurationError(f"budget fraction must lie in (0, 1], got {budget_fraction}")
    # guard against 0.15 * 20 = 2.9999999999999996
    return max(1, math.floor(budget_fraction * n_voters + 1e-9))


@dataclass(frozen=True)
class CampaignConfig:
    algorithm: str
    budget_fraction: float
    delta: float
    rounds: int = 10
    stop_at_unanimity: bool = True
    greedy_runs: int | None = None
    lazy: bool = False

    def __post_init__(self):
        if self.algorithm != GREEDY:
            object.__setattr__(self, "algorithm", resolve_name(self.algorithm))
        budget_for(self.budget_fraction, 1)
        if self.rounds < 1:
            raise ConfigurationError("rounds must be at least 1")
        if not 0 < self.delta <= 2:
            raise ConfigurationError(f"delta must lie in (0, 2], got {self.delta}")


@dataclass(frozen=True)
class RoundReport:
    round: int
    seeds: tuple
    activated: int
    tally: tuple
    mov: int
    cumulative_dmov: int
    normalized_dmov: float
    selection_time: float


@dataclass(frozen=True, eq=False)
class CampaignState:
    scenario: object
    initial_mov: int
    max_gain: int
    round: int = 0

    @classmethod
    def start(cls, scenario):
        votes = tally(scenario.electorate)
        return cls(scenario, margin_of_victory(votes, scenario.target), max_delta_mov(votes, scenario.target))

    @property
    def unanimous(self):
        e = self.scenario.electorate
        return bool(np.all(e.votes == e.target))


def select_seeds(scenario, config, rng):
    budget = budget_for(config.budget_fraction, scenario.network.n)
    if config.algorithm == GREEDY:
        return greedy_apx(scenario, budget, rng, runs=config.greedy_runs, lazy=config.lazy)
    return run_named_heuristic(config.algorithm, scenario, budget)


def run_round(state, config, select_rng, diffusion_rng=None):
    """One round; returns ``(new_state, report)``.

    ``diffusion_rng`` defaults to ``select_rng``. Keeping them apart lets
    several algorithms share the same cascade coins.
    """
    if diffusion_rng is None:
        diffusion_rng = select_rng
    scenario = state.scenario
    t0 = time.perf_counter()
    seeds = select_seeds(scenario, config, select_rng)
    elapsed = time.perf_counter() - t0
    hit = simulate_ic(scenario.network, seeds, diffusion_rng).activated
    after = scenario.with_electorate(scenario.influenced(hit))
    votes = tally(after.electorate)
    mov = margin_of_victory(votes, after.target)
    gain = mov - state.initial_mov
    report = RoundReport(
        round=state.round + 1,
        seeds=tuple(int(s) for s in seeds),
        activated=len(hit),
        tally=tuple(int(c) for c in votes),
        mov=mov,
        cumulative_dmov=gain,
        normalized_dmov=gain / state.max_gain if state.max_gain else 0.0,
        selection_time=elapsed,
    )
    new_state = CampaignState(after, state.initial_mov, state.max_gain, state.round + 1)
    return new_state, report


def run_campaign(scenario, config, rng):
    """Up to ``config.rounds`` rounds; stops early at unanimity when configured.

    ``rng`` is split into a selection stream and a cascade stream.
    """
    select_rng, diffusion_rng = rng.spawn(2)
    state = CampaignState.start(scenario)
    reports = []
    for _ in range(config.rounds):
        if config.stop_at_unanimity and state.unanimous:
            break
        state, report = run_round(state, config, select_rng, diffusion_rng)
        reports.append(report)
    return reports
