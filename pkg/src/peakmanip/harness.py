"""Experiment grids, replication, aggregation and result files.

Every random choice in a grid is drawn from a stream keyed by the master
seed and the indices of the thing being drawn (placement, graph,
probability set), so any cell can be recomputed alone and execution order
never matters. All algorithms, budgets and deltas of one scenario share the
same cascade stream.
"""

from __future__ import annotations

import csv
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .campaign import GREEDY, CampaignConfig, budget_for, run_campaign, select_seeds
from .errors import ConfigurationError, DataError
from .graph import (
    assign_edge_probabilities_by_community,
    assign_uniform_random_probabilities,
    gen_preferential_attachment,
    gen_watts_strogatz_spatial,
)
from .heuristics import resolve_name
from .model import (
    Electorate,
    choose_target,
    electorate_swap_distance,
    parse_noise,
    random_electorate,
    sample_views,
)
from .scenario import Scenario

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

# stream kinds
_PLACEMENT, _VIEWS, _GRAPH, _PROBS, _CAMPAIGN, _TIMING, _SWAP = range(7)

FAMILIES = ("watts_strogatz", "preferential_attachment")


def stream(seed, *key):
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


@dataclass(frozen=True)
class GraphSpec:
    family: str = "watts_strogatz"
    radius: float = 0.13
    weak_ties_k: int = 2
    exponent_q: float = 2.0
    p_pref: float = 0.25
    directed_weak_ties: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown graph family {self.family!r}")

    def build(self, n, rng):
        if self.family == "watts_strogatz":
            return gen_watts_strogatz_spatial(
                n, rng, self.radius, self.weak_ties_k, self.exponent_q, directed_weak_ties=self.directed_weak_ties
            )
        return gen_preferential_attachment(n, self.p_pref, rng)


@dataclass(frozen=True)
class ExperimentGrid:
    seed: int
    algorithms: tuple = ("SPpagerank1.0_pos",)
    n_voters: tuple = (20,)
    n_candidates: int = 5
    budget_fractions: tuple = (0.05, 0.10, 0.15)
    deltas: tuple = (0.1, 0.3)
    noises: tuple = ("0",)
    target: object = "random"
    placements: int = 8
    graphs: int = 10
    prob_sets: int = 10
    rounds: int = 10
    stop_at_unanimity: bool = True
    graph: GraphSpec = field(default_factory=GraphSpec)
    greedy_runs: int | None = None
    greedy_lazy: bool = False
    workers: int = 1

    def __post_init__(self):
        for name in ("algorithms", "n_voters", "budget_fractions", "deltas", "noises"):
            value = getattr(self, name)
            if isinstance(value, (str, int, float)):
                value = (value,)
            value = tuple(value)
            if not value:
                raise ConfigurationError(f"{name} must not be empty")
            object.__setattr__(self, name, value)
        object.__setattr__(
            self, "algorithms", tuple(a if a == GREEDY else resolve_name(a) for a in self.algorithms)
        )
        for n in self.n_voters:
            if n < 2:
                raise ConfigurationError("electorates need at least two voters")
        if self.n_candidates < 2:
            raise ConfigurationError("need at least two candidates")
        for b in self.budget_fractions:
            budget_for(b, 1)
        for d in self.deltas:
            if not 0 < d <= 2:
                raise ConfigurationError(f"delta must lie in (0, 2], got {d}")
        for noise in self.noises:
            parse_noise(noise)
        if self.target not in ("random", "rightmost"):
            if not isinstance(self.target, int) or not 0 <= self.target < self.n_candidates:
                raise ConfigurationError(f"target must be 'random', 'rightmost' or a candidate id, got {self.target!r}")
        for name in ("placements", "graphs", "prob_sets", "rounds", "workers"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be at least 1")
        if isinstance(self.graph, dict):
            object.__setattr__(self, "graph", _build(GraphSpec, self.graph, "graph"))

    @property
    def scenario_count(self):
        return self.placements * self.graphs * self.prob_sets

    def scenario_keys(self):
        """``(n_voters, noise_index, placement, graph, prob_set)`` in a fixed order."""
        return list(
            itertools.product(
                self.n_voters,
                range(len(self.noises)),
                range(self.placements),
                range(self.graphs),
                range(self.prob_sets),
            )
        )

    def build_scenario(self, n, noise_idx, i, j, k, delta):
        electorate = self.electorate(n, noise_idx, i)
        network = self.graph.build(n, stream(self.seed, n, _GRAPH, j))
        network = assign_uniform_random_probabilities(network, stream(self.seed, n, _PROBS, j, k))
        return Scenario(electorate, network, delta)

    def electorate(self, n, noise_idx, i):
        """Placement ``i`` is shared by every noise; only the views differ."""
        rng = stream(self.seed, n, _PLACEMENT, i)
        candidates = rng.uniform(-1.0, 1.0, self.n_candidates)
        voters = rng.uniform(-1.0, 1.0, n)
        target = choose_target(candidates, self.target, rng)
        noise = parse_noise(self.noises[noise_idx])
        views = sample_views(candidates, n, noise, stream(self.seed, n, _VIEWS, noise_idx, i))
        return Electorate(candidates, voters, views, target)


def _build(cls, table, where):
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(table) - names)
    if unknown:
        raise ConfigurationError(f"unknown key(s) in [{where}]: {', '.join(unknown)}")
    return cls(**table)


def grid_from_mapping(data):
    data = dict(data)
    counts = data.pop("counts", {})
    greedy = data.pop("greedy", {})
    for key in counts:
        if key not in ("placements", "graphs", "prob_sets"):
            raise ConfigurationError(f"unknown key in [counts]: {key}")
    for key in greedy:
        if key not in ("runs", "lazy"):
            raise ConfigurationError(f"unknown key in [greedy]: {key}")
    data.update(counts)
    if "runs" in greedy:
        data["greedy_runs"] = greedy["runs"]
    if "lazy" in greedy:
        data["greedy_lazy"] = greedy["lazy"]
    if "seed" not in data:
        raise ConfigurationError("grid needs a master seed")
    try:
        return _build(ExperimentGrid, data, "top level")
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from None


def load_grid(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    return grid_from_mapping(data)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

CSV_COLUMNS = (
    "algorithm",
    "n_voters",
    "budget_fraction",
    "delta",
    "noise",
    "round",
    "mean",
    "std",
    "time_mean_s",
    "time_std_s",
)


@dataclass(frozen=True)
class ResultRow:
    algorithm: str
    n_voters: int
    budget_fraction: float
    delta: float
    noise: str
    round: int
    mean: float
    std: float
    time_mean_s: float
    time_std_s: float
    mov_mean: float = math.nan

    @property
    def key(self):
        return (self.algorithm, self.n_voters, self.budget_fraction, self.delta, self.noise)


@dataclass
class ResultTable:
    rows: list
    samples: dict = field(default_factory=dict, repr=False)

    def cell(self, algorithm, n_voters, budget_fraction, delta, noise="0"):
        """Rows of one cell ordered by round."""
        key = (algorithm, n_voters, budget_fraction, delta, noise)
        return sorted((r for r in self.rows if r.key == key), key=lambda r: r.round)

    def value(self, algorithm, n_voters, budget_fraction, delta, noise, rnd):
        for r in self.cell(algorithm, n_voters, budget_fraction, delta, noise):
            if r.round == rnd:
                return r.mean
        raise KeyError((algorithm, n_voters, budget_fraction, delta, noise, rnd))


def sample_std(values):
    values = np.asarray(values, dtype=float)
    return float(values.std(ddof=1)) if values.size > 1 else 0.0


def _padded(reports, rounds, attr):
    out = [getattr(r, attr) for r in reports]
    last = out[-1] if out else 0
    return out + [last] * (rounds - len(out))


def _run_scenario(grid, key):
    """All (budget, delta, algorithm) cells of one scenario."""
    n, noise_idx, i, j, k = key
    out = []
    for delta in grid.deltas:
        scenario = grid.build_scenario(n, noise_idx, i, j, k, delta)
        for b in grid.budget_fractions:
            for algorithm in grid.algorithms:
                config = CampaignConfig(
                    algorithm,
                    b,
                    delta,
                    rounds=grid.rounds,
                    stop_at_unanimity=grid.stop_at_unanimity,
                    greedy_runs=grid.greedy_runs,
                    lazy=grid.greedy_lazy,
                )
                reports = run_campaign(scenario, config, stream(grid.seed, n, _CAMPAIGN, noise_idx, i, j, k))
                out.append(
                    (
                        (algorithm, n, b, delta, grid.noises[noise_idx]),
                        _padded(reports, grid.rounds, "normalized_dmov"),
                        _padded(reports, grid.rounds, "mov") if reports else [float("nan")] * grid.rounds,
                        [r.selection_time for r in reports],
                    )
                )
    return out


def _run_scenario_star(args):
    return _run_scenario(*args)


def run_grid(grid, keys=None):
    """Run every scenario of the grid and aggregate per cell and round.

    ``keys`` restricts the run to a subset of :meth:`ExperimentGrid.scenario_keys`.
    """
    keys = grid.scenario_keys() if keys is None else list(keys)
    if grid.workers > 1:
        with ProcessPoolExecutor(grid.workers) as pool:
            chunks = list(pool.map(_run_scenario_star, [(grid, key) for key in keys]))
    else:
        chunks = [_run_scenario(grid, key) for key in keys]
    values, movs, times = {}, {}, {}
    for chunk in chunks:
        for cell, vals, mov, ts in chunk:
            values.setdefault(cell, []).append(vals)
            movs.setdefault(cell, []).append(mov)
            times.setdefault(cell, []).extend(ts)
    rows, samples = [], {}
    for cell in sorted(values, key=_cell_order(grid)):
        per_round = np.asarray(values[cell], dtype=float)
        mov = np.asarray(movs[cell], dtype=float)
        ts = times[cell]
        t_mean = math.fsum(ts) / len(ts) if ts else 0.0
        t_std = sample_std(ts)
        samples[cell] = per_round
        for rnd in range(grid.rounds):
            col = per_round[:, rnd]
            rows.append(
                ResultRow(
                    *cell,
                    round=rnd + 1,
                    mean=math.fsum(col.tolist()) / col.size,
                    std=sample_std(col),
                    time_mean_s=t_mean,
                    time_std_s=t_std,
                    mov_mean=float(np.nanmean(mov[:, rnd])) if np.isfinite(mov[:, rnd]).any() else math.nan,
                )
            )
    return ResultTable(rows, samples)


def _cell_order(grid):
    alg = {a: i for i, a in enumerate(grid.algorithms)}
    noise = {z: i for i, z in enumerate(grid.noises)}

    def key(cell):
        a, n, b, d, z = cell
        return (alg[a], n, b, d, noise[z])

    return key


# ---------------------------------------------------------------------------
# Result files
# ---------------------------------------------------------------------------


def _format_row(r):
    return [
        r.algorithm,
        str(r.n_voters),
        repr(float(r.budget_fraction)),
        repr(float(r.delta)),
        r.noise,
        str(r.round),
        f"{r.mean:.3f}",
        f"{r.std:.3f}",
        f"{r.time_mean_s:.6e}",
        f"{r.time_std_s:.6e}",
    ]


def emit_csv(table, path):
    if not table.rows:
        raise DataError("nothing to write: the result table is empty")
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in table.rows:
                writer.writerow(_format_row(r))
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None


def read_csv(path):
    """Parse a file written by :func:`emit_csv` back into a :class:`ResultTable`."""
    rows = []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if tuple(header or ()) != CSV_COLUMNS:
                raise DataError(f"{path}: unexpected header {header}")
            for lineno, rec in enumerate(reader, 2):
                if len(rec) != len(CSV_COLUMNS):
                    raise DataError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} fields")
                try:
                    rows.append(
                        ResultRow(
                            rec[0],
                            int(rec[1]),
                            float(rec[2]),
                            float(rec[3]),
                            rec[4],
                            int(rec[5]),
                            *map(float, rec[6:]),
                        )
                    )
                except ValueError as exc:
                    raise DataError(f"{path}:{lineno}: {exc}") from None
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    return ResultTable(rows)


PLOT_COLUMNS = ("algorithm", "n_voters", "budget_fraction", "delta", "noise", "round", "metric", "value")


def emit_plot_data(table, path):
    """Long format: one line per (cell, round, metric)."""
    if not table.rows:
        raise DataError("nothing to write: the result table is empty")
    metrics = ("mean", "std", "mov_mean", "time_mean_s")
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(PLOT_COLUMNS)
            for r in table.rows:
                head = _format_row(r)[:6]
                for m in metrics:
                    writer.writerow(head + [m, repr(float(getattr(r, m)))])
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# Timing
# ---------------------------------------------------------------------------


def timing_comparison(scenarios, algorithms, budget_fraction, seed, greedy_runs=None):
    """Mean and sample std of seed-selection wall time, one entry per listed algorithm.

    Returns ``[(algorithm, mean_s, std_s), ...]`` in input order. Only the
    selection call is timed; building scenarios and running cascades are
    excluded.
    """
    if len(algorithms) < 2:
        raise ConfigurationError("timing comparison needs at least two algorithms")
    out = []
    for algorithm in algorithms:
        times = []
        for s_idx, scenario in enumerate(scenarios):
            config = CampaignConfig(algorithm, budget_fraction, scenario.delta, greedy_runs=greedy_runs)
            rng = stream(seed, _TIMING, s_idx)
            t0 = time.perf_counter()
            select_seeds(scenario, config, rng)
            times.append(time.perf_counter() - t0)
        out.append((algorithm, math.fsum(times) / len(times), sample_std(times)))
    return out


def random_scenario(n, seed, index, delta=0.3, noise="0", n_candidates=5, graph=None):
    graph = graph or GraphSpec()
    rng = stream(seed, n, _TIMING, index)
    electorate = random_electorate(n, n_candidates, parse_noise(noise), rng)
    network = assign_uniform_random_probabilities(graph.build(n, rng), rng)
    return Scenario(electorate, network, delta)


def scalability_sweep(sizes, algorithm, seed, repeats=3, inner=5, budget_fraction=0.10, noise="0"):
    """Selection time per size and the log-log slope of time versus n.

    For each size, ``repeats`` fresh scenarios are timed; each scenario keeps
    the best of ``inner`` calls (the usual guard against scheduler noise) and
    the size reports the median over scenarios. Returns ``(sizes, times, slope)``.
    """
    times = []
    for n in sizes:
        per_size = []
        for rep in range(repeats):
            scenario = random_scenario(n, seed, rep, noise=noise)
            config = CampaignConfig(algorithm, budget_fraction, scenario.delta)
            select_seeds(scenario, config, None)  # fills the network's lazy caches
            best = math.inf
            for _ in range(inner):
                t0 = time.perf_counter()
                select_seeds(scenario, config, None)
                best = min(best, time.perf_counter() - t0)
            per_size.append(best)
        times.append(float(np.median(per_size)))
    slope = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    return list(sizes), times, slope


# ---------------------------------------------------------------------------
# Special studies
# ---------------------------------------------------------------------------


def swapdist_study(noises, elections, seed, n_voters=20, n_candidates=5):
    """Per-election mean swap distance to single-peakedness, for each noise.

    The same placements are reused across noises.
    """
    out = {}
    for z_idx, text in enumerate(noises):
        noise = parse_noise(text)
        values = np.empty(elections)
        for e in range(elections):
            rng = stream(seed, _SWAP, e)
            candidates = rng.uniform(-1.0, 1.0, n_candidates)
            voters = rng.uniform(-1.0, 1.0, n_voters)
            views = sample_views(candidates, n_voters, noise, stream(seed, _SWAP, e, z_idx + 1))
            values[e] = electorate_swap_distance(Electorate(candidates, voters, views, 0))
        out[text] = values
    return out


def emit_swapdist(study, path):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("noise", "election", "mean_swap_distance"))
            for noise, values in study.items():
                for e, v in enumerate(values.tolist()):
                    writer.writerow((noise, e, repr(v)))
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None


FACEBOOK_CANDIDATES = (-1.0, -0.5, 0.0, 0.5, 1.0)


def facebook_scenario(net, partition, rng, noise="0", delta=0.1, n_small=7):
    """Community-driven election on a partitioned network.

    Candidates sit at -1, -0.5, 0, 0.5, 1 and the target is the middle one.
    Voters of the ``n_small`` smallest communities start inside
    [-0.25, 0.25]; everybody else starts in [-1, -0.25] or [0.25, 1].
    Edge probabilities come from the community rule.
    """
    labels = partition.labels
    if labels.size != net.n:
        raise DataError(f"partition covers {labels.size} nodes, network has {net.n}")
    sizes = partition.sizes()
    small = np.argsort(sizes, kind="stable")[:n_small]
    inner = np.isin(labels, small)
    positions = np.where(
        inner,
        rng.uniform(-0.25, 0.25, net.n),
        rng.choice([-1.0, 1.0], net.n) * rng.uniform(0.25, 1.0, net.n),
    )
    candidates = np.array(FACEBOOK_CANDIDATES)
    views = sample_views(candidates, net.n, parse_noise(noise), rng)
    electorate = Electorate(candidates, positions, views, 2)
    network = assign_edge_probabilities_by_community(net, partition, rng)
    return Scenario(electorate, network, delta)
