"""Command line entry point: ``peakmanip <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 capability error,
4 I/O or parse error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness
from .campaign import GREEDY, CampaignConfig, run_campaign
from .errors import ConfigurationError, ManipError
from .graph import load_edge_list, load_partition, save_edge_list
from .heuristics import CATALOG
from .model import random_electorate, parse_noise, save_electorate

log = logging.getLogger("peakmanip")


def _grid_overrides(args):
    out = {}
    for key in ("algorithms", "n_voters", "budget_fractions", "deltas", "noises"):
        value = getattr(args, key)
        if value:
            out[key] = tuple(value)
    for key in ("n_candidates", "rounds", "placements", "graphs", "prob_sets", "workers"):
        value = getattr(args, key)
        if value is not None:
            out[key] = value
    if args.target is not None:
        out["target"] = int(args.target) if args.target.isdigit() else args.target
    return out


def cmd_run(args):
    data = {}
    if args.config:
        grid = harness.load_grid(args.config)
        data = {f: getattr(grid, f) for f in harness.ExperimentGrid.__dataclass_fields__}
    data.update(_grid_overrides(args))
    data["seed"] = args.seed
    grid = harness.ExperimentGrid(**data)
    log.info("running %d scenarios x %d algorithms", grid.scenario_count * len(grid.n_voters) * len(grid.noises), len(grid.algorithms))
    table = harness.run_grid(grid)
    harness.emit_csv(table, args.out)
    if args.plot_data:
        harness.emit_plot_data(table, args.plot_data)
    return 0


def cmd_generate(args):
    rng = np.random.default_rng(args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = harness.GraphSpec(family=args.family, p_pref=args.p_pref)
    for i in range(args.count):
        net = harness.assign_uniform_random_probabilities(spec.build(args.n, rng), rng)
        save_edge_list(net, out / f"graph_{i}.txt")
        target = int(args.target) if args.target.isdigit() else args.target
        electorate = random_electorate(args.n, args.n_candidates, parse_noise(args.noise), rng, target)
        save_electorate(electorate, out / f"electorate_{i}.txt")
    return 0


def cmd_campaign(args):
    from .model import load_electorate
    from .scenario import Scenario

    rng = np.random.default_rng(args.seed)
    if args.partition:
        if not args.graph:
            raise ConfigurationError("--partition needs --graph")
        net = load_edge_list(args.graph)
        scenario = harness.facebook_scenario(net, load_partition(args.partition, net.n), rng, args.noise, args.delta)
    elif args.graph and args.electorate:
        scenario = Scenario(load_electorate(args.electorate), load_edge_list(args.graph), args.delta)
    elif args.graph or args.electorate:
        raise ConfigurationError("give both --graph and --electorate, or neither")
    else:
        scenario = harness.random_scenario(args.n, args.seed, 0, args.delta, args.noise)
    config = CampaignConfig(args.algorithm, args.budget_fraction, args.delta, rounds=args.rounds)
    print("round,seeds,activated,tally,mov,dmov,normalized_dmov,selection_s")
    for r in run_campaign(scenario, config, rng):
        seeds = " ".join(map(str, r.seeds))
        tally = " ".join(map(str, r.tally))
        print(f"{r.round},{seeds},{r.activated},{tally},{r.mov},{r.cumulative_dmov},{r.normalized_dmov:.3f},{r.selection_time:.6f}")
    return 0


def cmd_bench(args):
    scenarios = [harness.random_scenario(args.n, args.seed, i, args.delta) for i in range(args.instances)]
    results = harness.timing_comparison(scenarios, args.algorithms, args.budget_fraction, args.seed)
    print("algorithm,time_mean_s,time_std_s")
    for name, mean, std in results:
        print(f"{name},{mean:.6e},{std:.6e}")
    if args.sweep:
        sizes, times, slope = harness.scalability_sweep(args.sweep, args.algorithms[-1], args.seed)
        print("n,time_s")
        for n, t in zip(sizes, times):
            print(f"{n},{t:.6e}")
        print(f"# log-log slope {slope:.3f}")
    return 0


def cmd_swapdist(args):
    study = harness.swapdist_study(args.noises, args.elections, args.seed, args.n, args.n_candidates)
    if args.out:
        harness.emit_swapdist(study, args.out)
    print("noise,mean,std")
    for noise, values in study.items():
        print(f"{noise},{values.mean():.4f},{values.std():.4f}")
    return 0


def build_parser():
    algorithms = ", ".join([GREEDY, *CATALOG])
    p = argparse.ArgumentParser(prog="peakmanip", description="Election manipulation through social influence.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment grid and write a CSV")
    r.add_argument("config", nargs="?", help="TOML grid file")
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--plot-data")
    r.add_argument("--algorithms", nargs="+", help=algorithms)
    r.add_argument("--n-voters", nargs="+", type=int)
    r.add_argument("--budget-fractions", nargs="+", type=float)
    r.add_argument("--deltas", nargs="+", type=float)
    r.add_argument("--noises", nargs="+")
    r.add_argument("--n-candidates", type=int)
    r.add_argument("--rounds", type=int)
    r.add_argument("--placements", type=int)
    r.add_argument("--graphs", type=int)
    r.add_argument("--prob-sets", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--target")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("generate", help="write random graphs and electorates")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out-dir", required=True)
    g.add_argument("--n", type=int, default=20)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--family", default="watts_strogatz", choices=harness.FAMILIES)
    g.add_argument("--p-pref", type=float, default=0.25)
    g.add_argument("--n-candidates", type=int, default=5)
    g.add_argument("--noise", default="0")
    g.add_argument("--target", default="random")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("campaign", help="run one campaign and print round reports")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--algorithm", default="SPpagerank1.0_pos", help=algorithms)
    c.add_argument("--n", type=int, default=20)
    c.add_argument("--graph")
    c.add_argument("--electorate")
    c.add_argument("--partition")
    c.add_argument("--noise", default="0")
    c.add_argument("--delta", type=float, default=0.3)
    c.add_argument("--budget-fraction", type=float, default=0.10)
    c.add_argument("--rounds", type=int, default=10)
    c.set_defaults(func=cmd_campaign)

    b = sub.add_parser("bench", help="time seed selection")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--algorithms", nargs="+", default=[GREEDY, "SPpagerank1.0_pos"])
    b.add_argument("--n", type=int, default=20)
    b.add_argument("--instances", type=int, default=5)
    b.add_argument("--delta", type=float, default=0.3)
    b.add_argument("--budget-fraction", type=float, default=0.10)
    b.add_argument("--sweep", nargs="+", type=int, help="sizes for a scalability sweep of the last algorithm")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("swapdist", help="swap distance to single-peakedness versus noise")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noises", nargs="+", default=["0", "N(0;0.08)", "N(0;1)"])
    s.add_argument("--elections", type=int, default=1000)
    s.add_argument("--n", type=int, default=20)
    s.add_argument("--n-candidates", type=int, default=5)
    s.add_argument("--out")
    s.set_defaults(func=cmd_swapdist)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ManipError as exc:
        print(f"peakmanip: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"peakmanip: error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
