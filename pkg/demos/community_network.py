"""
A campaign on a network with communities
========================================

Pass an undirected edge list and a ``node community`` file to run on real
data, for example a social-circles snapshot and its detected communities:

    python3 demos/community_network.py edges.txt communities.txt

Without arguments a synthetic stand-in is used: a preferential-attachment
graph cut into communities by node id. Candidates sit at -1, -0.5, 0, 0.5
and 1; the centre candidate is the target and the smallest communities are
its natural base. Ties inside a community are strong, ties across are weak.
"""

import sys

import numpy as np

from peakmanip import harness
from peakmanip.campaign import CampaignConfig, run_campaign
from peakmanip.graph import Partition, gen_preferential_attachment, load_edge_list, load_partition

rng = np.random.default_rng(3)
if len(sys.argv) == 3:
    net = load_edge_list(sys.argv[1])
    partition = load_partition(sys.argv[2], net.n)
else:
    net = gen_preferential_attachment(600, 0.5, rng)
    sizes = [10, 12, 15, 20, 25, 30, 38, 90, 110, 120, 130]
    partition = Partition(np.repeat(np.arange(len(sizes)), sizes))

print(f"{net.n} nodes, {net.n_edges} directed edges, community sizes {sorted(partition.sizes().tolist())}")
scenario = harness.facebook_scenario(net, partition, rng, noise="N(0;0.08)", delta=0.1)

for alg in ("SPoutdeg", "SPpagerank1.0_pos"):
    config = CampaignConfig(alg, budget_fraction=0.01, delta=0.1, rounds=5)
    reports = run_campaign(scenario, config, np.random.default_rng(4))
    gains = " ".join(f"{r.normalized_dmov:.3f}" for r in reports)
    print(f"{alg:20s} normalized gain by round: {gains}")
