"""
One election, one network, ten rounds
=====================================

A 20-voter electorate on a spatial small world. We look at who the
manipulator thinks can be won over, then run a campaign with the PageRank
heuristic and print the tally after every round.
"""

import numpy as np

from peakmanip import harness
from peakmanip.campaign import CampaignConfig, run_campaign
from peakmanip.greedy import manipulable_set
from peakmanip.model import margin_of_victory, tally

scenario = harness.random_scenario(20, seed=7, index=0, delta=0.3, noise="N(0;0.08)")
e = scenario.electorate
print("candidates:", np.round(e.candidates, 2), "target:", e.target)
print("initial tally:", tally(e).tolist(), "margin:", margin_of_victory(tally(e), e.target))

# voters one message away from switching, judged from true positions
mset = manipulable_set(e, scenario.delta)
print("manipulable voters:", mset.members.tolist())
for c, voters in mset.switch_to.items():
    if voters.size:
        print(f"  would drift to candidate {c} instead:", voters.tolist())

config = CampaignConfig("SPpagerank1.0_pos", budget_fraction=0.10, delta=0.3)
for r in run_campaign(scenario, config, np.random.default_rng(1)):
    print(f"round {r.round:2d}  seeds {list(r.seeds)}  reached {r.activated:2d}  "
          f"tally {list(r.tally)}  normalized gain {r.normalized_dmov:.3f}")
