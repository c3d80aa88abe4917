"""
How far noisy views drift from single-peakedness
================================================

Without noise every voter ranks candidates by distance along one axis, so
rankings are single-peaked. Noisy views break that; the swap distance counts
how many adjacent swaps separate a ranking from the nearest single-peaked one.
"""

import numpy as np

from peakmanip import harness

noises = ["0", "U(-0.2;0.2)", "N(0;0.08)", "N(0;1)", "0.5*N(-0.7;1)+0.5*N(0.7;1)"]
study = harness.swapdist_study(noises, elections=300, seed=5)

for noise, values in study.items():
    hist = np.bincount(np.minimum(np.round(values).astype(int), 4), minlength=5)
    print(f"{noise:28s} mean {values.mean():.3f}  std {values.std():.3f}  rounded histogram 0..4+ {hist.tolist()}")

# the same placements under more noise: what does it do to a campaign?
grid = harness.ExperimentGrid(
    seed=5, noises=("0", "N(0;0.08)", "N(0;1)"), budget_fractions=(0.10,), deltas=(0.3,),
    target="rightmost", placements=4, graphs=5, prob_sets=2,
)
table = harness.run_grid(grid)
for noise in grid.noises:
    print(f"noise {noise:10s} round-10 gain {table.value('SPpagerank1.0_pos', 20, 0.10, 0.3, noise, 10):.3f}")
