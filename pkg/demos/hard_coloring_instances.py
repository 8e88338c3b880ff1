"""Learning to sample graphs that are hard for a 3-coloring backtracker.

The hardness of a graph is the number of recursive calls DSATUR needs to
decide 3-colorability. We first find the edge probability at which plain
Erdos-Renyi graphs are hardest, then train a sampler starting from that
density and compare its hardest find against random search on the same
budget.

Run with ``python demos/hard_coloring_instances.py``; it takes two to three minutes.
"""

import numpy as np

from hardsmith import CounterEvaluator, PolicyConfig, TrainConfig, calibrate_pstar, train
from hardsmith.baselines import random_search

N = 30
BUDGET = 3000
CAP = 10**6

# %% Where are random graphs hardest?
# Sparse graphs color greedily and dense ones contain a K4 almost at once; the
# interesting region sits in between.
evaluator = CounterEvaluator("dsatur3", max_calls=CAP)
grid = np.round(np.arange(0.05, 0.31, 0.01), 2)
calib = calibrate_pstar(N, evaluator, grid, samples_per_point=50, rng=0)
for p, h in zip(calib.grid, calib.hardest):
    print(f"p={p:.3f}  hardest of 50 samples: {h:8.0f} calls")
print(f"p* = {calib.p_star}")

# %% Random search at p*
baseline = random_search(N, calib.p_star, BUDGET, evaluator, rng=1)
print(f"random search, {BUDGET} graphs: hardest {baseline.best_reward:.0f} calls")

# %% Train the sampler with prioritized replay
# Calls are capped at one million per evaluation so a single monster
# instance cannot stall the run; reaching the cap means the sampler found a
# graph at least that hard.
cfg = TrainConfig(PolicyConfig(N, init_edge_prob=calib.p_star), budget=BUDGET, mode="per",
                  seed=0)
params, log = train(cfg, evaluator)
print(f"sampler, {BUDGET} evaluations: hardest {log.best_reward:.0f} calls "
      f"(iteration {log.best_iteration})")

# %% How the search progressed
for k in range(0, BUDGET, BUDGET // 10):
    window = log.rewards[k:k + BUDGET // 10]
    print(f"iterations {k:5d}+: mean {window.mean():10.1f}   best so far "
          f"{log.records[min(k + BUDGET // 10, BUDGET) - 1].best_so_far:10.0f}")
