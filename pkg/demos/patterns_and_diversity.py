"""What do the learned hard instances look like?

After a short training run we draw fresh graphs from the frozen policy and
ask two questions: how different are they from the single hardest graph
found during training (Jaccard index of edge sets), and which small
connected subgraphs appear in nearly all of them.
"""

import numpy as np

from hardsmith import CounterEvaluator, PolicyConfig, TrainConfig, train
from hardsmith.analysis import diversity_report, mine_frequent_subgraphs
from hardsmith.graph import to_graph6
from hardsmith.policy import sample_graphs

N = 20
evaluator = CounterEvaluator("dsatur3", max_calls=10**6)
cfg = TrainConfig(PolicyConfig(N, init_edge_prob=0.12), budget=800, mode="per", seed=3)
params, log = train(cfg, evaluator)
print(f"hardest instance during training: {log.best_reward:.0f} calls, "
      f"graph6 {to_graph6(log.best_graph)}")

samples = sample_graphs(params, 300, np.random.default_rng(0))
rewards = [evaluator(g).value for g in samples]
rep = diversity_report(samples, rewards, log.best_graph, threshold=0.7)
print(f"mean Jaccard to the reference: {np.mean(rep.jaccards):.3f}")
if rep.defined:
    print(f"{rep.count_below} samples below 0.7; their hardest needs {rep.max_reward:.0f} calls")

patterns = mine_frequent_subgraphs(samples, max_edges=4, min_support=int(0.95 * len(samples)))
print(f"{len(patterns)} connected patterns with <= 4 edges occur in >= 95% of samples:")
for p in patterns:
    print(f"  {to_graph6(p.graph):6s} {p.graph.n} vertices, {p.num_edges} edges, "
          f"support {p.support}")
