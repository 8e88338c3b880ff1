"""Learn generative distributions of graphs that are hard for a given algorithm.

A small fully connected network turns Gaussian noise into independent edge
probabilities; it is trained with REINFORCE (optionally replaying the top-K
hardest samples) against an instrumented solver that scores each sampled
graph. See ``hardsmith.trainer.train`` for the entry point.
"""

from .graph import Graph, edge_index, from_graph6, jaccard, sample_er, to_graph6
from .hardness import (
    CounterEvaluator,
    EvaluationCounter,
    ExternalEvaluator,
    FunctionEvaluator,
    HardnessReport,
    RatioConfig,
    RatioEvaluator,
    TimeEvaluator,
)
from .policy import PolicyConfig, PolicyParams, forward, init_params, sample_graph
from .trainer import TrainConfig, RunLog, calibrate_pstar, train, train_per, train_vanilla

__version__ = "0.1.0"
