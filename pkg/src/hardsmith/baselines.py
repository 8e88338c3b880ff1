"""Comparison searches that share the sampler's evaluator and budget."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graph import Graph, num_pairs, sample_er

Evaluator = Callable[[Graph], object]

RULES = {
    # ER parameterisations tuned for 3-coloring hardness
    "cheeseman": 4.6,
    "hogg": 3.4,
}


def _value(report) -> float:
    return float(getattr(report, "value", report))


@dataclass
class SearchResult:
    best_graph: Graph
    best_reward: float
    rewards: list[float] = field(default_factory=list)
    method: str = ""

    @property
    def evaluations(self) -> int:
        return len(self.rewards)

    def best_so_far(self) -> np.ndarray:
        return np.maximum.accumulate(self.rewards)


def _search_er(n: int, p: float, budget: int, evaluator: Evaluator,
               rng: np.random.Generator, method: str) -> SearchResult:
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    best_graph, best_reward, rewards = None, -math.inf, []
    for _ in range(budget):
        g = sample_er(n, p, rng)
        r = _value(evaluator(g))
        rewards.append(r)
        if r > best_reward:
            best_graph, best_reward = g, r
    return SearchResult(best_graph, best_reward, rewards, method)


def random_search(n: int, p: float, budget: int, evaluator: Evaluator,
                  rng: np.random.Generator | int = 0) -> SearchResult:
    """Evaluate ``budget`` ER(n, p) samples and keep the hardest."""
    return _search_er(n, p, budget, evaluator, np.random.default_rng(rng), f"random(p={p})")


def rule_probability(rule: str, n: int) -> float:
    try:
        c = RULES[rule]
    except KeyError:
        raise ValueError(f"unknown rule {rule!r}; expected one of {sorted(RULES)}") from None
    if n < 2:
        raise ValueError("rule-based ER needs n >= 2")
    p = c / (n - 1)
    if p > 1:
        raise ValueError(f"rule {rule!r} gives p={p:.3f} > 1 for n={n}")
    return p


def rule_based_er(rule: str, n: int, budget: int, evaluator: Evaluator,
                  rng: np.random.Generator | int = 0) -> SearchResult:
    """Random search at ``p = c / (n - 1)``, ``c`` = 4.6 (cheeseman) or 3.4 (hogg)."""
    p = rule_probability(rule, n)
    return _search_er(n, p, budget, evaluator, np.random.default_rng(rng), rule)


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 30
    tournament_size: int = 2
    elitism: int = 1
    initial_mutation_rate: float | None = None  # defaults to 1 / n(n-1)/2

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0 <= self.elitism < self.population_size:
            raise ValueError("elitism must lie in [0, population_size)")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")


def mutation_bounds(n: int) -> tuple[float, float]:
    return 1.0 / (n * (n - 1)), 0.5


def adapt_mutation_rate(rate: float, improved: bool, n: int) -> float:
    """Halve after a generation that raised the best fitness, else double."""
    lo, hi = mutation_bounds(n)
    rate = rate / 2 if improved else rate * 2
    return min(max(rate, lo), hi)


def uniform_crossover(a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    take_a = rng.random(a.shape[0]) < 0.5
    return np.where(take_a, a, b)


def mutate(bits: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    return bits ^ (rng.random(bits.shape[0]) < rate)


def ga_search(n: int, cfg: GAConfig, budget: int, evaluator: Evaluator,
              rng: np.random.Generator | int = 0, init_p: float = 0.5,
              history: list | None = None) -> SearchResult:
    """Generational GA over edge bit vectors.

    Each generation keeps the ``elitism`` fittest, fills the rest with
    tournament-selected parents combined by uniform crossover and per-bit
    mutation, then adapts the mutation rate. The run stops mid-generation
    once ``budget`` evaluations are spent. ``history``, when given,
    receives ``(best_fitness, mutation_rate)`` after each generation.
    """
    if budget < cfg.population_size:
        raise ValueError(f"budget {budget} smaller than population {cfg.population_size}")
    rng = np.random.default_rng(rng)
    m = num_pairs(n)
    rate = cfg.initial_mutation_rate or 1.0 / m
    lo, hi = mutation_bounds(n)
    rate = min(max(rate, lo), hi)

    rewards: list[float] = []
    best_graph, best_reward = None, -math.inf

    def score(bits):
        nonlocal best_graph, best_reward
        g = Graph(n, bits)
        r = _value(evaluator(g))
        rewards.append(r)
        if r > best_reward:
            best_graph, best_reward = g, r
        return r

    pop = [sample_er(n, init_p, rng).edges.copy() for _ in range(cfg.population_size)]
    fit = np.array([score(ind) for ind in pop])
    if history is not None:
        history.append((best_reward, rate))

    def tournament():
        picks = rng.integers(len(pop), size=cfg.tournament_size)
        return pop[picks[np.argmax(fit[picks])]]

    while len(rewards) < budget:
        before = best_reward
        order = np.argsort(-fit, kind="stable")
        new_pop = [pop[i] for i in order[:cfg.elitism]]
        new_fit = [fit[i] for i in order[:cfg.elitism]]
        while len(new_pop) < cfg.population_size and len(rewards) < budget:
            child = mutate(uniform_crossover(tournament(), tournament(), rng), rate, rng)
            new_pop.append(child)
            new_fit.append(score(child))
        pop, fit = new_pop, np.array(new_fit)
        rate = adapt_mutation_rate(rate, best_reward > before, n)
        if history is not None:
            history.append((best_reward, rate))
    return SearchResult(best_graph, best_reward, rewards, "ga")
