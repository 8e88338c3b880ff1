"""Training loops for the hard-instance sampler.

``train_vanilla`` updates on every fresh sample. ``train_per`` additionally
keeps the top-K hardest samples and updates on a uniformly replayed one
instead. Both make exactly ``budget`` evaluator calls.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import checkpoint
from .graph import Graph, sample_er
from .hardness import RewardTransform
from .policy import (
    PolicyConfig,
    PolicyParams,
    forward_pass,
    init_params,
    reinforce_update,
    sample_graph,
    sample_graphs,
    sample_noise,
)
from .pool import Experience, ExperiencePool


@dataclass(frozen=True)
class TrainConfig:
    policy: PolicyConfig
    budget: int = 10000
    pool_size: int = 10
    mode: str = "per"
    reward_transform: str = "identity"
    seed: int = 0
    # PER only: weight the replayed sample's gradient by the fresh reward
    # instead of the replayed one.
    strict_paper: bool = False

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.pool_size < 1:
            raise ValueError(f"pool_size must be >= 1, got {self.pool_size}")
        if self.mode not in ("vanilla", "per"):
            raise ValueError(f"mode must be 'vanilla' or 'per', got {self.mode!r}")
        RewardTransform(self.reward_transform)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    reward: float
    transformed_reward: float
    best_so_far: float
    pool_min: float | None


@dataclass
class RunLog:
    records: list[IterationRecord] = field(default_factory=list)
    best_graph: Graph | None = None
    best_reward: float = -math.inf
    best_iteration: int = -1

    CSV_FIELDS = ("iteration", "reward", "transformed_reward", "best_so_far", "pool_min")

    def observe(self, it: int, graph: Graph, reward: float) -> None:
        if reward > self.best_reward:
            self.best_reward = reward
            self.best_graph = graph
            self.best_iteration = it

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_FIELDS)
        for rec in self.records:
            writer.writerow([rec.iteration, repr(rec.reward), repr(rec.transformed_reward),
                             repr(rec.best_so_far),
                             "" if rec.pool_min is None else repr(rec.pool_min)])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @property
    def rewards(self) -> np.ndarray:
        return np.array([r.reward for r in self.records])


class TrainingAborted(RuntimeError):
    """The evaluator failed mid-run; carries the partial state."""

    def __init__(self, cause: BaseException, params: PolicyParams, log: RunLog):
        super().__init__(f"training aborted at iteration {len(log.records)}: {cause}")
        self.cause = cause
        self.params = params
        self.log = log


Evaluator = Callable[[Graph], object]
Hook = Callable[[int, PolicyParams, RunLog], None]


def _value(report) -> float:
    return float(getattr(report, "value", report))


def train(cfg: TrainConfig, evaluator: Evaluator,
          on_iteration: Hook | None = None) -> tuple[PolicyParams, RunLog]:
    rng = np.random.default_rng(cfg.seed)
    params = init_params(cfg.policy, rng)
    transform = RewardTransform(cfg.reward_transform)
    pool = ExperiencePool(cfg.pool_size) if cfg.mode == "per" else None
    log = RunLog()
    lr = cfg.policy.learning_rate

    for it in range(cfg.budget):
        z = sample_noise(params, rng)
        cache = forward_pass(params, z)
        graph = sample_graph(cache[1], rng)
        try:
            reward = _value(evaluator(graph))
        except Exception as exc:
            raise TrainingAborted(exc, params, log) from exc
        transform.observe(reward)
        log.observe(it, graph, reward)

        if pool is None:
            used = transform(reward)
            reinforce_update(params, z, graph, used, lr, cache)
            pool_min = None
        else:
            fresh = Experience(reward, z, graph)
            pool.push(fresh)
            replay = pool.sample(rng)
            used = transform(reward if cfg.strict_paper else replay.reward)
            reinforce_update(params, replay.noise, replay.graph, used, lr,
                             cache if replay is fresh else None)
            pool_min = pool.min_reward()

        log.records.append(IterationRecord(it, reward, used, log.best_reward, pool_min))
        if on_iteration is not None:
            on_iteration(it, params, log)
    return params, log


def train_vanilla(cfg: TrainConfig, evaluator: Evaluator, **kw) -> tuple[PolicyParams, RunLog]:
    if cfg.mode != "vanilla":
        cfg = _with_mode(cfg, "vanilla")
    return train(cfg, evaluator, **kw)


def train_per(cfg: TrainConfig, evaluator: Evaluator, **kw) -> tuple[PolicyParams, RunLog]:
    if cfg.mode != "per":
        cfg = _with_mode(cfg, "per")
    return train(cfg, evaluator, **kw)


def _with_mode(cfg: TrainConfig, mode: str) -> TrainConfig:
    return replace(cfg, mode=mode)


@dataclass(frozen=True)
class CalibrationResult:
    p_star: float
    grid: tuple[float, ...]
    hardest: tuple[float, ...]
    evaluations: int


def calibrate_pstar(n: int, evaluator: Evaluator, grid: Sequence[float],
                    samples_per_point: int, rng: np.random.Generator | int = 0
                    ) -> CalibrationResult:
    """Edge probability whose hardest ER sample is hardest overall.

    Ties go to the earliest grid point. ``evaluations`` reports the budget
    spent, which is kept apart from any training budget.
    """
    grid = tuple(float(p) for p in grid)
    if not grid:
        raise ValueError("calibration grid is empty")
    if samples_per_point < 1:
        raise ValueError("samples_per_point must be >= 1")
    rng = np.random.default_rng(rng)
    hardest = []
    for p in grid:
        hardest.append(max(_value(evaluator(sample_er(n, p, rng)))
                           for _ in range(samples_per_point)))
    best = int(np.argmax(hardest))
    return CalibrationResult(grid[best], grid, tuple(hardest), len(grid) * samples_per_point)


def sample_from_checkpoint(ckpt: PolicyParams | str | Path, count: int,
                           rng: np.random.Generator | int = 0) -> list[Graph]:
    params = ckpt if isinstance(ckpt, PolicyParams) else checkpoint.load(ckpt)
    return sample_graphs(params, count, np.random.default_rng(rng))
