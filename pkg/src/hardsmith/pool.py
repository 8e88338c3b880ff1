"""Top-K experience pool for prioritized replay."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import numpy as np

from .graph import Graph


@dataclass(frozen=True)
class Experience:
    reward: float
    noise: np.ndarray
    graph: Graph


class ExperiencePool:
    """Keeps the ``capacity`` highest-reward experiences.

    When a push overflows the pool, the lowest reward is evicted; among equal
    rewards the oldest entry goes first. Once the pool is full its minimum
    reward can only rise.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"pool capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._heap: list[tuple[float, int, Experience]] = []
        self._age = itertools.count()

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, exp: Experience) -> Experience | None:
        """Insert ``exp``; returns the evicted experience, if any."""
        item = (exp.reward, next(self._age), exp)
        if len(self._heap) < self.capacity:
            heapq.heappush(self._heap, item)
            return None
        return heapq.heappushpop(self._heap, item)[2]

    def min_reward(self) -> float:
        return self._heap[0][0]

    def rewards(self) -> list[float]:
        return sorted(r for r, _, _ in self._heap)

    def sample(self, rng: np.random.Generator) -> Experience:
        if not self._heap:
            raise IndexError("sample from an empty pool")
        return self._heap[int(rng.integers(len(self._heap)))][2]

    def __iter__(self):
        return (e for _, _, e in sorted(self._heap))
