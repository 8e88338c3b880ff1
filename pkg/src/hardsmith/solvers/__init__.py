"""Instrumented graph algorithms used as hardness sources.

The three exact solvers report how many times their recursive procedure was
entered (root call included). They are deterministic: ties are always broken
towards the lowest vertex id, so the same graph yields the same counter.

Pass ``max_calls`` to cap the search. A capped run stops once the cap is
reached, sets ``truncated`` and leaves ``answer`` as ``None``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from ..graph import Graph
from . import _kernels
from .brute import (
    OracleSizeError,
    brute_force_3colorable,
    brute_force_max_clique,
    brute_force_min_vertex_cover,
)

__all__ = [
    "SolveOutcome",
    "dsatur_3color",
    "vc_branch_bound",
    "bk_max_clique",
    "greedy_vertex_cover",
    "brute_force_3colorable",
    "brute_force_min_vertex_cover",
    "brute_force_max_clique",
    "OracleSizeError",
    "EXACT_SOLVERS",
]


@dataclass(frozen=True)
class SolveOutcome:
    """Result of one instrumented solver run.

    ``answer`` is a bool for 3-colorability and an int (cover or clique size)
    for the optimisation problems. ``witness`` holds the coloring, cover, or
    clique that certifies it.
    """

    answer: Any
    work_counter: int
    elapsed: float
    witness: tuple = field(default=(), compare=False)
    truncated: bool = False


def _adjacency(g: Graph) -> np.ndarray:
    return np.ascontiguousarray(g.adjacency())


def _cap(max_calls: int | None) -> int:
    return 0 if max_calls is None else int(max_calls)


def dsatur_3color(g: Graph, max_calls: int | None = None) -> SolveOutcome:
    """Exact 3-colorability by DSATUR-ordered backtracking.

    The next vertex is the uncolored one with the fewest candidate colors,
    then the highest degree, then the lowest id. Colors are tried in order
    0, 1, 2.
    """
    adj = _adjacency(g)
    t0 = time.perf_counter()
    status, color, calls = _kernels.dsatur_3color(adj, _cap(max_calls))
    elapsed = time.perf_counter() - t0
    if status == _kernels.ABORTED:
        return SolveOutcome(None, int(calls), elapsed, truncated=True)
    colorable = status == 1
    witness = tuple(color.tolist()) if colorable else ()
    return SolveOutcome(colorable, int(calls), elapsed, witness)


def vc_branch_bound(g: Graph, max_calls: int | None = None) -> SolveOutcome:
    """Minimum vertex cover by branch and bound.

    Branches on the lower endpoint ``u`` of the first uncovered edge: ``u``
    in the cover, or ``u`` out and all its remaining neighbours in. A branch
    is cut when the partial cover plus a greedy maximal matching of the
    residual graph is no smaller than the best cover so far. A maximal
    matching lower-bounds any cover of the residual graph.
    """
    adj = _adjacency(g)
    t0 = time.perf_counter()
    status, size, cover, calls = _kernels.vc_branch_bound(adj, _cap(max_calls))
    elapsed = time.perf_counter() - t0
    if status == _kernels.ABORTED:
        return SolveOutcome(None, int(calls), elapsed, truncated=True)
    return SolveOutcome(int(size), int(calls), elapsed, tuple(np.flatnonzero(cover).tolist()))


def bk_max_clique(g: Graph, max_calls: int | None = None) -> SolveOutcome:
    """Maximum clique by Bron-Kerbosch style branch and bound.

    Returns one maximum clique instead of enumerating maximal ones. A state
    is cut when selected plus candidate vertices cannot beat the best clique
    found so far.
    """
    adj = _adjacency(g)
    t0 = time.perf_counter()
    status, size, clique, calls = _kernels.bk_max_clique(adj, _cap(max_calls))
    elapsed = time.perf_counter() - t0
    if status == _kernels.ABORTED:
        return SolveOutcome(None, int(calls), elapsed, truncated=True)
    return SolveOutcome(int(size), int(calls), elapsed, tuple(sorted(clique.tolist())))


def greedy_vertex_cover(g: Graph) -> int:
    """Size of the matching-based 2-approximate vertex cover.

    Edges are visited in bit-vector order; an edge with both endpoints still
    uncovered contributes both endpoints.
    """
    covered = np.zeros(g.n, dtype=bool)
    size = 0
    for i, j in g.edge_list():
        if not covered[i] and not covered[j]:
            covered[i] = covered[j] = True
            size += 2
    return size


def greedy_cover_set(g: Graph) -> set[int]:
    cover: set[int] = set()
    for i, j in g.edge_list():
        if i not in cover and j not in cover:
            cover.update((i, j))
    return cover


EXACT_SOLVERS: dict[str, Callable[..., SolveOutcome]] = {
    "dsatur3": dsatur_3color,
    "vc_bb": vc_branch_bound,
    "bk_clique": bk_max_clique,
}
