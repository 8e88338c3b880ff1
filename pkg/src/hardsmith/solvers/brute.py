"""Exhaustive reference answers for small graphs."""

import itertools

import numpy as np

from ..graph import Graph

ORACLE_MAX_N = 12


class OracleSizeError(ValueError):
    pass


def _check(g: Graph) -> None:
    if g.n > ORACLE_MAX_N:
        raise OracleSizeError(f"brute force limited to n <= {ORACLE_MAX_N}, got n={g.n}")


def _subsets(n: int) -> np.ndarray:
    # row k is the membership vector of subset k
    return ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(bool)


def brute_force_3colorable(g: Graph) -> bool:
    _check(g)
    edges = g.edge_list()
    if not edges:
        return True
    u = np.array([e[0] for e in edges])
    v = np.array([e[1] for e in edges])
    # vertex 0 fixed to color 0 by symmetry
    rest = np.array(list(itertools.product(range(3), repeat=g.n - 1)), dtype=np.int8)
    colors = np.hstack([np.zeros((rest.shape[0], 1), dtype=np.int8),
                        rest.reshape(rest.shape[0], -1)])
    return bool(np.any(np.all(colors[:, u] != colors[:, v], axis=1)))


def brute_force_min_vertex_cover(g: Graph) -> int:
    _check(g)
    edges = np.array(g.edge_list(), dtype=int).reshape(-1, 2)
    subsets = _subsets(g.n)
    ok = np.all(subsets[:, edges[:, 0]] | subsets[:, edges[:, 1]], axis=1)
    return int(subsets[ok].sum(axis=1).min())


def brute_force_max_clique(g: Graph) -> int:
    _check(g)
    non_edges = np.array([(i, j) for i in range(g.n) for j in range(i + 1, g.n)
                          if not g.has_edge(i, j)], dtype=int).reshape(-1, 2)
    subsets = _subsets(g.n)
    ok = ~np.any(subsets[:, non_edges[:, 0]] & subsets[:, non_edges[:, 1]], axis=1)
    return int(subsets[ok].sum(axis=1).max())
