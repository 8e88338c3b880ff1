"""Post-hoc analysis of sampled graphs: diversity and frequent small patterns."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from networkx.algorithms.isomorphism import GraphMatcher
import networkx as nx

from .graph import Graph, jaccard, pair_arrays, to_graph6

CANON_MAX_N = 8
MINE_MAX_EDGES = 6


class PatternSizeError(ValueError):
    pass


# -- diversity ----------------------------------------------------------------

@dataclass(frozen=True)
class DiversityReport:
    reference: Graph
    jaccards: tuple[float, ...]
    rewards: tuple[float, ...]
    threshold: float
    # aggregates over samples with jaccard < threshold; nan when none qualify
    count_below: int
    mean_jaccard: float
    mean_reward: float
    max_reward: float
    max_reward_jaccard: float

    @property
    def defined(self) -> bool:
        return self.count_below > 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sample", "jaccard", "reward", "below_threshold"])
        for k, (j, r) in enumerate(zip(self.jaccards, self.rewards)):
            w.writerow([k, repr(j), repr(r), int(j < self.threshold)])
        return buf.getvalue()


def diversity_report(samples: Sequence[Graph], rewards: Sequence[float], reference: Graph,
                     threshold: float = 0.7) -> DiversityReport:
    """Jaccard distance of each sample to ``reference`` and reward statistics.

    Aggregates only cover samples whose Jaccard index to the reference is
    strictly below ``threshold``.
    """
    if not samples:
        raise ValueError("diversity_report needs at least one sample")
    if len(samples) != len(rewards):
        raise ValueError("samples and rewards differ in length")
    jac = np.array([jaccard(s, reference) for s in samples])
    rew = np.asarray(rewards, dtype=float)
    keep = jac < threshold
    if keep.any():
        k = int(np.argmax(np.where(keep, rew, -np.inf)))
        stats = (float(jac[keep].mean()), float(rew[keep].mean()), float(rew[k]), float(jac[k]))
    else:
        stats = (math.nan,) * 4
    return DiversityReport(reference, tuple(jac.tolist()), tuple(rew.tolist()), threshold,
                           int(keep.sum()), *stats)


# -- canonical form ---------------------------------------------------------

@lru_cache(maxsize=None)
def _permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int8).reshape(-1, n)


def canonical_form(g: Graph) -> bytes:
    """Isomorphism-invariant byte string for graphs with at most 8 vertices.

    Tries every vertex relabeling and keeps the lexicographically largest
    edge bit vector; the result is the vertex count followed by those bits
    packed into bytes.
    """
    if g.n > CANON_MAX_N:
        raise PatternSizeError(f"canonical_form supports n <= {CANON_MAX_N}, got {g.n}")
    if g.n == 1:
        return bytes([1])
    adj = g.adjacency()
    perms = _permutations(g.n)
    rows, cols = pair_arrays(g.n)
    bits = adj[perms[:, rows], perms[:, cols]]
    weights = np.left_shift(np.int64(1), np.arange(bits.shape[1] - 1, -1, -1, dtype=np.int64))
    best = int((bits.astype(np.int64) @ weights).max())
    nbytes = (bits.shape[1] + 7) // 8
    return bytes([g.n]) + best.to_bytes(nbytes, "big")


# -- frequent subgraph mining ---------------------------------------------------

@dataclass(frozen=True)
class Pattern:
    graph: Graph
    canonical: bytes
    support: int

    @property
    def num_edges(self) -> int:
        return self.graph.num_edges


def _to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edge_list())
    return h


def contains_subgraph(host: Graph | nx.Graph, pattern: Graph | nx.Graph) -> bool:
    """Whether ``host`` has a (not necessarily induced) subgraph isomorphic to ``pattern``."""
    host = host if isinstance(host, nx.Graph) else _to_nx(host)
    pattern = pattern if isinstance(pattern, nx.Graph) else _to_nx(pattern)
    if pattern.number_of_edges() > host.number_of_edges():
        return False
    return GraphMatcher(host, pattern).subgraph_is_monomorphic()


def _extensions(p: Graph) -> Iterable[Graph]:
    edges = p.edge_list()
    for i, j in itertools.combinations(range(p.n), 2):
        if not p.has_edge(i, j):
            yield Graph.from_edge_list(p.n, edges + [(i, j)])
    if p.n < CANON_MAX_N:
        for i in range(p.n):
            yield Graph.from_edge_list(p.n + 1, edges + [(i, p.n)])


def _canonical_graph(g: Graph) -> Graph:
    code = canonical_form(g)
    n = code[0]
    m = n * (n - 1) // 2
    value = int.from_bytes(code[1:], "big")
    bits = [(value >> (m - 1 - k)) & 1 for k in range(m)]
    return Graph(n, bits)


def mine_frequent_subgraphs(db: Sequence[Graph], max_edges: int, min_support: int
                            ) -> list[Pattern]:
    """Connected patterns with at most ``max_edges`` edges and enough support.

    Support counts database graphs containing the pattern at least once.
    Patterns grow one edge at a time from frequent parents only; this loses
    nothing because every connected pattern has a connected parent with one
    edge fewer, and support never increases when an edge is added.
    Results are sorted by edge count, then by descending support, then by
    canonical form.
    """
    if max_edges > MINE_MAX_EDGES:
        raise PatternSizeError(f"max_edges limited to {MINE_MAX_EDGES}, got {max_edges}")
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    hosts = [_to_nx(g) for g in db]
    found: list[Pattern] = []
    frontier = [Graph.from_edge_list(2, [(0, 1)])] if max_edges >= 1 else []
    for _ in range(max_edges):
        level: dict[bytes, Pattern] = {}
        for cand in frontier:
            code = canonical_form(cand)
            if code in level:
                continue
            pat = _to_nx(cand)
            support = sum(contains_subgraph(h, pat) for h in hosts)
            if support >= min_support:
                level[code] = Pattern(_canonical_graph(cand), code, support)
        kept = sorted(level.values(), key=lambda p: (-p.support, p.canonical))
        found.extend(kept)
        seen: set[bytes] = set()
        frontier = []
        for p in kept:
            for ext in _extensions(p.graph):
                code = canonical_form(ext)
                if code not in seen:
                    seen.add(code)
                    frontier.append(ext)
    return found


def patterns_csv(patterns: Sequence[Pattern]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["graph6", "num_vertices", "num_edges", "support"])
    for p in patterns:
        w.writerow([to_graph6(p.graph), p.graph.n, p.num_edges, p.support])
    return buf.getvalue()
