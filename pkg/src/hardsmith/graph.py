"""Fixed-size undirected simple graphs stored as upper-triangular edge bits.

Edge ``(i, j)`` with ``i < j`` lives at position::

    i * n - i * (i + 1) // 2 + (j - i - 1)

which is row-major order over the strict upper triangle. Policy outputs use
the same indexing, so position ``k`` of an edge-probability vector always
refers to the same vertex pair as bit ``k`` of a :class:`Graph`.
"""

from __future__ import annotations

from typing import Iterable, Iterator, TextIO

import numpy as np


class InvalidPairError(ValueError):
    pass


class GraphFormatError(ValueError):
    """Malformed graph6 or edge-list input.

    ``offset`` is the byte offset in the offending line (graph6) or the line
    number (edge list) at which parsing failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(i: int, j: int, n: int) -> int:
    """Position of the unordered pair ``{i, j}`` in the edge bit vector."""
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidPairError(f"pair ({i}, {j}) out of range for n={n}")
    if i == j:
        raise InvalidPairError(f"self-loop ({i}, {i}) has no edge index")
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column of every position in the edge bit vector."""
    return np.triu_indices(n, k=1)


class Graph:
    """Immutable graph on vertices ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of vertices, at least 1.
    edges : array_like of bool
        Edge bits of length ``n(n-1)/2`` in row-major upper-triangular order.
    """

    __slots__ = ("n", "edges", "_hash")

    def __init__(self, n: int, edges=None):
        if n < 1:
            raise ValueError(f"graph needs at least one vertex, got n={n}")
        m = num_pairs(n)
        if edges is None:
            bits = np.zeros(m, dtype=bool)
        else:
            bits = np.array(edges, dtype=bool).ravel()
            if bits.shape[0] != m:
                raise ValueError(f"expected {m} edge bits for n={n}, got {bits.shape[0]}")
        bits.setflags(write=False)
        self.n = n
        self.edges = bits
        self._hash = None

    @classmethod
    def from_edge_list(cls, n: int, pairs: Iterable[tuple[int, int]]) -> Graph:
        bits = np.zeros(num_pairs(n), dtype=bool)
        for i, j in pairs:
            bits[edge_index(i, j, n)] = True
        return cls(n, bits)

    @classmethod
    def from_adjacency(cls, adj) -> Graph:
        adj = np.asarray(adj, dtype=bool)
        n = adj.shape[0]
        rows, cols = pair_arrays(n)
        return cls(n, adj[rows, cols])

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls(n, np.ones(num_pairs(n), dtype=bool))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n)

    @property
    def num_edges(self) -> int:
        return int(self.edges.sum())

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.edges[edge_index(i, j, self.n)])

    def edge_list(self) -> list[tuple[int, int]]:
        rows, cols = pair_arrays(self.n)
        idx = np.flatnonzero(self.edges)
        return list(zip(rows[idx].tolist(), cols[idx].tolist()))

    def adjacency(self) -> np.ndarray:
        """Symmetric boolean adjacency matrix (a fresh, writable array)."""
        adj = np.zeros((self.n, self.n), dtype=bool)
        rows, cols = pair_arrays(self.n)
        adj[rows, cols] = self.edges
        adj[cols, rows] = self.edges
        return adj

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def relabel(self, perm) -> Graph:
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        perm = np.asarray(perm)
        adj = self.adjacency()
        out = np.zeros_like(adj)
        out[np.ix_(perm, perm)] = adj
        return Graph.from_adjacency(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, np.packbits(self.edges).tobytes()))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


def sample_er(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Erdős–Rényi G(n, p): every pair independently an edge with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    return Graph(n, rng.random(num_pairs(n)) < p)


def jaccard(a: Graph, b: Graph) -> float:
    """Jaccard index of the two edge sets; 1.0 when both are empty."""
    if a.n != b.n:
        raise ValueError(f"cannot compare graphs with n={a.n} and n={b.n}")
    union = np.count_nonzero(a.edges | b.edges)
    if union == 0:
        return 1.0
    return np.count_nonzero(a.edges & b.edges) / union


# -- graph6 -----------------------------------------------------------------

def _graph6_order(n: int) -> np.ndarray:
    # graph6 walks the upper triangle column by column: (0,1) (0,2) (1,2) (0,3) ...
    cols, rows = np.tril_indices(n, k=-1)
    return rows * n - rows * (rows + 1) // 2 + (cols - rows - 1)


def _encode_n(n: int) -> bytes:
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    if n <= 68719476735:
        return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])
    raise ValueError(f"n={n} too large for graph6")


def to_graph6(g: Graph) -> str:
    """graph6 encoding of ``g`` without header or trailing newline."""
    bits = g.edges[_graph6_order(g.n)].astype(np.uint8)
    pad = (-bits.size) % 6
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    groups = bits.reshape(-1, 6) @ np.array([32, 16, 8, 4, 2, 1], dtype=np.uint8)
    return (_encode_n(g.n) + (groups + 63).astype(np.uint8).tobytes()).decode("ascii")


def from_graph6(line: str | bytes) -> Graph:
    if isinstance(line, str):
        line = line.encode("ascii", errors="replace")
    data = line.strip()
    if data.startswith(b">>graph6<<"):
        data = data[10:]
    if not data:
        raise GraphFormatError("empty graph6 line", 0)
    for pos, ch in enumerate(data):
        if not 63 <= ch <= 126:
            raise GraphFormatError(f"byte {ch!r} outside graph6 range 63..126", pos)

    if data[0] != 126:
        n, pos = data[0] - 63, 1
    elif len(data) >= 2 and data[1] == 126:
        if len(data) < 8:
            raise GraphFormatError("truncated 36-bit vertex count", len(data))
        n, pos = _decode_digits(data[2:8]), 8
    else:
        if len(data) < 4:
            raise GraphFormatError("truncated 18-bit vertex count", len(data))
        n, pos = _decode_digits(data[1:4]), 4
    if n < 1:
        raise GraphFormatError("graph6 graph must have at least one vertex", 0)

    m = num_pairs(n)
    need = -(-m // 6)
    payload = data[pos:]
    if len(payload) < need:
        raise GraphFormatError(f"expected {need} payload bytes, found {len(payload)}",
                               pos + len(payload))
    if len(payload) > need:
        raise GraphFormatError("trailing bytes after graph6 payload", pos + need)
    values = np.frombuffer(payload, dtype=np.uint8) - 63
    bits = np.unpackbits(values[:, None], axis=1)[:, 2:].ravel()[:m]
    edges = np.zeros(m, dtype=bool)
    edges[_graph6_order(n)] = bits.astype(bool)
    return Graph(n, edges)


def _decode_digits(chunk: bytes) -> int:
    value = 0
    for ch in chunk:
        value = (value << 6) | (ch - 63)
    return value


def write_graph6(graphs: Iterable[Graph], fh: TextIO) -> None:
    for g in graphs:
        fh.write(to_graph6(g) + "\n")


def read_graph6(fh: TextIO) -> Iterator[Graph]:
    for line in fh:
        if line.strip():
            yield from_graph6(line)


# -- edge list --------------------------------------------------------------

def write_edgelist(graphs: Iterable[Graph], fh: TextIO) -> None:
    """One block per graph: ``n m`` header, then ``m`` lines of ``i j``."""
    for g in graphs:
        pairs = g.edge_list()
        fh.write(f"{g.n} {len(pairs)}\n")
        for i, j in pairs:
            fh.write(f"{i} {j}\n")


def read_edgelist(fh: TextIO) -> Iterator[Graph]:
    lines = ((k + 1, ln.split()) for k, ln in enumerate(fh))
    lines = ((k, parts) for k, parts in lines if parts)
    for lineno, header in lines:
        try:
            n, m = (int(x) for x in header)
        except ValueError:
            raise GraphFormatError("expected 'n m' header", lineno) from None
        pairs = []
        for _ in range(m):
            try:
                lineno, parts = next(lines)
                i, j = (int(x) for x in parts)
            except StopIteration:
                raise GraphFormatError(f"block ended after {len(pairs)} of {m} edges",
                                       lineno) from None
            except ValueError:
                raise GraphFormatError("expected 'i j' edge line", lineno) from None
            pairs.append((i, j))
        try:
            yield Graph.from_edge_list(n, pairs)
        except InvalidPairError as exc:
            raise GraphFormatError(str(exc), lineno) from None
