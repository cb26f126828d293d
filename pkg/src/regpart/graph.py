"""Dense graphs over packed bit rows, with exact subset edge counting.

Vertices are 0..n-1. The adjacency matrix is stored as n rows of uint64
words; all subset counting goes through word-level popcount kernels, which
is what keeps exact density computations usable at n ~ 10^4.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import inf

import numpy as np

from . import _kernels
from .errors import CapExceeded, InputError, PreconditionError
from .jsonio import expect_key


def _words(n: int) -> int:
    return max(1, (n + 63) >> 6)


class Graph:
    """Finite simple undirected graph with packed-bit adjacency rows."""

    __slots__ = ("n", "bits", "_edge_count")

    def __init__(self, n: int, edges=()):
        if n < 0:
            raise PreconditionError("vertex count must be nonnegative")
        self.n = n
        bits = np.zeros((max(n, 1), _words(n)), dtype=np.uint64)
        count = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise PreconditionError(f"loop at vertex {u}")
            if (int(bits[u, v >> 6]) >> (v & 63)) & 1:
                continue
            bits[u, v >> 6] |= np.uint64(1 << (v & 63))
            bits[v, u >> 6] |= np.uint64(1 << (u & 63))
            count += 1
        bits.setflags(write=False)
        self.bits = bits
        self._edge_count = count

    @classmethod
    def from_bool_matrix(cls, adj: np.ndarray) -> "Graph":
        """Build from a boolean adjacency matrix (symmetrized, diagonal cleared)."""
        n = adj.shape[0]
        adj = adj | adj.T
        np.fill_diagonal(adj, False)
        g = cls.__new__(cls)
        g.n = n
        w = _words(n)
        padded = np.zeros((max(n, 1), w * 64), dtype=bool)
        if n:
            padded[:n, :n] = adj
        packed = np.ascontiguousarray(np.packbits(padded, axis=-1, bitorder="little"))
        bits = packed.view(np.uint64)
        bits.setflags(write=False)
        g.bits = bits
        g._edge_count = int(adj.sum()) // 2
        return g

    # -- basic queries ----------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        return bool((int(self.bits[u, v >> 6]) >> (v & 63)) & 1)

    def degree(self, u: int) -> int:
        return int(_kernels.popcount_rows(self.bits[u : u + 1])[0])

    def degrees(self) -> np.ndarray:
        return _kernels.popcount_rows(self.bits)

    def edge_count(self) -> int:
        return self._edge_count

    def edges(self):
        for u in range(self.n):
            row = self.bits[u]
            for v in _mask_vertices(row, self.n):
                if v > u:
                    yield (u, v)

    def neighbors(self, u: int):
        return _mask_vertices(self.bits[u], self.n)

    def complement(self) -> "Graph":
        full = np.zeros(_words(self.n), dtype=np.uint64)
        for v in range(self.n):
            full[v >> 6] |= np.uint64(1 << (v & 63))
        out = Graph.__new__(Graph)
        out.n = self.n
        bits = ~self.bits & full[np.newaxis, :]
        for u in range(self.n):
            bits[u, u >> 6] &= ~np.uint64(1 << (u & 63))
        bits.setflags(write=False)
        out.bits = bits
        out._edge_count = self.n * (self.n - 1) // 2 - self._edge_count
        return out

    def induced(self, vertices) -> tuple["Graph", list[int]]:
        """Induced subgraph on sorted(vertices); returns (graph, old ids in order)."""
        verts = sorted(set(int(v) for v in vertices))
        index = {v: i for i, v in enumerate(verts)}
        edges = []
        for u in verts:
            for v in _mask_vertices(self.bits[u], self.n):
                if v > u and v in index:
                    edges.append((index[u], index[v]))
        return Graph(len(verts), edges), verts

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and bool(np.array_equal(self.bits, other.bits))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self._edge_count})"


# -- vertex set helpers ----------------------------------------------------


def vertex_mask(g: Graph, vertices) -> np.ndarray:
    """Pack a vertex subset into a uint64 word mask; validates the range."""
    mask = np.zeros(g.bits.shape[1], dtype=np.uint64)
    for v in vertices:
        v = int(v)
        if not 0 <= v < g.n:
            raise PreconditionError(f"vertex {v} out of range for n={g.n}")
        mask[v >> 6] |= np.uint64(1 << (v & 63))
    return mask


def _mask_vertices(mask: np.ndarray, n: int) -> list[int]:
    out = []
    for w, word in enumerate(mask):
        word = int(word)
        while word:
            low = word & -word
            out.append((w << 6) + low.bit_length() - 1)
            word ^= low
    return [v for v in out if v < n]


def _as_sorted(vertices) -> list[int]:
    out = sorted(set(int(v) for v in vertices))
    return out


# -- spec operations -------------------------------------------------------


def edge_count_between(g: Graph, a, b) -> int:
    """Number of edges with one end in a and the other in b (disjoint, non-empty)."""
    a = _as_sorted(a)
    b = _as_sorted(b)
    if not a or not b:
        raise PreconditionError("edge_count_between: sets must be non-empty")
    if set(a) & set(b):
        raise PreconditionError("edge_count_between: sets must be disjoint")
    mask_b = vertex_mask(g, b)
    rows = np.asarray(a, dtype=np.int64)
    if any(v >= g.n for v in a):
        raise PreconditionError("vertex out of range")
    return _kernels.count_edges(g.bits, rows, mask_b)


def density(g: Graph, a, b) -> Fraction:
    """Exact density |E(a,b)| / (|a||b|)."""
    a = _as_sorted(a)
    b = _as_sorted(b)
    return Fraction(edge_count_between(g, a, b), len(a) * len(b))


def internal_edge_count(g: Graph, a) -> int:
    a = _as_sorted(a)
    mask = vertex_mask(g, a)
    rows = np.asarray(a, dtype=np.int64)
    return _kernels.count_edges(g.bits, rows, mask) // 2


def is_homogeneous_pair(g: Graph, a, b) -> bool:
    """True iff the pair is complete or edgeless; (a, a) tests a homogeneous set."""
    a = _as_sorted(a)
    b = _as_sorted(b)
    if not a or not b:
        raise PreconditionError("is_homogeneous_pair: sets must be non-empty")
    if a == b:
        inner = internal_edge_count(g, a)
        total = len(a) * (len(a) - 1) // 2
        return inner == 0 or inner == total
    if set(a) & set(b):
        raise PreconditionError("is_homogeneous_pair: sets must be equal or disjoint")
    cross = edge_count_between(g, a, b)
    return cross == 0 or cross == len(a) * len(b)


def degeneracy_order(g: Graph) -> tuple[int, list[int]]:
    """Degeneracy d and a min-degree peeling order (ties: smallest vertex id).

    Every vertex has at most d neighbors later in the returned order.
    """
    import heapq

    n = g.n
    if n == 0:
        return 0, []
    deg = [g.degree(u) for u in range(n)]
    alive = [True] * n
    neighbor_lists = [list(g.neighbors(u)) for u in range(n)]
    heap = [(deg[u], u) for u in range(n)]
    heapq.heapify(heap)
    order = []
    d = 0
    while heap:
        du, u = heapq.heappop(heap)
        if not alive[u] or du != deg[u]:
            continue
        alive[u] = False
        d = max(d, du)
        order.append(u)
        for v in neighbor_lists[u]:
            if alive[v]:
                deg[v] -= 1
                heapq.heappush(heap, (deg[v], v))
    return d, order


def contains_kss(g: Graph, s: int, max_n: int = 16):
    """Search for K_{s,s} as a (not necessarily induced) subgraph.

    Returns (a, b) vertex lists with |a| = |b| = s and all cross edges present,
    or None. Exhaustive over s-subsets; refuses when n exceeds max_n.
    """
    if s < 1:
        raise PreconditionError("s must be positive")
    if g.n > max_n:
        raise CapExceeded(f"contains_kss: n={g.n} exceeds cap {max_n}")
    if g.n < 2 * s:
        return None
    for a in combinations(range(g.n), s):
        common = g.bits[a[0]].copy()
        for u in a[1:]:
            common &= g.bits[u]
        candidates = [v for v in _mask_vertices(common, g.n) if v not in a]
        if len(candidates) >= s:
            return list(a), candidates[:s]
    return None


def distances_from(g: Graph, s, source: int) -> list[float]:
    """BFS distances from source in g - s; s vertices and unreachable are inf."""
    s_set = set(int(v) for v in s)
    if source in s_set:
        raise PreconditionError("distances_from: source must not be in the deleted set")
    if not 0 <= source < g.n:
        raise PreconditionError("source out of range")
    blocked = vertex_mask(g, s_set)
    dist: list[float] = [inf] * g.n
    dist[source] = 0
    visited = np.zeros(g.bits.shape[1], dtype=np.uint64)
    visited[source >> 6] |= np.uint64(1 << (source & 63))
    frontier = [source]
    level = 0
    while frontier:
        level += 1
        reach = np.zeros(g.bits.shape[1], dtype=np.uint64)
        for u in frontier:
            reach |= g.bits[u]
        reach &= ~visited
        reach &= ~blocked
        frontier = _mask_vertices(reach, g.n)
        for v in frontier:
            dist[v] = level
        visited |= reach
    return dist


def ball_masks(g: Graph, s, radius: int) -> list[np.ndarray]:
    """For every vertex u not in s: packed mask of vertices within distance
    radius of u in g - s (inclusive of u). Vertices in s get empty masks."""
    blocked = vertex_mask(g, s)
    out = []
    w = g.bits.shape[1]
    for u in range(g.n):
        if (int(blocked[u >> 6]) >> (u & 63)) & 1:
            out.append(np.zeros(w, dtype=np.uint64))
            continue
        ball = np.zeros(w, dtype=np.uint64)
        ball[u >> 6] |= np.uint64(1 << (u & 63))
        frontier = [u]
        for _ in range(radius):
            if not frontier:
                break
            reach = np.zeros(w, dtype=np.uint64)
            for x in frontier:
                reach |= g.bits[x]
            reach &= ~ball
            reach &= ~blocked
            frontier = _mask_vertices(reach, g.n)
            ball |= reach
        out.append(ball)
    return out


# -- JSON ------------------------------------------------------------------


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u, v] for u, v in sorted(g.edges())]}


def graph_from_json(obj, where: str = "graph") -> Graph:
    n = expect_key(obj, "n", where)
    edges = expect_key(obj, "edges", where)
    if not isinstance(n, int) or n < 0:
        raise InputError(f"{where}/n: expected nonnegative integer")
    if not isinstance(edges, list):
        raise InputError(f"{where}/edges: expected list")
    seen = set()
    parsed = []
    for i, e in enumerate(edges):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise InputError(f"{where}/edges/{i}: expected [u,v] integer pair")
        u, v = e
        if u == v:
            raise InputError(f"{where}/edges/{i}: loop at {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"{where}/edges/{i}: vertex out of range")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InputError(f"{where}/edges/{i}: duplicate edge {key}")
        seen.add(key)
        parsed.append(key)
    return Graph(n, parsed)
