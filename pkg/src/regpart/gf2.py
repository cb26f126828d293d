"""GF(2) cut-rank, rank-decomposition width, and decomposition of a
width-r graph into r layers of cut-rank at most 1 on the same tree.

The layer construction follows the inductive recipe (split along a tree
edge, take a basis of the cross-neighborhood space, emit one rank-1 edge
block per basis vector), then certifies every layer against every tree
edge. Plain index alignment of basis vectors to layers can break the
certificate at edges above the split, so when the check fails the local
blocks are reassigned to layers by an exact backtracking search.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import InputError, InternalInvariantError, PreconditionError
from .graph import Graph, vertex_mask
from .jsonio import expect_key


def cutrank(g: Graph, x) -> int:
    """GF(2) rank of the bipartite adjacency matrix between x and its complement."""
    xs = sorted(set(int(v) for v in x))
    if not xs or len(xs) == g.n:
        return 0
    comp = sorted(set(range(g.n)) - set(xs))
    mask = vertex_mask(g, comp)
    rows = g.bits[xs] & mask[np.newaxis, :]
    return _kernels.gf2_rank(np.ascontiguousarray(rows))


class RankDecomposition:
    """Subcubic tree (>= 2 nodes, internal degree 3) with a leaf bijection."""

    __slots__ = ("edges", "leaf_map", "tree_adj", "_vertex_of")

    def __init__(self, edges, leaf_map: dict[int, int]):
        self.edges = sorted((min(a, b), max(a, b)) for a, b in edges)
        if len(set(self.edges)) != len(self.edges):
            raise PreconditionError("duplicate tree edges")
        adj: dict[int, list[int]] = {}
        for a, b in self.edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        if len(adj) < 2:
            raise PreconditionError("rank decomposition needs at least two nodes")
        if len(self.edges) != len(adj) - 1 or not self._connected(adj):
            raise PreconditionError("tree edges do not form a tree")
        for node, nbrs in adj.items():
            if len(nbrs) not in (1, 3):
                raise PreconditionError(f"node {node} has degree {len(nbrs)}; tree must be subcubic")
        leaves = sorted(node for node, nbrs in adj.items() if len(nbrs) == 1)
        self.leaf_map = {int(v): int(leaf) for v, leaf in leaf_map.items()}
        if sorted(self.leaf_map.values()) != leaves:
            raise PreconditionError("leaf_map must be a bijection onto the tree leaves")
        if sorted(self.leaf_map) != list(range(len(leaves))):
            raise PreconditionError("leaf_map must map vertices 0..n-1")
        self.tree_adj = {node: sorted(nbrs) for node, nbrs in adj.items()}
        self._vertex_of = {leaf: v for v, leaf in self.leaf_map.items()}

    @staticmethod
    def _connected(adj) -> bool:
        start = next(iter(adj))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(adj)

    @property
    def n(self) -> int:
        return len(self.leaf_map)

    def leaf_of(self, v: int) -> int:
        return self.leaf_map[v]

    def vertex_of(self, leaf: int) -> int:
        return self._vertex_of[leaf]

    def rooted_at(self, root: int):
        parent = {root: None}
        order = [root]
        stack = [root]
        while stack:
            x = stack.pop()
            for y in self.tree_adj[x]:
                if y not in parent:
                    parent[y] = x
                    order.append(y)
                    stack.append(y)
        return parent, order

    def leaves_below(self, parent, order):
        below = {node: set() for node in parent}
        for node in reversed(order):
            if node in self._vertex_of:
                below[node].add(self._vertex_of[node])
            p = parent[node]
            if p is not None:
                below[p] |= below[node]
        return {node: frozenset(s) for node, s in below.items()}

    def edge_sides(self) -> list[tuple[tuple[int, int], frozenset]]:
        """(edge, vertex set on the child side) for every tree edge."""
        root = min(self.tree_adj)
        parent, order = self.rooted_at(root)
        below = self.leaves_below(parent, order)
        out = []
        for a, b in self.edges:
            child = b if parent.get(b) == a else a
            out.append(((a, b), below[child]))
        return out


def decomposition_width(g: Graph, dec: RankDecomposition) -> int:
    if dec.n != g.n:
        raise PreconditionError("decomposition maps a different vertex count")
    width = 0
    for _, side in dec.edge_sides():
        width = max(width, cutrank(g, side))
    return width


# -- layer decomposition --------------------------------------------------------


def _adj_masks(g: Graph) -> list[int]:
    return [int.from_bytes(np.ascontiguousarray(g.bits[v]).tobytes(), "little") for v in range(g.n)]


def _mask_of(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def _mask_list(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def xor_rw1_decompose(g: Graph, dec: RankDecomposition) -> list[list[tuple[int, int]]]:
    """Split E(G) into exactly r = width edge layers whose symmetric
    difference is E(G), each of cut-rank <= 1 across every tree edge."""
    if g.n > 64:
        raise PreconditionError("layer decomposition is limited to n <= 64")
    r = decomposition_width(g, dec)
    if r < 1:
        raise PreconditionError("decomposition width must be at least 1 (graph has edges)")
    adj = _adj_masks(g)
    blocks = _recursion_blocks(g, dec, adj)
    if any(len(lb) > r for _, lb in blocks):
        raise InternalInvariantError("a split used more basis vectors than the width")
    sides = [_mask_of(side) for _, side in dec.edge_sides()]

    layers = _layers_from_assignment(blocks, [list(range(len(b))) for _, b in blocks], r, g.n)
    if _certified(layers, sides, g.n):
        return [_layer_edges(rows) for rows in layers]
    found = _search_assignment(blocks, sides, r, g.n)
    if found is None:
        order = caterpillar_order(dec)
        if order is not None:
            found = _linear_interface_search(adj, order, r, g.n, sides)
    if found is None:
        raise InternalInvariantError(
            "no layer assignment certifies cut-rank <= 1 on every tree edge"
        )
    return [_layer_edges(rows) for rows in found]


def caterpillar_order(dec: RankDecomposition):
    """Leaf order when the decomposition tree is a caterpillar, else None."""
    internal = [x for x, nbrs in dec.tree_adj.items() if len(nbrs) == 3]
    if not internal:
        leaves = sorted(dec.tree_adj)
        return [dec.vertex_of(leaf) for leaf in leaves]
    degree_in = {x: sum(1 for y in dec.tree_adj[x] if y in set(internal)) for x in internal}
    if any(d > 2 for d in degree_in.values()):
        return None
    ends = [x for x in internal if degree_in[x] <= 1]
    if len(internal) == 1:
        path = internal
    else:
        if len(ends) != 2:
            return None
        path = [min(ends)]
        prev = None
        while True:
            nxt = [y for y in dec.tree_adj[path[-1]] if y in set(internal) and y != prev]
            if not nxt:
                break
            prev = path[-1]
            path.append(nxt[0])
        if len(path) != len(internal):
            return None
    order = []
    for node in path:
        for leaf in sorted(y for y in dec.tree_adj[node] if len(dec.tree_adj[y]) == 1):
            order.append(dec.vertex_of(leaf))
    return order


def _linear_interface_search(adj, order, r, n, sides, budget: int = 400_000):
    """Exact layer search along a linear layout.

    Walks the order right to left maintaining, per layer, the set of
    processed vertices that still have layer edges to the removed suffix
    and the common suffix neighborhood they share. At every step the new
    suffix vertex's edges are routed through layer choices; states whose
    accumulated interfaces contradict the graph are pruned immediately.
    """
    steps = [0]

    prefix_mask = [0] * (n + 1)
    for t in range(n):
        prefix_mask[t + 1] = prefix_mask[t] | (1 << order[t])

    layer_rows = [[0] * n for _ in range(r)]

    def add_star(layer, center, mask):
        layer_rows[layer][center] ^= mask
        for u in _mask_list(mask):
            layer_rows[layer][u] ^= 1 << center

    def dfs(t, state):
        # state: tuple of (S_mask, Lam_mask); invariant: for every vertex u in
        # the prefix, xor of Lam over layers with u in S equals adj[u] beyond.
        if steps[0] > budget:
            return False
        steps[0] += 1
        if t == 0:
            v = order[0]
            beyond = 0
            for s, lam in state:
                if s >> v & 1:
                    beyond ^= lam
            return beyond == adj[v]
        v = order[t]
        before = prefix_mask[t + 1]
        beyond = 0
        for s, lam in state:
            if s >> v & 1:
                beyond ^= lam
        if beyond != adj[v] & ~before:
            return False
        b = adj[v] & prefix_mask[t]
        anchored = [i for i in range(r) if state[i][0] & prefix_mask[t]]
        free = [i for i in range(r) if not (state[i][0] & prefix_mask[t])]
        for subset in range(1 << len(anchored)):
            rem = b
            for bit, i in enumerate(anchored):
                if subset >> bit & 1:
                    rem ^= state[i][0] & prefix_mask[t]
            targets = [None] if rem == 0 else free
            for tgt in targets:
                new_state = []
                moves = []
                ok = True
                for i in range(r):
                    s, lam = state[i]
                    p = s & prefix_mask[t]
                    if i in anchored:
                        bit = anchored.index(i)
                        take = subset >> bit & 1
                        new_state.append((p, lam | (1 << v) if take else lam))
                        if take:
                            moves.append((i, p))
                    elif tgt == i:
                        new_state.append((rem, 1 << v))
                        moves.append((i, rem))
                    else:
                        new_state.append((0, 0))
                if not ok:
                    continue
                for i, mask in moves:
                    add_star(i, v, mask)
                if dfs(t - 1, tuple(new_state)):
                    return True
                for i, mask in moves:
                    add_star(i, v, mask)
        return False

    last = order[n - 1]
    root_mask = adj[last]
    init = [(0, 0)] * r
    if root_mask:
        init[0] = (root_mask, 1 << last)
        add_star(0, last, root_mask)
    if dfs(n - 2, tuple(init)):
        if _certified(layer_rows, sides, n):
            return [list(rows) for rows in layer_rows]
    return None


def _recursion_blocks(g: Graph, dec: RankDecomposition, adj):
    """Run the split recursion; returns [(level_vertices, [(S_mask, A_mask)...])].

    Each (S, A) block is one basis vector's rank-1 cross contribution at its
    level; the XOR of a level's blocks is exactly the level's cross edges.
    """
    out = []
    traces = [frozenset(side) for _, side in dec.edge_sides()]

    def recurse(vertices: frozenset):
        if len(vertices) <= 1:
            return
        best = None
        for side in traces:
            inside = vertices & side
            if not inside or inside == vertices:
                continue
            v1 = inside if min(vertices) in inside else vertices - inside
            v2 = vertices - v1
            key = (max(len(v1), len(v2)), tuple(sorted(v1)))
            if best is None or key < best[0]:
                best = (key, v1, v2)
        if best is None:
            raise InternalInvariantError("no tree edge separates the current vertex set")
        _, v1, v2 = best
        m2 = _mask_of(v2)
        v1s = sorted(v1)
        vectors = _original_basis(v1s, adj, m2)
        solve = _coefficient_solver(vectors)
        s_masks = [0] * len(vectors)
        for u in v1s:
            row = adj[u] & m2
            if row:
                for i in _mask_list(solve(row)):
                    s_masks[i] |= 1 << u
        blocks = [(s, a) for s, a in zip(s_masks, vectors) if s and a]
        out.append((v1 | v2, blocks))
        recurse(frozenset(v1))
        recurse(frozenset(v2))

    recurse(frozenset(range(g.n)))
    return out


def _original_basis(v1_sorted, adj, m2):
    """First linearly independent neighborhood rows, in vertex order."""
    vectors = []
    reduced = []
    for u in v1_sorted:
        row = adj[u] & m2
        work = row
        for b in reduced:
            pivot = b & -b
            if work & pivot:
                work ^= b
        if work:
            vectors.append(row)
            reduced.append(work)
    return vectors


def _coefficient_solver(vectors: list[int]):
    """Returns a solver expressing rows as GF(2) combinations of vectors."""
    basis: list[int] = []
    tags: list[int] = []
    for i, vec in enumerate(vectors):
        w = vec
        t = 1 << i
        for b, bt in zip(basis, tags):
            pivot = b & -b
            if w & pivot:
                w ^= b
                t ^= bt
        basis.append(w)
        tags.append(t)

    def solve(row: int) -> int:
        work = row
        comb = 0
        for b, t in zip(basis, tags):
            pivot = b & -b
            if work & pivot:
                work ^= b
                comb ^= t
        if work:
            raise InternalInvariantError("row outside the basis span")
        return comb

    return solve


def _layers_from_assignment(blocks, assignments, r, n):
    layers = [[0] * n for _ in range(r)]
    for (_, level_blocks), assign in zip(blocks, assignments):
        for (s_mask, a_mask), layer in zip(level_blocks, assign):
            rows = layers[layer]
            for u in _mask_list(s_mask):
                rows[u] ^= a_mask
            for v in _mask_list(a_mask):
                rows[v] ^= s_mask
    return layers


def _certified(layers, sides, n) -> bool:
    for rows in layers:
        for side in sides:
            comp = ((1 << n) - 1) ^ side
            values = {rows[u] & comp for u in _mask_list(side)}
            values.discard(0)
            if len(values) > 1:
                return False
    return True


def layer_certificate(g: Graph, dec: RankDecomposition, layers) -> tuple[bool, list[str]]:
    """Check XOR correctness and per-edge cut-rank <= 1 for explicit layers."""
    n = g.n
    rows = [[0] * n for _ in layers]
    for i, layer in enumerate(layers):
        for u, v in layer:
            rows[i][u] ^= 1 << v
            rows[i][v] ^= 1 << u
    violations = []
    xor = [0] * n
    for rs in rows:
        for u in range(n):
            xor[u] ^= rs[u]
    adj = _adj_masks(g)
    if xor != adj:
        violations.append("xor of layers differs from E(G)")
    for i, rs in enumerate(rows):
        for edge, side in dec.edge_sides():
            side_mask = _mask_of(side)
            comp = ((1 << n) - 1) ^ side_mask
            values = {rs[u] & comp for u in _mask_list(side_mask)}
            values.discard(0)
            if len(values) > 1:
                violations.append(f"layer {i} has cut-rank > 1 at tree edge {edge}")
    return not violations, violations


def _layer_edges(rows) -> list[tuple[int, int]]:
    out = []
    for u, row in enumerate(rows):
        for v in _mask_list(row):
            if v > u:
                out.append((u, v))
    return out


def _search_assignment(blocks, sides, r, n):
    """Backtracking over block-to-layer injections with per-edge rank checks."""
    budget = [500_000]
    relevant = []  # per level: side masks its blocks can cross
    layers = [[0] * n for _ in range(r)]

    level_blocks = [lb for _, lb in blocks]

    def side_crossed(s_mask, a_mask, side):
        comp = ((1 << n) - 1) ^ side
        return (s_mask & side and a_mask & comp) or (s_mask & comp and a_mask & side)

    for _, lb in blocks:
        rel = set()
        for si, side in enumerate(sides):
            for s_mask, a_mask in lb:
                if side_crossed(s_mask, a_mask, side):
                    rel.add(si)
                    break
        relevant.append(sorted(rel))

    def apply(s_mask, a_mask, layer, sign_rows):
        for u in _mask_list(s_mask):
            sign_rows[layer][u] ^= a_mask
        for v in _mask_list(a_mask):
            sign_rows[layer][v] ^= s_mask

    def rank_ok(layer, level_idx):
        for si in relevant[level_idx]:
            side = sides[si]
            comp = ((1 << n) - 1) ^ side
            values = {layers[layer][u] & comp for u in _mask_list(side)}
            values.discard(0)
            if len(values) > 1:
                return False
        return True

    def dfs(level_idx):
        if budget[0] <= 0:
            return False
        budget[0] -= 1
        if level_idx == len(level_blocks):
            return _certified(layers, sides, n)
        lb = level_blocks[level_idx]
        if not lb:
            return dfs(level_idx + 1)
        return place(level_idx, 0, 0)

    def place(level_idx, block_idx, used_mask):
        lb = level_blocks[level_idx]
        if block_idx == len(lb):
            # Prune: every layer this level touched must look rank-1 at the
            # edges the level can cross.
            for layer in range(r):
                if used_mask >> layer & 1 and not rank_ok(layer, level_idx):
                    return False
            return dfs(level_idx + 1)
        s_mask, a_mask = lb[block_idx]
        for layer in range(r):
            if used_mask >> layer & 1:
                continue
            apply(s_mask, a_mask, layer, layers)
            if place(level_idx, block_idx + 1, used_mask | (1 << layer)):
                return True
            apply(s_mask, a_mask, layer, layers)
        return False

    if dfs(0):
        return [list(rows) for rows in layers]
    return None


# -- JSON -------------------------------------------------------------------------


def decomposition_to_json(dec: RankDecomposition) -> dict:
    return {
        "edges": [list(e) for e in dec.edges],
        "leaf_map": {str(v): leaf for v, leaf in sorted(dec.leaf_map.items())},
    }


def decomposition_from_json(obj, where: str = "decomposition") -> RankDecomposition:
    edges = expect_key(obj, "edges", where)
    leaf_map = expect_key(obj, "leaf_map", where)
    try:
        return RankDecomposition(
            [tuple(e) for e in edges], {int(v): leaf for v, leaf in leaf_map.items()}
        )
    except PreconditionError as exc:
        raise InputError(f"{where}: {exc}") from None
