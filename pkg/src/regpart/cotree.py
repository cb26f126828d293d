"""Plane trees and embedded m-partite cographs.

A plane tree orders the children of every node left to right; the leaves in
DFS order are the graph vertices of an embedded cotree. Adjacency of two
leaves is read off the function attached to their least common ancestor,
with the left/right orientation of the two branches deciding the argument
order.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError, PreconditionError
from .graph import Graph
from .jsonio import expect_key


class PlaneTree:
    """Rooted tree with ordered children and precomputed traversal tables."""

    __slots__ = (
        "children",
        "root",
        "size",
        "parent",
        "depth",
        "tin",
        "tout",
        "leaves",
        "leaf_pos",
        "leaf_lo",
        "leaf_hi",
        "_up",
        "_np",
    )

    def __init__(self, children: list[list[int]], root: int):
        size = len(children)
        if not 0 <= root < size:
            raise PreconditionError("root out of range")
        self.children = [list(c) for c in children]
        self.root = root
        self.size = size
        parent = [-1] * size
        depth = [0] * size
        tin = [-1] * size
        tout = [-1] * size
        leaves: list[int] = []
        leaf_lo = [0] * size
        leaf_hi = [0] * size
        clock = 0
        # Iterative DFS keeping child order; second visit closes the interval.
        stack: list[tuple[int, bool]] = [(root, False)]
        seen = 0
        while stack:
            node, closed = stack.pop()
            if closed:
                tout[node] = clock
                leaf_hi[node] = len(leaves)
                continue
            if tin[node] != -1:
                raise PreconditionError("node visited twice: not a tree")
            tin[node] = clock
            clock += 1
            seen += 1
            leaf_lo[node] = len(leaves)
            if not self.children[node]:
                leaves.append(node)
            stack.append((node, True))
            for ch in reversed(self.children[node]):
                if not 0 <= ch < size:
                    raise PreconditionError(f"child {ch} out of range")
                parent[ch] = node
                depth[ch] = depth[node] + 1
                stack.append((ch, False))
        if seen != size:
            raise PreconditionError("disconnected node list: not a tree")
        self.parent = parent
        self.depth = depth
        self.tin = tin
        self.tout = tout
        self.leaves = leaves
        self.leaf_pos = {leaf: i for i, leaf in enumerate(leaves)}
        self.leaf_lo = leaf_lo
        self.leaf_hi = leaf_hi
        self._up = None
        self._np = None

    def arrays(self):
        """Cached numpy views: (parent, depth, tin, tout, node_at_tin)."""
        if self._np is None:
            parent = np.asarray(self.parent, dtype=np.int64)
            depth = np.asarray(self.depth, dtype=np.int64)
            tin = np.asarray(self.tin, dtype=np.int64)
            tout = np.asarray(self.tout, dtype=np.int64)
            node_at = np.empty(self.size, dtype=np.int64)
            node_at[tin] = np.arange(self.size, dtype=np.int64)
            self._np = (parent, depth, tin, tout, node_at)
        return self._np

    def is_ancestor(self, a: int, x: int) -> bool:
        """True iff a is an ancestor of x (or a == x)."""
        return self.tin[a] <= self.tin[x] and self.tout[x] <= self.tout[a]

    def _lift_tables(self):
        if self._up is None:
            levels = max(1, max(self.depth).bit_length()) if self.size > 1 else 1
            up = [list(self.parent)]
            for k in range(1, levels):
                prev = up[k - 1]
                up.append([prev[prev[v]] if prev[v] >= 0 else -1 for v in range(self.size)])
            self._up = up
        return self._up

    def lca(self, u: int, v: int) -> int:
        if self.is_ancestor(u, v):
            return u
        if self.is_ancestor(v, u):
            return v
        up = self._lift_tables()
        x = u
        for k in range(len(up) - 1, -1, -1):
            anc = up[k][x]
            if anc != -1 and not self.is_ancestor(anc, v):
                x = anc
        return self.parent[x]

    def ancestor_at_depth(self, v: int, d: int) -> int:
        """Ancestor of v at the given depth (root has depth 0)."""
        if d > self.depth[v] or d < 0:
            raise PreconditionError("no ancestor at that depth")
        up = self._lift_tables()
        delta = self.depth[v] - d
        k = 0
        while delta:
            if delta & 1:
                v = up[k][v]
            delta >>= 1
            k += 1
        return v

    def subtree_nodes(self, v: int) -> list[int]:
        out = []
        stack = [v]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(reversed(self.children[x]))
        return out


def lca_with_side(tree: PlaneTree, u: int, v: int) -> tuple[int, bool]:
    """(meet, u_is_left): least common ancestor of two distinct leaves and
    whether the branch toward u leaves it before the branch toward v."""
    if u == v:
        raise PreconditionError("lca_with_side needs distinct leaves")
    meet = tree.lca(u, v)
    return meet, tree.tin[u] < tree.tin[v]


class EmbeddedCotree:
    """Plane tree with leaf colors in 1..m and an [m]x[m] -> {0,1} function
    at every internal node; generates a graph on the leaves."""

    __slots__ = ("tree", "m", "leaf_color", "node_fn")

    def __init__(self, tree: PlaneTree, m: int, leaf_color, node_fn):
        if m < 1:
            raise PreconditionError("need m >= 1")
        self.tree = tree
        self.m = m
        self.leaf_color = list(leaf_color)
        self.node_fn = list(node_fn)
        for v in range(tree.size):
            if tree.children[v]:
                fn = self.node_fn[v]
                if fn is None or len(fn) != m or any(len(row) != m for row in fn):
                    raise PreconditionError(f"internal node {v} lacks an {m}x{m} function")
                self.node_fn[v] = tuple(tuple(int(b) for b in row) for row in fn)
            else:
                c = self.leaf_color[v]
                if not 1 <= c <= m:
                    raise PreconditionError(f"leaf {v} color {c} outside 1..{m}")

    @property
    def n(self) -> int:
        return len(self.tree.leaves)

    def adjacent(self, u: int, v: int) -> bool:
        """Adjacency of two distinct leaf nodes."""
        meet, u_left = lca_with_side(self.tree, u, v)
        fn = self.node_fn[meet]
        cu, cv = self.leaf_color[u], self.leaf_color[v]
        return bool(fn[cu - 1][cv - 1] if u_left else fn[cv - 1][cu - 1])

    def materialize(self) -> Graph:
        """Graph on the leaves in leaf order."""
        tree = self.tree
        n = self.n
        adj = np.zeros((n, n), dtype=bool)
        colors = np.array([self.leaf_color[leaf] for leaf in tree.leaves], dtype=np.int64)
        color_pos = [np.flatnonzero(colors == c) for c in range(1, self.m + 1)]
        for v in range(tree.size):
            kids = tree.children[v]
            if not kids:
                continue
            fn = self.node_fn[v]
            hi_v = tree.leaf_hi[v]
            for child in kids[:-1]:
                lo, hi = tree.leaf_lo[child], tree.leaf_hi[child]
                if lo == hi or hi == hi_v:
                    continue
                for c1 in range(self.m):
                    row_pos = color_pos[c1]
                    rows = row_pos[np.searchsorted(row_pos, lo) : np.searchsorted(row_pos, hi)]
                    if rows.size == 0:
                        continue
                    for c2 in range(self.m):
                        if not fn[c1][c2]:
                            continue
                        col_pos = color_pos[c2]
                        cols = col_pos[np.searchsorted(col_pos, hi) : np.searchsorted(col_pos, hi_v)]
                        if cols.size:
                            adj[np.ix_(rows, cols)] = True
        return Graph.from_bool_matrix(adj)


def cotree_adjacent(cotree: EmbeddedCotree, u: int, v: int) -> bool:
    return cotree.adjacent(u, v)


def materialize(cotree: EmbeddedCotree) -> Graph:
    return cotree.materialize()


def restrict_cotree(cotree: EmbeddedCotree, vertices) -> tuple[EmbeddedCotree, list[int]]:
    """Restrict to a subset of graph vertices (leaf positions).

    Builds the virtual tree on the selected leaves and their pairwise meets;
    child order, node functions and leaf colors are inherited, so the
    restriction materializes exactly the induced subgraph. Returns the new
    cotree plus the original vertex ids in the new leaf order.
    """
    tree = cotree.tree
    verts = sorted(set(int(v) for v in vertices))
    if not verts:
        raise PreconditionError("cannot restrict to an empty leaf set")
    leaf_nodes = [tree.leaves[p] for p in verts]
    keep = set(leaf_nodes)
    for a, b in zip(leaf_nodes, leaf_nodes[1:]):
        keep.add(tree.lca(a, b))
    nodes = sorted(keep, key=lambda x: tree.tin[x])
    new_id = {x: i for i, x in enumerate(nodes)}
    children: list[list[int]] = [[] for _ in nodes]
    stack: list[int] = []
    for x in nodes:
        while stack and not tree.is_ancestor(stack[-1], x):
            stack.pop()
        if stack:
            children[new_id[stack[-1]]].append(new_id[x])
        stack.append(x)
    new_tree = PlaneTree(children, 0)
    leaf_color = [0] * len(nodes)
    node_fn: list = [None] * len(nodes)
    for x in nodes:
        i = new_id[x]
        if children[i]:
            node_fn[i] = cotree.node_fn[x]
        else:
            leaf_color[i] = cotree.leaf_color[x]
    restricted = EmbeddedCotree(new_tree, cotree.m, leaf_color, node_fn)
    return restricted, verts


# -- JSON --------------------------------------------------------------------


def cotree_to_json(cotree: EmbeddedCotree) -> dict:
    nodes = []
    for v in range(cotree.tree.size):
        kids = cotree.tree.children[v]
        if kids:
            nodes.append({"children": kids, "fn": [list(r) for r in cotree.node_fn[v]]})
        else:
            nodes.append({"leaf_color": cotree.leaf_color[v]})
    return {"m": cotree.m, "nodes": nodes, "root": cotree.tree.root}


def cotree_from_json(obj, where: str = "cotree") -> EmbeddedCotree:
    m = expect_key(obj, "m", where)
    nodes = expect_key(obj, "nodes", where)
    root = expect_key(obj, "root", where)
    if not isinstance(nodes, list) or not nodes:
        raise InputError(f"{where}/nodes: expected non-empty list")
    children = []
    colors = []
    fns = []
    for i, spec in enumerate(nodes):
        if "children" in spec:
            kids = spec["children"]
            if not isinstance(kids, list) or not kids:
                raise InputError(f"{where}/nodes/{i}/children: expected non-empty list")
            children.append(kids)
            colors.append(0)
            fns.append(expect_key(spec, "fn", f"{where}/nodes/{i}"))
        else:
            children.append([])
            colors.append(expect_key(spec, "leaf_color", f"{where}/nodes/{i}"))
            fns.append(None)
    try:
        tree = PlaneTree(children, root)
        return EmbeddedCotree(tree, m, colors, fns)
    except PreconditionError as exc:
        raise InputError(f"{where}: {exc}") from None


def plane_tree_to_json(tree: PlaneTree) -> dict:
    return {"nodes": [{"children": tree.children[v]} for v in range(tree.size)], "root": tree.root}


def plane_tree_from_json(obj, where: str = "tree") -> PlaneTree:
    nodes = expect_key(obj, "nodes", where)
    root = expect_key(obj, "root", where)
    if not isinstance(nodes, list) or not nodes:
        raise InputError(f"{where}/nodes: expected non-empty list")
    children = []
    for i, spec in enumerate(nodes):
        kids = expect_key(spec, "children", f"{where}/nodes/{i}")
        if not isinstance(kids, list):
            raise InputError(f"{where}/nodes/{i}/children: expected list")
        children.append(kids)
    try:
        return PlaneTree(children, root)
    except PreconditionError as exc:
        raise InputError(f"{where}: {exc}") from None
