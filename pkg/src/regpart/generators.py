"""Deterministic constructions and seeded random generators.

Every random generator is driven by SplitMix64, a fixed 64-bit PRNG defined
by its update constants (documented on the class), so that identical
(parameters, seed) pairs reproduce byte-identical instances anywhere.
"""

from __future__ import annotations

from itertools import combinations

from .cotree import EmbeddedCotree, PlaneTree, restrict_cotree
from .encodings import SCDecomposition
from .errors import PreconditionError
from .gf2 import RankDecomposition
from .graph import Graph
from .prng import SplitMix64
from .treepart import TreeMeasure

# -- deterministic families --------------------------------------------------


def half_graph(n: int) -> Graph:
    """2n vertices a_1..a_n, b_1..b_n (a's first); a_i ~ b_j iff i <= j."""
    if n < 1:
        raise PreconditionError("half_graph needs n >= 1")
    edges = [(i, n + j) for i in range(n) for j in range(n) if i <= j]
    return Graph(2 * n, edges)


def shift_graph(n: int, k: int) -> tuple[Graph, list[tuple[int, ...]]]:
    """Shift graph on increasing k-tuples from 1..n; returns (graph, tuples)."""
    if not n > k >= 2:
        raise PreconditionError("shift_graph needs n > k >= 2")
    tuples = [t for t in combinations(range(1, n + 1), k)]
    index = {t: i for i, t in enumerate(tuples)}
    edges = set()
    for t in tuples:
        shifted_candidates = [u for u in tuples if u[: k - 1] == t[1:]]
        for u in shifted_candidates:
            edges.add((min(index[t], index[u]), max(index[t], index[u])))
    return Graph(len(tuples), sorted(edges)), tuples


def es_graph(n: int) -> tuple[Graph, list[int], list[frozenset]]:
    """Bipartite shattering graph on [n] union 2^[n]; i ~ I iff i in I.

    Vertices 0..n-1 are the ground elements 1..n; vertices n.. are the
    subsets in binary-counter order. Returns (graph, elements, subsets).
    """
    if n > 20:
        raise PreconditionError("es_graph: n too large (2^n vertices)")
    if n < 1:
        raise PreconditionError("es_graph needs n >= 1")
    subsets = [frozenset(i + 1 for i in range(n) if (mask >> i) & 1) for mask in range(2**n)]
    edges = []
    for si, sub in enumerate(subsets):
        for i in sub:
            edges.append((i - 1, n + si))
    return Graph(n + 2**n, edges), list(range(1, n + 1)), subsets


# -- random plane trees and cotrees ------------------------------------------


def random_plane_tree(n: int, max_child: int, seed: int) -> PlaneTree:
    """Random plane tree on n nodes by sequential attachment (capacity-capped)."""
    if n < 1:
        raise PreconditionError("need n >= 1 nodes")
    if max_child < 2:
        raise PreconditionError("max_child must be >= 2")
    rng = SplitMix64(seed)
    children: list[list[int]] = [[] for _ in range(n)]
    open_nodes = [0]
    for v in range(1, n):
        idx = rng.below(len(open_nodes))
        parent = open_nodes[idx]
        children[parent].append(v)
        if len(children[parent]) >= max_child:
            open_nodes.pop(idx)
        open_nodes.append(v)
    return PlaneTree(children, 0)


def leaf_uniform_tree_measure(tree: PlaneTree) -> TreeMeasure:
    weights = [0] * tree.size
    for leaf in tree.leaves:
        weights[leaf] = 1
    return TreeMeasure(weights)


def random_tree_measure(tree: PlaneTree, seed: int, max_weight: int = 8) -> TreeMeasure:
    """Random positive integer weights on all nodes, normalized to total 1."""
    rng = SplitMix64(seed)
    weights = [1 + rng.below(max_weight) for _ in range(tree.size)]
    return TreeMeasure(weights)


def _random_leaf_tree(rng: SplitMix64, n_leaves: int, max_child: int) -> list[list[int]]:
    """Children lists for a plane tree with exactly n_leaves leaves.

    Unary internal nodes appear with small probability (capped chains), so
    the chaining machinery gets exercised.
    """
    children: list[list[int]] = []

    def build(count: int, unary_budget: int) -> int:
        node = len(children)
        children.append([])
        if count == 1:
            # Leaf, or a short unary chain ending in a leaf.
            if unary_budget > 0 and rng.chance(1, 6):
                child = build(1, unary_budget - 1)
                children[node].append(child)
            return node
        if unary_budget > 0 and rng.chance(1, 8):
            child = build(count, unary_budget - 1)
            children[node].append(child)
            return node
        k = 2 + rng.below(min(max_child, count) - 1)
        # Random composition of count into k positive parts.
        cuts = sorted(rng.distinct(k - 1, count - 1))
        parts = []
        prev = 0
        for c in cuts:
            parts.append(c + 1 - prev)
            prev = c + 1
        parts.append(count - prev)
        for part in parts:
            child = build(part, unary_budget)
            children[node].append(child)
        return node

    build(n_leaves, unary_budget=3)
    return children


def random_cotree(n: int, m: int, max_child: int, seed: int) -> EmbeddedCotree:
    """Random embedded m-partite cotree with n leaves."""
    if n < 1 or m < 1:
        raise PreconditionError("need n >= 1 leaves and m >= 1 colors")
    if max_child < 2:
        raise PreconditionError("max_child must be >= 2")
    rng = SplitMix64(seed)
    children = _random_leaf_tree(rng, n, max_child)
    tree = PlaneTree(children, 0)
    leaf_color = [0] * tree.size
    for leaf in tree.leaves:
        leaf_color[leaf] = 1 + rng.below(m)
    node_fn: list[tuple[tuple[int, ...], ...] | None] = [None] * tree.size
    for v in range(tree.size):
        if children[v]:
            node_fn[v] = tuple(tuple(rng.below(2) for _ in range(m)) for _ in range(m))
    return EmbeddedCotree(tree, m, leaf_color, node_fn)


# -- random graphs -------------------------------------------------------------


def random_degenerate(n: int, d: int, seed: int) -> Graph:
    """Each new vertex picks at most d earlier neighbors, so degeneracy <= d."""
    if n < 1 or d < 0:
        raise PreconditionError("need n >= 1 and d >= 0")
    rng = SplitMix64(seed)
    edges = []
    for v in range(1, n):
        k = rng.below(min(d, v) + 1)
        if k:
            for u in rng.distinct(k, v):
                edges.append((u, v))
    return Graph(n, edges)


def random_regular(n: int, d: int, seed: int, max_tries: int = 1000) -> Graph:
    """Pairing-model d-regular graph; rejects pairings with loops/multi-edges."""
    if n <= d or d < 1:
        raise PreconditionError("need n > d >= 1")
    if (n * d) % 2 != 0:
        raise PreconditionError("n*d must be even")
    rng = SplitMix64(seed)
    stubs_base = [v for v in range(n) for _ in range(d)]
    for _ in range(max_tries):
        stubs = list(stubs_base)
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            if u == v or (min(u, v), max(u, v)) in edges:
                ok = False
                break
            edges.add((min(u, v), max(u, v)))
        if ok:
            return Graph(n, sorted(edges))
    raise PreconditionError(f"pairing model failed to produce a simple graph in {max_tries} tries")


def random_sc(n: int, depth: int, seed: int, max_child: int = 4) -> SCDecomposition:
    """Random SC-decomposition: depth-d tree, all leaves at depth d, random flips."""
    if n < 1 or depth < 1:
        raise PreconditionError("need n >= 1 and depth >= 1")
    rng = SplitMix64(seed)
    children: list[list[int]] = []
    leaf_vertex: dict[int, int] = {}
    counter = [0]

    def build(count: int, levels_left: int) -> int:
        node = len(children)
        children.append([])
        if levels_left == 0:
            leaf_vertex[node] = counter[0]
            counter[0] += 1
            return node
        if count == 1:
            children[node].append(build(1, levels_left - 1))
            return node
        if levels_left == 1:
            k = count  # all remaining leaves fan out at the last level
        else:
            k = min(count, 2 + rng.below(max_child - 1))
        cuts = sorted(rng.distinct(k - 1, count - 1))
        parts = []
        prev = 0
        for c in cuts:
            parts.append(c + 1 - prev)
            prev = c + 1
        parts.append(count - prev)
        for part in parts:
            children[node].append(build(part, levels_left - 1))
        return node

    build(n, depth)
    tree = PlaneTree(children, 0)
    flips = [frozenset(v for v in range(n) if rng.chance(1, 2)) for _ in range(depth)]
    return SCDecomposition(tree, leaf_vertex, flips)


def random_graph(n: int, num, den, seed: int) -> Graph:
    """Erdos-Renyi-style graph with edge probability num/den."""
    rng = SplitMix64(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.chance(num, den)]
    return Graph(n, edges)


def random_two_covered(n: int, m: int, p: int, seed: int):
    """Planted 2-covered instance.

    Builds a global embedded m-partite cograph on n leaves, colors the
    vertices with p cover classes, and restricts the global cotree to every
    pair of classes, so each pairwise union induces exactly the pair
    cotree's materialization. Returns (graph, cover_blocks, pair_cotrees)
    where pair_cotrees maps (i, j) -> (cotree, vertex list in leaf order).
    """
    if p < 2 or n < 2 * p:
        raise PreconditionError("need p >= 2 and n >= 2p")
    rng = SplitMix64(seed)
    cotree = random_cotree(n, m, max_child=4, seed=rng.next64())
    graph = cotree.materialize()
    # Cover classes: at least two vertices each, then uniform.
    assignment = [i % p for i in range(2 * p)] + [rng.below(p) for _ in range(n - 2 * p)]
    rng.shuffle(assignment)
    blocks = [sorted(v for v in range(n) if assignment[v] == i) for i in range(p)]
    pair_cotrees = {}
    for i in range(p):
        for j in range(i + 1, p):
            union = sorted(blocks[i] + blocks[j])
            sub, verts = restrict_cotree(cotree, union)
            pair_cotrees[(i, j)] = (sub, verts)
    return graph, blocks, pair_cotrees


def random_rank_instance(n: int, r: int, seed: int, max_tries: int = 400):
    """Planted (graph, decomposition) pair of width exactly r.

    Plants r layers along a random linear (caterpillar) layout, each built
    with cut-rank <= 1 at every cut of the layout, then XORs them. Layer
    construction stays inside the canonical interface moves that the layer
    search enumerates, so a certified decomposition is always recoverable.
    Attempts whose realized width is not exactly r are rejected
    deterministically by stepping the seed.
    """
    from .gf2 import caterpillar_order, decomposition_width, xor_rw1_decompose

    if n < 4 or r < 1:
        raise PreconditionError("need n >= 4 and r >= 1")
    rng = SplitMix64(seed)
    for _ in range(max_tries):
        sub_seed = rng.next64()
        dec = random_caterpillar_decomposition(n, sub_seed)
        order = caterpillar_order(dec)
        g = _plant_linear_layers(order, n, r, SplitMix64(sub_seed ^ 0x5EED))
        if decomposition_width(g, dec) != r:
            continue
        try:
            xor_rw1_decompose(g, dec)
        except Exception:
            continue
        return g, dec
    raise PreconditionError("failed to plant a rank instance of the requested width")


def random_caterpillar_decomposition(n: int, seed: int) -> RankDecomposition:
    """Caterpillar-shaped rank decomposition (linear layout), shuffled leaf map."""
    rng = SplitMix64(seed)
    if n < 2:
        raise PreconditionError("rank decompositions need n >= 2")
    if n == 2:
        edges = [(0, 1)]
        leaf_order = [0, 1]
    elif n == 3:
        edges = [(0, 3), (1, 3), (2, 3)]
        leaf_order = [0, 1, 2]
    else:
        spine = list(range(n, 2 * n - 2))
        edges = [(spine[i], spine[i + 1]) for i in range(len(spine) - 1)]
        edges += [(0, spine[0]), (1, spine[0])]
        for j in range(1, len(spine) - 1):
            edges.append((j + 1, spine[j]))
        edges += [(n - 2, spine[-1]), (n - 1, spine[-1])]
        leaf_order = list(range(n))
    vertices = list(range(n))
    rng.shuffle(vertices)
    leaf_map = {vertices[i]: leaf_order[i] for i in range(n)}
    return RankDecomposition(sorted((min(a, b), max(a, b)) for a, b in edges), leaf_map)


def _plant_linear_layers(order, n: int, r: int, rng: SplitMix64) -> Graph:
    """XOR of r layers sampled by canonical interface moves along the layout."""
    layer_edges: list[set] = [set() for _ in range(r)]
    active: list[set] = [set() for _ in range(r)]

    def rand_subset(pool, num, den):
        return {x for x in pool if rng.chance(num, den)}

    last = order[-1]
    seed_set = rand_subset(order[:-1], 2, 3)
    if seed_set:
        active[0] = seed_set
        layer_edges[0].update((min(last, u), max(last, u)) for u in seed_set)
    for t in range(n - 2, 0, -1):
        v = order[t]
        prefix = order[:t]
        born = False
        for i in range(r):
            active[i].discard(v)
            if active[i] and rng.chance(1, 2):
                layer_edges[i].update((min(v, u), max(v, u)) for u in active[i])
        for i in range(r):
            if not active[i] and not born and rng.chance(2, 3):
                u_set = rand_subset(prefix, 1, 2)
                if u_set:
                    active[i] = set(u_set)
                    layer_edges[i].update((min(v, u), max(v, u)) for u in u_set)
                    born = True
    edges: set = set()
    for es in layer_edges:
        edges ^= es
    return Graph(n, sorted(edges))


def random_rank_decomposition(n: int, seed: int) -> RankDecomposition:
    """Random subcubic tree with n mapped leaves (caterpillar-free shape)."""
    rng = SplitMix64(seed)
    if n == 1:
        raise PreconditionError("rank decompositions need n >= 2")
    # Grow a subcubic tree: start from an edge between two leaves, then
    # repeatedly split a random leaf into an internal node with two leaves.
    adj: dict[int, list[int]] = {0: [1], 1: [0]}
    leaves = [0, 1]
    next_id = 2
    while len(leaves) < n:
        idx = rng.below(len(leaves))
        leaf = leaves.pop(idx)
        a, b = next_id, next_id + 1
        next_id += 2
        adj[leaf].extend([a, b])
        adj[a] = [leaf]
        adj[b] = [leaf]
        leaves.extend([a, b])
    order = sorted(leaves)
    vertices = list(range(n))
    rng.shuffle(vertices)
    leaf_map = {vertices[i]: order[i] for i in range(n)}
    edges = sorted((min(u, v), max(u, v)) for u in adj for v in adj[u])
    return RankDecomposition(sorted(set(edges)), leaf_map)
