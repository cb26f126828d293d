"""Set-defined embeddings: degenerate graphs, SC-decompositions, the
2-cover product construction, and the 2-partite cotree order rule.

A DefinableGraph is an infinite graph on label tuples given by a decidable
edge predicate; embeddings map finite graph vertices to tuples and are
verified exactly (injective, adjacency preserved and reflected).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .cotree import EmbeddedCotree, PlaneTree
from .errors import ContractViolation, PreconditionError
from .graph import Graph


class DefinableGraph:
    """Edge predicate over pairs of k-tuples, wrapped symmetric and irreflexive."""

    __slots__ = ("arity", "_raw", "descriptor")

    def __init__(self, arity: int, raw_predicate, descriptor: dict | None = None):
        if arity < 1:
            raise PreconditionError("arity must be positive")
        self.arity = arity
        self._raw = raw_predicate
        self.descriptor = descriptor or {"kind": "custom"}

    def edge(self, x: tuple, y: tuple) -> bool:
        if len(x) != self.arity or len(y) != self.arity:
            raise PreconditionError(f"tuple arity must be {self.arity}")
        if x == y:
            return False
        return bool(self._raw(x, y) or self._raw(y, x))


@dataclass
class Embedding:
    arity: int
    mapping: dict[int, tuple]

    def __call__(self, v: int) -> tuple:
        return self.mapping[v]


def verify_embedding(g: Graph, emb: Embedding, universe: DefinableGraph) -> bool:
    """Injective and an isomorphism onto its image: u~v iff the tuples are
    universe-adjacent, checked over all vertex pairs."""
    if emb.arity != universe.arity:
        raise PreconditionError(
            f"embedding arity {emb.arity} does not match universe arity {universe.arity}"
        )
    if set(emb.mapping) != set(range(g.n)):
        return False
    images = list(emb.mapping.values())
    if len(set(images)) != g.n:
        return False
    for u in range(g.n):
        xu = emb.mapping[u]
        for v in range(u + 1, g.n):
            if g.has_edge(u, v) != universe.edge(xu, emb.mapping[v]):
                return False
    return True


def embedding_violations(g: Graph, emb: Embedding, universe: DefinableGraph) -> list[str]:
    """Human-readable reasons a verification fails (empty when it passes)."""
    out = []
    if set(emb.mapping) != set(range(g.n)):
        out.append("embedding does not map exactly V(G)")
        return out
    images = {}
    for v, x in emb.mapping.items():
        if x in images:
            out.append(f"vertices {images[x]} and {v} collapse to the same tuple")
        images[x] = v
    for u in range(g.n):
        for v in range(u + 1, g.n):
            got = universe.edge(emb.mapping[u], emb.mapping[v])
            want = g.has_edge(u, v)
            if got != want:
                out.append(f"pair ({u},{v}): graph={'edge' if want else 'non-edge'} image={'edge' if got else 'non-edge'}")
    return out


# -- degenerate graphs --------------------------------------------------------


def degenerate_universe(d: int) -> DefinableGraph:
    """Arity d+1; edge when one side's own label appears among the other's."""
    k = d + 1

    def raw(x, y):
        return any(x[k - 1] == y[i] or y[k - 1] == x[i] for i in range(k))

    return DefinableGraph(k, raw, {"kind": "degenerate", "d": d})


def embed_degenerate(g: Graph) -> tuple[int, Embedding, DefinableGraph]:
    """Embed via a degeneracy numbering: each vertex lists its earlier
    neighbors' labels, padded with its own label."""
    from .graph import degeneracy_order

    d, _ = degeneracy_order(g)
    return embed_degenerate_into(g, d)


def embed_degenerate_into(g: Graph, d: int) -> tuple[int, Embedding, DefinableGraph]:
    """Embedding into the arity-(d+1) universe for any d >= degeneracy."""
    from .graph import degeneracy_order

    actual, order = degeneracy_order(g)
    if d < actual:
        raise PreconditionError(f"d={d} below the degeneracy {actual}")
    n = g.n
    # Reverse the peeling so every vertex has at most d earlier-numbered neighbors.
    label = [0] * n
    for peel_pos, v in enumerate(order):
        label[v] = n - peel_pos
    mapping = {}
    for v in range(n):
        earlier = sorted(label[u] for u in g.neighbors(v) if label[u] < label[v])
        mapping[v] = tuple(earlier) + tuple([label[v]] * (d + 1 - len(earlier)))
    universe = degenerate_universe(d)
    return d, Embedding(d + 1, mapping), universe


# -- SC-depth decompositions ----------------------------------------------------


class SCDecomposition:
    """Depth-d tree with all leaves at depth d, leaves mapped to vertices,
    plus one flip set of vertices per level 1..d."""

    __slots__ = ("tree", "leaf_vertex", "flips", "depth", "vertex_leaf")

    def __init__(self, tree: PlaneTree, leaf_vertex: dict[int, int], flips):
        self.tree = tree
        self.leaf_vertex = dict(leaf_vertex)
        self.flips = [frozenset(f) for f in flips]
        self.depth = len(self.flips)
        leaves = tree.leaves
        if sorted(self.leaf_vertex) != sorted(leaves):
            raise PreconditionError("leaf_vertex must map exactly the leaves")
        if sorted(self.leaf_vertex.values()) != list(range(len(leaves))):
            raise PreconditionError("leaf vertices must be 0..n-1")
        for leaf in leaves:
            if tree.depth[leaf] != self.depth:
                raise PreconditionError(
                    f"leaf {leaf} at depth {tree.depth[leaf]}, expected {self.depth}"
                )
        self.vertex_leaf = {v: leaf for leaf, v in self.leaf_vertex.items()}

    @property
    def n(self) -> int:
        return len(self.leaf_vertex)


def sc_graph(dec: SCDecomposition) -> Graph:
    """Graph defined by the decomposition: u~v iff an odd number of levels
    at or above their meet flip both (level j acts at tree depth j-1)."""
    n = dec.n
    edges = []
    for u in range(n):
        lu = dec.vertex_leaf[u]
        for v in range(u + 1, n):
            lv = dec.vertex_leaf[v]
            meet_depth = dec.tree.depth[dec.tree.lca(lu, lv)]
            flips = sum(
                1
                for j in range(1, meet_depth + 2)
                if u in dec.flips[j - 1] and v in dec.flips[j - 1]
            )
            if flips % 2 == 1:
                edges.append((u, v))
    return Graph(n, edges)


def sc_universe(d: int) -> DefinableGraph:
    """Arity d+1; edge = distinct last labels and odd agreement count."""
    k = d + 1

    def raw(x, y):
        if x[k - 1] == y[k - 1]:
            return False
        return sum(1 for i in range(d) if x[i] == y[i]) % 2 == 1

    return DefinableGraph(k, raw, {"kind": "sc", "d": d})


def embed_sc(dec: SCDecomposition) -> tuple[Embedding, DefinableGraph]:
    """Coordinate i is the level-i ancestor's id when the vertex is flipped
    at level i, else its own leaf id; last coordinate is the leaf id."""
    d = dec.depth
    mapping = {}
    for v in range(dec.n):
        leaf = dec.vertex_leaf[v]
        coords = []
        for j in range(1, d + 1):
            if v in dec.flips[j - 1]:
                coords.append(dec.tree.ancestor_at_depth(leaf, j - 1))
            else:
                coords.append(leaf)
        coords.append(leaf)
        mapping[v] = tuple(coords)
    return Embedding(d + 1, mapping), sc_universe(d)


# -- 2-cover product embedding ----------------------------------------------------


def cover_product_universe(base: DefinableGraph, p: int) -> DefinableGraph:
    """Universe on (C(p,2)+1)-slot tuples of base tuples, flattened.

    Slot 0 is a mask value; for each pair slot, an edge requires either side
    to mask the slot or the base edge to hold between the slot tuples.
    """
    pairs = list(combinations(range(1, p + 1), 2))
    q = len(pairs) + 1
    k = base.arity

    def slot(x, s):
        return x[s * k : (s + 1) * k]

    def raw(x, y):
        for s in range(1, q):
            if slot(x, s) == slot(x, 0) or slot(y, s) == slot(y, 0):
                continue
            if not base.edge(slot(x, s), slot(y, s)):
                return False
        return True

    return DefinableGraph(
        k * q, raw, {"kind": "two-cover", "p": p, "base": base.descriptor}
    )


def embed_two_cover(
    g: Graph,
    cover_blocks,
    pair_embeddings: dict[tuple[int, int], Embedding],
    base: DefinableGraph,
) -> tuple[Embedding, DefinableGraph]:
    """Combine verified per-pair embeddings of G[V_i u V_j] into one embedding.

    Every vertex gets a fresh mask tuple (labels strictly above anything any
    pair embedding uses, offset by vertex id), placed at slot 0 and at every
    pair slot not involving its own class.
    """
    blocks = [tuple(sorted(b)) for b in cover_blocks]
    p = len(blocks)
    if p < 2:
        raise PreconditionError("cover must have at least 2 classes")
    class_of = {}
    for i, b in enumerate(blocks):
        for v in b:
            class_of[v] = i
    if sorted(class_of) != list(range(g.n)):
        raise PreconditionError("cover must partition V(G)")
    pairs = list(combinations(range(p), 2))
    for (i, j) in pairs:
        emb = pair_embeddings.get((i, j))
        if emb is None:
            raise PreconditionError(f"missing pair embedding for ({i},{j})")
        sub, verts = g.induced(blocks[i] + blocks[j])
        local = Embedding(emb.arity, {li: emb.mapping[v] for li, v in enumerate(verts)})
        if not verify_embedding(sub, local, base):
            raise ContractViolation(
                f"pair embedding ({i},{j}) is not a verified embedding of its induced graph"
            )
    max_label = 0
    for emb in pair_embeddings.values():
        for tup in emb.mapping.values():
            for value in tup:
                max_label = max(max_label, int(value))
    k = base.arity
    universe = cover_product_universe(base, p)
    mapping = {}
    for v in range(g.n):
        i = class_of[v]
        fresh = tuple([max_label + 1 + v] * k)
        coords = list(fresh)
        for (a, b) in pairs:
            if i in (a, b):
                coords.extend(pair_embeddings[(a, b)].mapping[v])
            else:
                coords.extend(fresh)
        mapping[v] = tuple(coords)
    return Embedding(universe.arity, mapping), universe


# -- 2-partite cotree order rule -----------------------------------------------


def two_partite_order_rule(cotree: EmbeddedCotree):
    """Derive the one-color join trees G1, G2 and check the order rule.

    For u of color 1 and v of color 2: u ~ v iff (u before v in leaf order
    and uv in G1) or (v before u and uv in G2). Returns
    (leaf order, G1, G2, verdict).
    """
    if cotree.m != 2:
        raise PreconditionError("order rule applies to 2-partite cotrees")
    tree = cotree.tree
    n = cotree.n

    def derived(bit_row: int, bit_col: int) -> Graph:
        fns = [
            ((cotree.node_fn[v][bit_row][bit_col],),) if tree.children[v] else None
            for v in range(tree.size)
        ]
        colors = [0 if tree.children[v] else 1 for v in range(tree.size)]
        return EmbeddedCotree(tree, 1, colors, fns).materialize()

    g1 = derived(0, 1)
    g2 = derived(1, 0)
    g = cotree.materialize()
    colors = [cotree.leaf_color[leaf] for leaf in tree.leaves]
    verdict = True
    for u in range(n):
        if colors[u] != 1:
            continue
        for v in range(n):
            if colors[v] != 2:
                continue
            if u < v:
                rule = g1.has_edge(u, v)
            else:
                rule = g2.has_edge(u, v)
            if rule != g.has_edge(u, v):
                verdict = False
    return list(range(n)), g1, g2, verdict


# -- JSON -----------------------------------------------------------------------


def embedding_to_json(emb: Embedding, universe: DefinableGraph) -> dict:
    return {
        "universe": universe.descriptor,
        "arity": emb.arity,
        "map": {str(v): [int(x) for x in emb.mapping[v]] for v in sorted(emb.mapping)},
    }


def embedding_from_json(obj, where: str = "embedding") -> tuple[Embedding, DefinableGraph]:
    from .jsonio import InputError, expect_key

    arity = expect_key(obj, "arity", where)
    raw_map = expect_key(obj, "map", where)
    desc = expect_key(obj, "universe", where)
    mapping = {}
    for key, tup in raw_map.items():
        if not isinstance(tup, list) or len(tup) != arity:
            raise InputError(f"{where}/map/{key}: expected {arity}-tuple")
        mapping[int(key)] = tuple(tup)
    universe = universe_from_descriptor(desc, where)
    return Embedding(arity, mapping), universe


def universe_from_descriptor(desc: dict, where: str = "universe") -> DefinableGraph:
    from .jsonio import InputError

    kind = desc.get("kind")
    if kind == "degenerate":
        return degenerate_universe(int(desc["d"]))
    if kind == "sc":
        return sc_universe(int(desc["d"]))
    if kind == "two-cover":
        base = universe_from_descriptor(desc["base"], where)
        return cover_product_universe(base, int(desc["p"]))
    raise InputError(f"{where}: unknown universe kind {kind!r}")


def sc_to_json(dec: SCDecomposition) -> dict:
    nodes = []
    for v in range(dec.tree.size):
        kids = dec.tree.children[v]
        if kids:
            nodes.append({"children": kids})
        else:
            nodes.append({"vertex": dec.leaf_vertex[v]})
    return {
        "depth": dec.depth,
        "nodes": nodes,
        "root": dec.tree.root,
        "flip_sets": [sorted(f) for f in dec.flips],
    }


def sc_from_json(obj, where: str = "sc") -> SCDecomposition:
    from .jsonio import InputError, expect_key

    nodes = expect_key(obj, "nodes", where)
    flips = expect_key(obj, "flip_sets", where)
    root = expect_key(obj, "root", where)
    children = []
    leaf_vertex = {}
    for i, spec in enumerate(nodes):
        if "children" in spec:
            children.append(spec["children"])
        else:
            children.append([])
            leaf_vertex[i] = expect_key(spec, "vertex", f"{where}/nodes/{i}")
    try:
        tree = PlaneTree(children, root)
        return SCDecomposition(tree, leaf_vertex, flips)
    except PreconditionError as exc:
        raise InputError(f"{where}: {exc}") from None
