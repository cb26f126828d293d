"""Explicit eps-nice partitions for embedded m-partite cographs.

Pipeline: put the uniform leaf measure on the cotree, build an (eps/8)
partition of the tree, then refine each tree part into graph pieces keyed
so that adjacency between pieces of different parts is constant: child
interval parts split by leaf color; spine parts split by (side of spine,
spine node function, leaf color). The meet of two leaves in different
parts is pinned by the part geometry, so each cross pair is homogeneous.
"""

from __future__ import annotations

from fractions import Fraction

from .cotree import EmbeddedCotree
from .errors import InternalInvariantError, PreconditionError
from .regularity import VertexPartition
from .treepart import (
    TYPE3,
    MeasuredTreePartition,
    TreeMeasure,
    build_eps_partition,
)


def leaf_uniform_measure(cotree: EmbeddedCotree) -> TreeMeasure:
    """Uniform mass on the leaves, zero on internal nodes."""
    if cotree.n < 2:
        raise PreconditionError("need at least 2 leaves")
    weights = [0] * cotree.tree.size
    for leaf in cotree.tree.leaves:
        weights[leaf] = 1
    return TreeMeasure(weights)


def refine_tree_partition(cotree: EmbeddedCotree, partition: MeasuredTreePartition) -> VertexPartition:
    """Split each tree part's leaves into constant-adjacency pieces."""
    refined, _ = refine_tree_partition_with_parts(cotree, partition)
    return refined


def refine_tree_partition_with_parts(
    cotree: EmbeddedCotree, partition: MeasuredTreePartition
) -> tuple[VertexPartition, list[int]]:
    """Refinement plus, per output block, the index of its source tree part."""
    tree = cotree.tree
    n = cotree.n
    pieces: list[list[int]] = []
    piece_part: list[int] = []
    for part_idx, part in enumerate(partition.parts):
        groups: dict = {}
        if part.kind == TYPE3:
            if part.cut is None:
                raise PreconditionError("spine part lacks a cut vertex")
            for s, pos, side in _spine_leaf_positions(tree, part.attachment, part.cut):
                leaf = tree.leaves[pos]
                key = (side, cotree.node_fn[s], cotree.leaf_color[leaf])
                groups.setdefault(key, []).append(pos)
        else:
            for node in part.members:
                if not tree.children[node]:
                    pos = tree.leaf_pos[node]
                    groups.setdefault((cotree.leaf_color[node],), []).append(pos)
        for key in sorted(groups, key=repr):
            pieces.append(sorted(groups[key]))
            piece_part.append(part_idx)
    covered = sum(len(p) for p in pieces)
    if covered != n:
        raise PreconditionError("tree partition does not cover every leaf exactly once")
    return VertexPartition(n, pieces), piece_part


def _spine_leaf_positions(tree, attachment: int, cut: int):
    """(spine vertex, leaf position, side) for every leaf of T_v minus T_cut.

    side 0: the leaf hangs left of the spine at its vertex; side 1: right.
    """
    spine = []
    node = cut
    while node != attachment:
        node = tree.parent[node]
        if node == -1:
            raise PreconditionError("cut vertex is not below the attachment")
        spine.append(node)
    spine.reverse()  # attachment .. parent(cut)
    out = []
    for i, s in enumerate(spine):
        nxt = spine[i + 1] if i + 1 < len(spine) else cut
        for pos in range(tree.leaf_lo[s], tree.leaf_lo[nxt]):
            out.append((s, pos, 0))
        for pos in range(tree.leaf_hi[nxt], tree.leaf_hi[s]):
            out.append((s, pos, 1))
    return out


def cograph_regular_partition(cotree: EmbeddedCotree, eps) -> tuple[VertexPartition, dict]:
    """eps-nice partition with at most (128/eps) m 2^(m^2) blocks.

    Requires n >= 8/eps so the leaf-uniform measure fits under eps/8.
    Returns (partition, stats); stats carries the block bound and the
    measure-squared defect bound (exact rationals). The actual defect is
    checked wherever the materialized graph is available.
    """
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise PreconditionError("need 0 < eps < 1")
    n = cotree.n
    m = cotree.m
    if n * eps < 8:
        # Too few leaves for the eps/8 tree measure; singletons are exact
        # (every pair of single vertices is homogeneous) and meet the bound.
        singletons = VertexPartition(n, [[v] for v in range(n)])
        bound = Fraction(128, 1) / eps * m * 2 ** (m * m)
        stats = {
            "n": n,
            "m": m,
            "eps": eps,
            "ell": n,
            "bound": bound,
            "tree_parts": n,
            "defect_upper": Fraction(0),
            "block_part": list(range(n)),
        }
        return singletons, stats
    measure = leaf_uniform_measure(cotree)
    tree_partition = build_eps_partition(cotree.tree, measure, eps / 8)
    if len(tree_partition.parts) * eps.numerator >= 64 * eps.denominator:
        raise InternalInvariantError("tree partition exceeds 64/eps parts")
    refined, block_part = refine_tree_partition_with_parts(cotree, tree_partition)
    bound = Fraction(128, 1) / eps * m * 2 ** (m * m)
    if len(refined.blocks) > bound:
        raise InternalInvariantError(
            f"{len(refined.blocks)} blocks exceed the bound {bound}"
        )
    # Within-part weight accounting: defect <= sum of part measures squared.
    lc2 = sum(
        sum(1 for x in part.members if not cotree.tree.children[x]) ** 2
        for part in tree_partition.parts
    )
    sq_bound = Fraction(lc2, n * n)
    if sq_bound * 64 > eps * eps * len(tree_partition.parts):
        raise InternalInvariantError("per-part measure accounting exceeds (eps/8)^2 |P|")
    stats = {
        "n": n,
        "m": m,
        "eps": eps,
        "ell": len(refined.blocks),
        "bound": bound,
        "tree_parts": len(tree_partition.parts),
        "defect_upper": sq_bound,
        "block_part": block_part,
    }
    return refined, stats
