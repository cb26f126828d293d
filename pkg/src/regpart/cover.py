"""Regularity preservation under 2-covers and equipartition conversion.

A cover splits the vertices into p classes whose pairwise unions are well
behaved; intersecting the traces of per-pair eps/(p-1)-nice partitions
within each class gives an eps-nice partition of the whole graph. A
separate refinement turns any eps-nice partition into an equipartition at
the cost of a factor 3 in the bad-pair fraction.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .errors import ContractViolation, InputError, PreconditionError
from .graph import Graph
from .jsonio import expect_key
from .regularity import VertexPartition, nice_defect


class TwoCover:
    """Vertex partition into p >= 2 classes, the cover of the base class."""

    __slots__ = ("blocks", "p")

    def __init__(self, n: int, blocks):
        partition = VertexPartition(n, blocks)
        if len(partition.blocks) < 2:
            raise PreconditionError("a cover needs magnitude p >= 2")
        self.blocks = partition.blocks
        self.p = len(self.blocks)


def _check_pair_cover(blocks, expected: set, pair) -> list[tuple[int, ...]]:
    seen: set[int] = set()
    out = []
    for b in blocks:
        bs = tuple(sorted(int(v) for v in b))
        if not bs:
            raise PreconditionError(f"pair {pair}: empty block")
        if seen & set(bs):
            raise PreconditionError(f"pair {pair}: overlapping blocks")
        seen |= set(bs)
        out.append(bs)
    if seen != expected:
        raise PreconditionError(f"pair {pair}: blocks do not cover exactly the pair union")
    return out


def combine_cover_partitions(g: Graph, cover: TwoCover, pairwise: dict) -> VertexPartition:
    """Intersect, inside every class, the traces of all pairwise partitions.

    pairwise maps (i, j) with i < j to the blocks (global vertex ids) of a
    partition of V_i union V_j. Empty intersections are dropped.
    """
    p = cover.p
    checked = {}
    max_k = 1
    for i, j in combinations(range(p), 2):
        if (i, j) not in pairwise:
            raise PreconditionError(f"missing pairwise partition for ({i},{j})")
        expected = set(cover.blocks[i]) | set(cover.blocks[j])
        checked[(i, j)] = _check_pair_cover(pairwise[(i, j)], expected, (i, j))
        max_k = max(max_k, len(checked[(i, j)]))
    blocks: list[tuple[int, ...]] = []
    for i in range(p):
        parts = [set(cover.blocks[i])]
        for j in range(p):
            if j == i:
                continue
            key = (min(i, j), max(i, j))
            refined = []
            for part in parts:
                for w in checked[key]:
                    piece = part & set(w)
                    if piece:
                        refined.append(piece)
            parts = refined
        blocks.extend(tuple(sorted(part)) for part in parts)
    if len(blocks) > p * max_k ** (p - 1):
        raise PreconditionError("combined block count exceeds p * K^(p-1)")
    return VertexPartition(g.n, blocks)


def cover_regular_partition(g: Graph, cover: TwoCover, eps, partitioner) -> VertexPartition:
    """eps-nice partition of a 2-covered graph from per-pair partitions.

    partitioner(i, j, pair_graph) must return a VertexPartition of the
    induced pair graph (local vertex ids) that is eps/(p-1)-nice for it;
    the contract is checked and violations name the offending pair.
    """
    eps = Fraction(eps)
    p = cover.p
    eps_pair = eps / (p - 1)
    pairwise = {}
    for i, j in combinations(range(p), 2):
        union = sorted(set(cover.blocks[i]) | set(cover.blocks[j]))
        sub, verts = g.induced(union)
        local = partitioner(i, j, sub)
        if not isinstance(local, VertexPartition) or local.n != sub.n:
            raise ContractViolation(f"pair ({i},{j}): partitioner returned a bad partition")
        report = nice_defect(sub, local)
        if report.defect >= eps_pair:
            raise ContractViolation(
                f"pair ({i},{j}): partition has defect {report.defect} >= eps/(p-1) = {eps_pair}"
            )
        pairwise[(i, j)] = [[verts[v] for v in block] for block in local.blocks]
    return combine_cover_partitions(g, cover, pairwise)


def equipartition_refine(g: Graph, partition: VertexPartition, eps) -> VertexPartition:
    """Refine an eps-nice partition into ceil(k/eps) near-equal blocks.

    Each block is cut into full-size chunks plus a short remainder; the
    remainders are pooled in block order and re-chunked. Sizes differ by at
    most one, larger blocks first in cutting order.
    """
    eps = Fraction(eps)
    report = nice_defect(g, partition)
    if report.defect >= eps:
        raise PreconditionError(f"partition has defect {report.defect} >= eps")
    k = len(partition.blocks)
    n = g.n
    big = -(-k * eps.denominator // eps.numerator)  # ceil(k/eps)
    if big > n:
        raise PreconditionError(
            f"equipartition into ceil(k/eps) = {big} non-empty classes of {n} "
            "vertices does not exist"
        )
    base, hi = divmod(n, big)
    hi_left = hi
    chunks: list[tuple[int, ...]] = []
    pooled: list[int] = []
    for block in partition.blocks:
        rest = list(block)
        while True:
            size = base + 1 if hi_left > 0 else base
            if len(rest) < size or size == 0:
                break
            chunks.append(tuple(rest[:size]))
            rest = rest[size:]
            if size == base + 1:
                hi_left -= 1
        pooled.extend(rest)
    pos = 0
    while pos < len(pooled):
        size = base + 1 if hi_left > 0 else base
        if size == base + 1:
            hi_left -= 1
        chunks.append(tuple(pooled[pos : pos + size]))
        pos += size
    result = VertexPartition(n, chunks)
    sizes = result.sizes()
    if len(result.blocks) != big or max(sizes) - min(sizes) > 1:
        raise PreconditionError("chunking failed to produce the equipartition")
    return result


def ordered_bad_fraction(g: Graph, partition: VertexPartition) -> Fraction:
    """Fraction of ordered block pairs (diagonal included) not homogeneous."""
    report = nice_defect(g, partition)
    k = len(partition.blocks)
    return Fraction(len(report.bad_pairs), k * k)


def corollary_bounds(m: int, p: int, eps) -> dict:
    """Block-count bounds for covered embedded cotree classes.

    nice_bound: p (128 m 2^(m^2) (p-1) / eps)^(p-1);
    equi_bound: 2 p (m 2^(m^2+8) (p-1))^(p-1) eps^(-p).
    """
    eps = Fraction(eps)
    if m < 1 or p < 1 or not 0 < eps < 1:
        raise PreconditionError("need m, p >= 1 and 0 < eps < 1")
    nice = p * (Fraction(128 * m * 2 ** (m * m) * (p - 1), 1) / eps) ** (p - 1)
    equi = 2 * p * Fraction(m * 2 ** (m * m + 8) * (p - 1)) ** (p - 1) * eps ** (-p)
    return {"nice_bound": nice, "equi_bound": equi}


# -- JSON ------------------------------------------------------------------------


def cover_to_json(cover: TwoCover) -> dict:
    return {"parts": [list(b) for b in cover.blocks]}


def cover_from_json(obj, n: int, where: str = "cover") -> TwoCover:
    parts = expect_key(obj, "parts", where)
    try:
        return TwoCover(n, parts)
    except PreconditionError as exc:
        raise InputError(f"{where}: {exc}") from None
