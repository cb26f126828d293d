"""Exact verifiers for the regularity notions: homogeneity, eps-regularity,
eps-nice defect accounting, stable-regularity predicates, VC and order
dimension, and homogeneous-pair extraction.

All comparisons are exact: epsilons are rationals and every inequality is
cross-multiplied into integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import isqrt

import numpy as np

from . import _kernels
from .errors import CapExceeded, InputError, InternalInvariantError, PreconditionError
from .prng import SplitMix64
from .graph import Graph, vertex_mask
from .jsonio import expect_key, format_rational, parse_rational


class VertexPartition:
    """Ordered list of disjoint non-empty vertex blocks covering [n]."""

    __slots__ = ("n", "blocks")

    def __init__(self, n: int, blocks):
        self.n = n
        self.blocks = [tuple(sorted(int(v) for v in b)) for b in blocks]
        seen = [False] * n
        for i, b in enumerate(self.blocks):
            if not b:
                raise PreconditionError(f"block {i} is empty")
            for v in b:
                if not 0 <= v < n:
                    raise PreconditionError(f"block {i}: vertex {v} out of range")
                if seen[v]:
                    raise PreconditionError(f"vertex {v} appears in two blocks")
                seen[v] = True
        if not all(seen):
            missing = seen.index(False)
            raise PreconditionError(f"vertex {missing} not covered by any block")

    def __len__(self):
        return len(self.blocks)

    def sizes(self) -> list[int]:
        return [len(b) for b in self.blocks]


@dataclass
class NiceDefectReport:
    defect: Fraction
    bad_pairs: list[tuple[int, int]]


def partition_to_json(p: VertexPartition) -> dict:
    return {"blocks": [list(b) for b in p.blocks]}


def partition_from_json(obj, n: int | None = None, where: str = "partition") -> VertexPartition:
    blocks = expect_key(obj, "blocks", where)
    if not isinstance(blocks, list):
        raise InputError(f"{where}/blocks: expected list")
    if n is None:
        n = sum(len(b) for b in blocks)
    try:
        return VertexPartition(n, blocks)
    except PreconditionError as exc:
        raise InputError(f"{where}: {exc}") from None


def defect_report_to_json(report: NiceDefectReport) -> dict:
    return {
        "defect": format_rational(report.defect),
        "bad_pairs": [list(p) for p in report.bad_pairs],
    }


def defect_report_from_json(obj, where: str = "report") -> NiceDefectReport:
    defect = parse_rational(expect_key(obj, "defect", where), f"{where}/defect")
    pairs = [tuple(p) for p in expect_key(obj, "bad_pairs", where)]
    return NiceDefectReport(defect, pairs)


# -- basic pair predicates ----------------------------------------------------


def _validate_pair(g: Graph, a, b):
    a = sorted(set(int(v) for v in a))
    b = sorted(set(int(v) for v in b))
    if not a or not b:
        raise PreconditionError("sets must be non-empty")
    if set(a) & set(b):
        raise PreconditionError("sets must be disjoint")
    return a, b


def eps_homogeneous(g: Graph, a, b, eps) -> bool:
    """density < eps or density > 1 - eps (both strict)."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise PreconditionError("need 0 < eps < 1")
    a, b = _validate_pair(g, a, b)
    from .graph import edge_count_between

    e = edge_count_between(g, a, b)
    total = len(a) * len(b)
    num, den = eps.numerator, eps.denominator
    return e * den < num * total or e * den > (den - num) * total


def eps_regular_exact(g: Graph, a, b, eps, cap: int = 12) -> bool:
    """Exhaustive eps-regularity over all subset pairs of relative size >= eps."""
    eps = Fraction(eps)
    a, b = _validate_pair(g, a, b)
    na, nb = len(a), len(b)
    if na > cap or nb > cap:
        raise CapExceeded(
            f"eps_regular_exact: |A|={na}, |B|={nb} exceeds cap {cap}; "
            "use eps_regular_sampled for counterexample search"
        )
    cross = _cross_rows(g, a, b)
    return _eps_regular_from_rows(cross, na, nb, eps)


def _cross_rows(g: Graph, a, b) -> list[int]:
    """Bit rows over b's index space: bit j of row i = adjacency a[i]~b[j]."""
    rows = []
    for u in a:
        row = 0
        for j, v in enumerate(b):
            if g.has_edge(u, v):
                row |= 1 << j
        rows.append(row)
    return rows


def _eps_regular_from_rows(cross: list[int], na: int, nb: int, eps: Fraction) -> bool:
    num, den = eps.numerator, eps.denominator
    total_e = sum(r.bit_count() for r in cross)
    bmasks = np.arange(1 << nb, dtype=np.uint64)
    pcb = np.bitwise_count(bmasks).astype(np.int64)
    b_ok = pcb * den >= num * nb
    b_ok &= pcb > 0
    table = np.empty((na, 1 << nb), dtype=np.int64)
    for i, row in enumerate(cross):
        table[i] = np.bitwise_count(bmasks & np.uint64(row)).astype(np.int64)
    scale = na * nb
    pcb_sel = pcb[b_ok]
    table_sel = table[:, b_ok]
    for amask in range(1, 1 << na):
        k = amask.bit_count()
        if k * den < num * na:
            continue
        idx = [i for i in range(na) if (amask >> i) & 1]
        evec = table_sel[idx].sum(axis=0)
        lhs = np.abs(evec * scale - total_e * (k * pcb_sel)) * den
        rhs = num * k * scale * pcb_sel
        if np.any(lhs > rhs):
            return False
    return True


def eps_regular_sampled(g: Graph, a, b, eps, samples: int = 1000, seed: int = 0):
    """Random counterexample search; returns a violating (a', b') or None.

    Never certifies regularity: a None result only means no counterexample
    was sampled.
    """
    eps = Fraction(eps)
    a, b = _validate_pair(g, a, b)
    from .graph import edge_count_between

    na, nb = len(a), len(b)
    e_total = edge_count_between(g, a, b)
    num, den = eps.numerator, eps.denominator
    rng = SplitMix64(seed)
    min_ka = -(-num * na // den)
    min_kb = -(-num * nb // den)
    for _ in range(samples):
        ka = min_ka + rng.below(na - min_ka + 1) if na > min_ka else na
        kb = min_kb + rng.below(nb - min_kb + 1) if nb > min_kb else nb
        if ka == 0 or kb == 0:
            continue
        sub_a = sorted(a[i] for i in rng.distinct(ka, na))
        sub_b = sorted(b[i] for i in rng.distinct(kb, nb))
        e_sub = edge_count_between(g, sub_a, sub_b)
        lhs = abs(e_sub * na * nb - e_total * ka * kb) * den
        if lhs > num * ka * kb * na * nb:
            return sub_a, sub_b
    return None


# -- eps-nice defect ----------------------------------------------------------


def block_edge_matrix(g: Graph, partition: VertexPartition) -> tuple[np.ndarray, list[int]]:
    """E[i, j] = directed edge-endpoint count from block i into block j.

    For i != j this is |E(V_i, V_j)|; E[i, i] is twice the internal count.
    """
    if partition.n != g.n:
        raise PreconditionError("partition is over a different vertex count")
    k = len(partition.blocks)
    masks = np.stack([vertex_mask(g, b) for b in partition.blocks])
    deg = _kernels.block_degree_matrix(g.bits, masks)
    e = np.empty((k, k), dtype=np.int64)
    for i, b in enumerate(partition.blocks):
        e[i] = deg[list(b)].sum(axis=0)
    return e, partition.sizes()


def nice_defect(g: Graph, partition: VertexPartition) -> NiceDefectReport:
    """Ordered-pair defect: sum of |V_i||V_j|/n^2 over non-homogeneous pairs,
    diagonal included. The partition is eps-nice iff defect < eps."""
    e, sizes = block_edge_matrix(g, partition)
    k = len(sizes)
    s = np.asarray(sizes, dtype=np.int64)
    full = np.outer(s, s)
    bad = (e > 0) & (e < full)
    for i in range(k):
        inner2 = int(e[i, i])
        bad[i, i] = not (inner2 == 0 or inner2 == sizes[i] * (sizes[i] - 1))
    bad_weight = int(full[bad].sum())
    pairs = [(int(i), int(j)) for i, j in np.argwhere(bad)]
    return NiceDefectReport(Fraction(bad_weight, g.n * g.n), sorted(pairs))


# -- stable-regularity predicates ----------------------------------------------


def _degrees_into(g: Graph, target) -> np.ndarray:
    mask = vertex_mask(g, target)
    return _kernels.block_degree_matrix(g.bits, mask[np.newaxis, :])[:, 0]


def eps_good(g: Graph, a, eps) -> bool:
    """Every vertex of G sees a or misses a on all but an eps fraction.

    The vertex b ranges over all of V(G); for b in a the absent loop counts
    toward the non-adjacent side.
    """
    eps = Fraction(eps)
    a = sorted(set(int(v) for v in a))
    if not a:
        raise PreconditionError("eps_good: set must be non-empty")
    deg = _degrees_into(g, a)[: g.n]
    na = len(a)
    num, den = eps.numerator, eps.denominator
    low = np.minimum(deg, na - deg)
    return bool(np.all(low * den <= num * na))


def _uniform_counts(g: Graph, a, b, eps: Fraction) -> bool:
    deg = _degrees_into(g, b)[np.asarray(a, dtype=np.int64)]
    na, nb = len(a), len(b)
    num, den = eps.numerator, eps.denominator
    low = int(np.count_nonzero(deg * den < num * nb))
    high = int(np.count_nonzero(deg * den > (den - num) * nb))
    return (na - low) * den <= num * na or (na - high) * den <= num * na


def eps_uniform(g: Graph, a, b, eps) -> bool:
    """All but <= eps|A| of A have degree in B below eps|B|, or all but
    <= eps|A| have degree above (1-eps)|B|."""
    eps = Fraction(eps)
    a, b = _validate_pair(g, a, b)
    return _uniform_counts(g, a, b, eps)


def eps_excellent_against(g: Graph, a, eps, candidates) -> bool:
    """a is eps-good and (a, b) is eps-uniform for every eps-good candidate b.

    Excellence relative to the supplied family; pass every subset for the
    exhaustive definition (feasible only at small n).
    """
    eps = Fraction(eps)
    a = sorted(set(int(v) for v in a))
    if not a or not eps_good(g, a, eps):
        return False
    for b in candidates:
        b = sorted(set(int(v) for v in b))
        if not b or not eps_good(g, b, eps):
            continue
        if not _uniform_counts(g, a, b, eps):
            return False
    return True


def all_subsets(n: int):
    """All non-empty vertex subsets of [n]; exponential, for small-n oracles."""
    for mask in range(1, 1 << n):
        yield [v for v in range(n) if (mask >> v) & 1]


# -- VC and order dimension ------------------------------------------------------


def vc_dimension(g: Graph, cap: int = 16, distinct: bool = False) -> int:
    """Largest d such that some d-tuple of vertices is shattered.

    distinct=False (default) lets the witnesses b_J coincide with the a_i.
    """
    if g.n > cap:
        raise CapExceeded(f"vc_dimension: n={g.n} exceeds cap {cap}")
    if g.n == 0:
        return 0
    rows = [_row_mask(g, v) for v in range(g.n)]
    best = 0
    max_d = max(1, g.n.bit_length())
    for d in range(1, min(g.n, max_d + 1) + 1):
        found = False
        for a in combinations(range(g.n), d):
            need = 1 << d
            traces = set()
            for v in range(g.n):
                if distinct and v in a:
                    continue
                t = 0
                for i, ai in enumerate(a):
                    if (rows[v] >> ai) & 1:
                        t |= 1 << i
                traces.add(t)
                if len(traces) == need:
                    break
            if len(traces) == need:
                found = True
                break
        if found:
            best = d
        else:
            break
    return best


def _row_mask(g: Graph, v: int) -> int:
    return int.from_bytes(np.ascontiguousarray(g.bits[v]).tobytes(), "little")


def order_dimension(g: Graph, cap: int = 16, distinct: bool = False) -> int:
    """Largest l admitting a_1..a_l, b_1..b_l with a_i ~ b_j iff i <= j."""
    if g.n > cap:
        raise CapExceeded(f"order_dimension: n={g.n} exceeds cap {cap}")
    if g.n == 0:
        return 0
    rows = [_row_mask(g, v) for v in range(g.n)]
    full = (1 << g.n) - 1

    def extend(level: int, target: int, a_nonadj: int, b_common: int, used: int) -> bool:
        # a_nonadj: candidate mask for the next a (non-neighbors of b_1..b_{k-1});
        # b_common: common neighbors of a_1..a_k once the next a is chosen.
        if level == target:
            return True
        cand_a = a_nonadj & ~used if distinct else a_nonadj
        while cand_a:
            low = cand_a & -cand_a
            cand_a ^= low
            ai = low.bit_length() - 1
            new_common = b_common & rows[ai]
            cand_b = new_common & ~(used | low) if distinct else new_common
            cb = cand_b
            while cb:
                lb = cb & -cb
                cb ^= lb
                bj = lb.bit_length() - 1
                if extend(
                    level + 1,
                    target,
                    a_nonadj & ~rows[bj],
                    new_common,
                    used | low | lb,
                ):
                    return True
        return False

    best = 0
    for target in range(1, g.n + 1):
        if extend(0, target, full, full, 0):
            best = target
        else:
            break
    return best


# -- homogeneous pairs ------------------------------------------------------------


def max_homogeneous_pair(g: Graph, cap: int = 12):
    """Disjoint homogeneous pair maximizing min(|A|, |B|), exhaustively.

    For every A the best complete partner is the full common neighborhood
    and the best edgeless partner is the full common non-neighborhood, so
    scanning the 2^n subsets with incremental intersections is exhaustive.
    """
    if g.n > cap:
        raise CapExceeded(f"max_homogeneous_pair: n={g.n} exceeds cap {cap}")
    if g.n < 2:
        return None
    rows = [_row_mask(g, v) for v in range(g.n)]
    full_universe = (1 << g.n) - 1
    common = [0] * (1 << g.n)
    avoid = [0] * (1 << g.n)
    common[0] = full_universe
    avoid[0] = full_universe
    best = None  # (min_size, a_mask, b_mask)
    for mask in range(1, 1 << g.n):
        low = mask & -mask
        v = low.bit_length() - 1
        rest = mask ^ low
        common[mask] = common[rest] & rows[v]
        avoid[mask] = avoid[rest] & ~rows[v]
        ka = mask.bit_count()
        for partner in (common[mask] & ~mask, avoid[mask] & ~mask):
            if partner:
                value = min(ka, partner.bit_count())
                if best is None or value > best[0]:
                    best = (value, mask, partner)
    if best is None:
        return None
    _, am, bm = best
    return _mask_list(am), _mask_list(bm)


def _mask_list(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def extract_homogeneous_pair_from_nice(g: Graph, partition: VertexPartition, eps):
    """Homogeneous pair from an eps-nice partition, min size >= floor(sqrt(1-eps) n/(2k)).

    Scans the homogeneous ordered block pairs and picks the one whose
    resulting pair (cross pair, or split halves on the diagonal) maximizes
    the minimum side, which dominates the max-weight rule whenever blocks tie.
    """
    eps = Fraction(eps)
    report_e, sizes = block_edge_matrix(g, partition)
    k = len(sizes)
    n = g.n
    total_bad = 0
    candidates = []
    for i in range(k):
        for j in range(k):
            e = int(report_e[i, j])
            if i == j:
                homog = e == 0 or e == sizes[i] * (sizes[i] - 1)
            else:
                homog = e == 0 or e == sizes[i] * sizes[j]
            if not homog:
                total_bad += sizes[i] * sizes[j]
                continue
            if i == j:
                if sizes[i] >= 2:
                    half = sizes[i] // 2
                    candidates.append((half, sizes[i] - half, i, j))
            else:
                candidates.append((min(sizes[i], sizes[j]), max(sizes[i], sizes[j]), i, j))
    num, den = eps.numerator, eps.denominator
    if total_bad * den >= num * n * n:
        raise PreconditionError("partition is not eps-nice")
    floor = isqrt((den - num) * den * n * n) // (den * 2 * k)
    best = max(candidates, key=lambda c: (c[0], c[0] * c[1], -c[2], -c[3]), default=None)
    if best is None or best[0] < floor:
        raise InternalInvariantError(
            "no homogeneous pair reaches the guaranteed size floor"
        )
    _, _, i, j = best
    if i == j:
        block = partition.blocks[i]
        half = len(block) // 2
        return list(block[:half]), list(block[half:])
    return list(partition.blocks[i]), list(partition.blocks[j])


# -- sparse-power regularity check --------------------------------------------------


def verify_nd_partition(g: Graph, s, partition, d: int, eps, mode: str) -> bool:
    """Distance-based regularity of an equipartition of V(G) - S.

    strong: every vertex outside S is at distance > d (in G - S) from at
    least a (1-eps) fraction of every block. weak: per block pair (i, j),
    all but an eps fraction of V_i is far from a (1-eps) fraction of V_j.
    partition may be a VertexPartition or a raw block list over V(G) - S.
    """
    from .graph import ball_masks

    eps = Fraction(eps)
    if mode not in ("strong", "weak"):
        raise PreconditionError("mode must be 'strong' or 'weak'")
    s_set = sorted(set(int(v) for v in s))
    blocks = partition.blocks if isinstance(partition, VertexPartition) else [
        tuple(sorted(int(v) for v in b)) for b in partition
    ]
    covered = sorted(v for b in blocks for v in b)
    expected = sorted(set(range(g.n)) - set(s_set))
    if covered != expected:
        raise PreconditionError("partition must cover exactly V(G) - S")
    sizes = [len(b) for b in blocks]
    if max(sizes) - min(sizes) > 1:
        raise PreconditionError("blocks must form an equipartition (sizes differ by <= 1)")
    num, den = eps.numerator, eps.denominator
    balls = ball_masks(g, s_set, d)
    masks = [vertex_mask(g, b) for b in blocks]
    outside = [v for v in range(g.n) if v not in set(s_set)]
    near = np.empty((len(outside), len(masks)), dtype=np.int64)
    for r, u in enumerate(outside):
        for j, mask in enumerate(masks):
            near[r, j] = _kernels.mask_popcount(balls[u] & mask)
    size_vec = np.asarray(sizes, dtype=np.int64)
    ok_matrix = near * den <= num * size_vec[np.newaxis, :]
    if mode == "strong":
        return bool(ok_matrix.all())
    pos = {u: r for r, u in enumerate(outside)}
    for i, block in enumerate(blocks):
        rows = [pos[u] for u in block]
        good_counts = ok_matrix[rows].sum(axis=0)
        if not np.all((size_vec[i] - good_counts) * den <= num * size_vec[i]):
            return False
    return True
