"""Partitions of measured plane trees into child-interval and
subtree-minus-subtree parts of small measure.

The construction works in three stages: atoms (per-vertex granules), groups
(chain regions and runs of light child subtrees), and a final greedy split
of thick groups into runs of measure at most eps. Counting invariants from
the underlying proof are asserted on every run.

Measures are integer weight vectors normalized by their total, so every
comparison below is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cotree import PlaneTree
from .errors import InputError, InternalInvariantError, PreconditionError
from .jsonio import expect_key

LIGHT = "light"
TERMINAL = "terminal"
SINGULAR = "singular"
CHAINING = "chaining"
BRANCHING = "branching"
OTHER = "other"

TYPE1 = "type1"
TYPE2 = "type2"
TYPE3 = "type3"


class TreeMeasure:
    """Probability measure on tree nodes as integer weights over their sum."""

    __slots__ = ("weights", "total")

    def __init__(self, weights):
        self.weights = [int(w) for w in weights]
        if any(w < 0 for w in self.weights):
            raise PreconditionError("measure weights must be nonnegative")
        self.total = sum(self.weights)
        if self.total <= 0:
            raise PreconditionError("measure must have positive total")

    @classmethod
    def from_rationals(cls, values) -> "TreeMeasure":
        values = [Fraction(v) for v in values]
        lcm = 1
        for v in values:
            d = v.denominator
            g = _gcd(lcm, d)
            lcm = lcm // g * d
        return cls([int(v * lcm) for v in values])

    def mu(self, v: int) -> Fraction:
        return Fraction(self.weights[v], self.total)

    def max_point_mass(self) -> Fraction:
        return Fraction(max(self.weights), self.total)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class TreePart:
    kind: str
    attachment: int
    members: tuple[int, ...]
    child_interval: tuple[int, int] | None = None  # types 1, 2 (may be empty for 1)
    cut: int | None = None  # type 3
    spine: tuple[int, ...] = ()  # type 3: attachment .. parent of cut


@dataclass
class MeasuredTreePartition:
    parts: list[TreePart]

    def __len__(self):
        return len(self.parts)


@dataclass
class TreePartitionReport:
    ok: bool
    violations: list[str]

    def __bool__(self):
        return self.ok


# -- classification -----------------------------------------------------------


def _fits_int64(measure: TreeMeasure, eps: Fraction) -> bool:
    scale = max(eps.numerator, eps.denominator)
    return measure.total * scale < (1 << 62)


def subtree_weights(tree: PlaneTree, measure: TreeMeasure) -> np.ndarray:
    """Per-node subtree weight sums (int64; exact within the guard)."""
    _, _, tin, tout, node_at = tree.arrays()
    w = np.asarray(measure.weights, dtype=np.int64)
    # Prefix sums over preorder: subtree of v is the preorder slice
    # [tin, tout), so each sum is a difference of two prefix values.
    pre = np.zeros(tree.size + 1, dtype=np.int64)
    np.cumsum(w[node_at], out=pre[1:])
    return pre[tout] - pre[tin]


class _Classified:
    __slots__ = ("sub", "light", "kind", "heavy_child", "preorder", "node_at")

    def __init__(self, tree: PlaneTree, measure: TreeMeasure, eps: Fraction):
        num, den = eps.numerator, eps.denominator
        total = measure.total
        parent, _, tin, _, node_at = tree.arrays()
        if not _fits_int64(measure, eps):
            self._init_exact(tree, measure, eps)
            return
        w = np.asarray(measure.weights, dtype=np.int64)
        sub = subtree_weights(tree, measure)
        light = sub * den <= num * total
        heavy_nodes = np.flatnonzero(~light)
        heavy_count = np.zeros(tree.size, dtype=np.int64)
        heavy_sum = np.zeros(tree.size, dtype=np.int64)
        non_root_heavy = heavy_nodes[parent[heavy_nodes] >= 0]
        np.add.at(heavy_count, parent[non_root_heavy], 1)
        np.add.at(heavy_sum, parent[non_root_heavy], non_root_heavy)
        light_nodes = np.flatnonzero(light)
        light_nodes = light_nodes[parent[light_nodes] >= 0]
        light_sum = np.zeros(tree.size, dtype=np.int64)
        np.add.at(light_sum, parent[light_nodes], sub[light_nodes])
        has_children = np.asarray([1 if c else 0 for c in tree.children], dtype=bool)
        kind = np.full(tree.size, 0, dtype=np.int8)  # 0 light
        hv = ~light
        kind[hv & ~has_children] = 5  # other
        kind[hv & has_children & (heavy_count == 0)] = 1  # terminal
        one = hv & (heavy_count == 1)
        singular = one & ((w + light_sum) * den > num * total)
        kind[one] = 3  # chaining
        kind[singular] = 2  # singular
        kind[hv & (heavy_count >= 2)] = 4  # branching
        names = [LIGHT, TERMINAL, SINGULAR, CHAINING, BRANCHING, OTHER]
        self.sub = sub
        self.light = light
        self.kind = [names[k] for k in kind]
        heavy_child = np.where(heavy_count == 1, heavy_sum, -1)
        self.heavy_child = heavy_child
        self.preorder = node_at
        self.node_at = node_at

    def _init_exact(self, tree: PlaneTree, measure: TreeMeasure, eps: Fraction):
        # Arbitrary-precision fallback for measures with huge totals.
        num, den = eps.numerator, eps.denominator
        total = measure.total
        w = measure.weights
        sub = [0] * tree.size
        _, _, _, _, node_at = tree.arrays()
        order = [int(x) for x in node_at]
        for v in reversed(order):
            sub[v] += w[v]
            p = tree.parent[v]
            if p >= 0:
                sub[p] += sub[v]
        light = [sub[v] * den <= num * total for v in range(tree.size)]
        kind = [LIGHT] * tree.size
        heavy_child = [-1] * tree.size
        for v in range(tree.size):
            if light[v]:
                continue
            heavy = [c for c in tree.children[v] if not light[c]]
            light_total = sum(sub[c] for c in tree.children[v] if light[c])
            if not tree.children[v]:
                kind[v] = OTHER
            elif not heavy:
                kind[v] = TERMINAL
            elif len(heavy) == 1:
                kind[v] = SINGULAR if (w[v] + light_total) * den > num * total else CHAINING
                heavy_child[v] = heavy[0]
            else:
                kind[v] = BRANCHING
        self.sub = sub
        self.light = light
        self.kind = kind
        self.heavy_child = heavy_child
        self.preorder = order
        self.node_at = order


def _check_max_mass(measure: TreeMeasure, eps: Fraction):
    if max(measure.weights) * eps.denominator > eps.numerator * measure.total:
        raise PreconditionError(
            f"eps={eps} is below the maximum point mass {measure.max_point_mass()}"
        )


def classify(tree: PlaneTree, measure: TreeMeasure, eps, v: int) -> str:
    """Classify one vertex as light/terminal/singular/chaining/branching/other."""
    eps = Fraction(eps)
    _check_max_mass(measure, eps)
    return _Classified(tree, measure, eps).kind[v]


# -- construction --------------------------------------------------------------


def build_eps_partition(tree: PlaneTree, measure: TreeMeasure, eps) -> MeasuredTreePartition:
    """Partition of V(T) into parts of measure <= eps, fewer than 8/eps parts."""
    eps = Fraction(eps)
    if tree.size < 2:
        raise PreconditionError("need a tree on at least 2 nodes")
    _check_max_mass(measure, eps)
    num, den = eps.numerator, eps.denominator
    total = measure.total
    cls = _Classified(tree, measure, eps)
    sub, light, kind, heavy_child = cls.sub, cls.light, cls.kind, cls.heavy_child

    if light[tree.root]:
        # Total mass fits in one part (eps >= 1).
        members = tuple(sorted(range(tree.size)))
        part = TreePart(TYPE1, tree.root, members, (0, len(tree.children[tree.root])))
        return MeasuredTreePartition([part])

    # Groups are lists of atoms; an atom is (tag, node, child_index) with
    # tag in {vertex, sub, chain}; child_index is the node's position among
    # the attachment's children (sub atoms only).
    groups: list[tuple[str, int, list[tuple[str, int, int]]]] = []
    # (style, attachment, atoms) with style in {head, later, chain}

    for u in cls.preorder:
        u = int(u)
        if light[u] or kind[u] == OTHER:
            continue
        if kind[u] == CHAINING:
            parent = tree.parent[u]
            if parent != -1 and kind[parent] == CHAINING:
                continue  # interior of a chain
            chain = [u]
            node = int(heavy_child[u])
            while kind[node] == CHAINING:
                chain.append(node)
                node = int(heavy_child[node])
            groups.append(("chain", u, [("chain", x, -1) for x in chain]))
            continue
        # Non-light, non-chaining: head group plus later light runs.
        cs = tree.children[u]
        light_flags = [light[c] for c in cs]
        first_light = next((i for i, f in enumerate(light_flags) if f), None)
        if first_light is None:
            groups.append(("head", u, [("vertex", u, -1)]))
        else:
            b = first_light
            while b < len(cs) and light_flags[b]:
                b += 1
            atoms = [("vertex", u, -1)] + [("sub", cs[i], i) for i in range(first_light, b)]
            groups.append(("head", u, atoms))
            i = b + 1
            while i < len(cs):
                if light_flags[i]:
                    j = i
                    while j < len(cs) and light_flags[j]:
                        j += 1
                    groups.append(("later", u, [("sub", cs[i2], i2) for i2 in range(i, j)]))
                    i = j
                else:
                    i += 1

    def atom_weight(atom: tuple[str, int, int]) -> int:
        tag, x, _ = atom
        if tag == "vertex":
            return int(measure.weights[x])
        if tag == "sub":
            return int(sub[x])
        return int(sub[x]) - int(sub[int(heavy_child[x])])

    # Split thick groups greedily into maximal runs of measure <= eps.
    parts: list[TreePart] = []
    thick_groups = 0
    n_runs_beyond_first = 0
    for style, u, atoms in groups:
        weights = [atom_weight(a) for a in atoms]
        if any(wt * den > num * total for wt in weights):
            raise InternalInvariantError("atom exceeding eps; classification is inconsistent")
        if sum(weights) * den > num * total:
            thick_groups += 1
        runs: list[tuple[int, int]] = []
        i = 0
        while i < len(atoms):
            j = i
            acc = 0
            while j < len(atoms) and (acc + weights[j]) * den <= num * total:
                acc += weights[j]
                j += 1
            runs.append((i, j))
            i = j
        n_runs_beyond_first += len(runs) - 1
        for i, j in runs:
            parts.append(_run_part(tree, cls, style, u, atoms, i, j, heavy_child))

    _assert_counts(eps, cls, groups, thick_groups, len(parts), n_runs_beyond_first)
    return MeasuredTreePartition(parts)


def _run_part(tree, cls, style, u, atoms, i, j, heavy_child) -> TreePart:
    _, _, tin, tout, node_at = tree.arrays()
    if style == "chain":
        top = atoms[i][1]
        cut = atoms[j][1] if j < len(atoms) else int(heavy_child[atoms[-1][1]])
        members = np.concatenate(
            (node_at[tin[top] : tin[cut]], node_at[tout[cut] : tout[top]])
        )
        spine = tuple(a[1] for a in atoms[i:j])
        return TreePart(TYPE3, top, _member_tuple(members), None, cut, spine)
    pieces = []
    lo = hi = None
    head = False
    for tag, x, idx in atoms[i:j]:
        if tag == "vertex":
            pieces.append(np.asarray([x], dtype=np.int64))
            head = True
        else:
            pieces.append(node_at[tin[x] : tout[x]])
            lo = idx if lo is None else lo
            hi = idx + 1
    members = np.concatenate(pieces)
    if head:
        interval = (lo, hi) if lo is not None else (0, 0)
        return TreePart(TYPE1, u, _member_tuple(members), interval)
    return TreePart(TYPE2, u, _member_tuple(members), (lo, hi))


def _member_tuple(arr: np.ndarray) -> tuple[int, ...]:
    return tuple(np.sort(arr).tolist())


def _assert_counts(eps, cls, groups, thick_groups, n_parts, extra_runs):
    num, den = eps.numerator, eps.denominator
    n_t = sum(1 for k in cls.kind if k == TERMINAL)
    n_s = sum(1 for k in cls.kind if k == SINGULAR)
    checks = [
        ((n_t + n_s) * num <= den, "terminal+singular count exceeds 1/eps"),
        (thick_groups * num <= den, "thick group count exceeds 1/eps"),
        (len(groups) * num < 6 * den, "group count reaches 6/eps"),
        (extra_runs * num < 2 * den, "split overhead reaches 2/eps"),
        (n_parts * num < 8 * den, "part count reaches 8/eps"),
    ]
    for ok, msg in checks:
        if not ok:
            raise InternalInvariantError(msg)


# -- verification ---------------------------------------------------------------


def verify_eps_partition(tree: PlaneTree, measure: TreeMeasure, eps, partition) -> TreePartitionReport:
    """Definition-level check of an eps-partition from raw member sets."""
    eps = Fraction(eps)
    num, den = eps.numerator, eps.denominator
    total = measure.total
    violations: list[str] = []
    parts = partition.parts if isinstance(partition, MeasuredTreePartition) else list(partition)
    member_lists = [p.members if isinstance(p, TreePart) else tuple(sorted(p)) for p in parts]

    part_id = [-1] * tree.size
    for idx, members in enumerate(member_lists):
        if not members:
            violations.append(f"part {idx} is empty")
            continue
        for x in members:
            if not 0 <= x < tree.size:
                violations.append(f"part {idx}: node {x} out of range")
            elif part_id[x] != -1:
                violations.append(f"node {x} appears in parts {part_id[x]} and {idx}")
            else:
                part_id[x] = idx
    uncovered = [v for v in range(tree.size) if part_id[v] == -1]
    if uncovered:
        violations.append(f"{len(uncovered)} nodes uncovered (first: {uncovered[0]})")
    if violations:
        return TreePartitionReport(False, violations)

    node_at = [0] * tree.size
    for v in range(tree.size):
        node_at[tree.tin[v]] = v
    child_pos = {}
    for v in range(tree.size):
        for i, c in enumerate(tree.children[v]):
            child_pos[c] = i

    declared = [p if isinstance(p, TreePart) else None for p in parts]
    type1_attachments: set[int] = set()
    type2_claims: list[tuple[int, int]] = []  # (part index, attachment)
    for idx, members in enumerate(member_lists):
        weight = sum(measure.weights[x] for x in members)
        if weight * den > num * total:
            violations.append(f"part {idx} has measure {Fraction(weight, total)} > eps")
        interp = _part_interpretations(tree, node_at, child_pos, members)
        if not interp:
            violations.append(f"part {idx} matches none of the three shapes")
            continue
        dec = declared[idx]
        if dec is not None:
            # Declared kind and attachment must be a valid reading of the set.
            if (dec.kind, dec.attachment) not in interp:
                violations.append(
                    f"part {idx} declared {dec.kind}@{dec.attachment} but its members "
                    f"only admit {sorted(set(interp), key=repr)}"
                )
                continue
            if dec.kind == TYPE1:
                type1_attachments.add(dec.attachment)
            elif dec.kind == TYPE2:
                type2_claims.append((idx, dec.attachment))
        else:
            # Raw member sets: read each part as type 1 whenever possible; the
            # attachment clause then constrains only forced type-2 parts.
            if any(t == TYPE1 for t, _ in interp):
                type1_attachments.update(a for t, a in interp if t == TYPE1)
            elif all(t == TYPE2 for t, _ in interp):
                type2_claims.append((idx, interp[0][1]))
    for idx, att in type2_claims:
        if att not in type1_attachments:
            violations.append(
                f"part {idx} is type-2 attached at {att}, which anchors no type-1 part"
            )
    return TreePartitionReport(not violations, violations)


def _part_interpretations(tree: PlaneTree, node_at, child_pos, members) -> list[tuple[str, int]]:
    """All (shape, attachment) readings of a member set; empty if invalid.

    Single-top member sets are connected through their top, so per-subtree
    size identities certify full-subtree membership without walking nodes.
    """
    member_set = set(members)
    tops = [x for x in members if tree.parent[x] == -1 or tree.parent[x] not in member_set]
    out: list[tuple[str, int]] = []
    if len(tops) == 1:
        x0 = tops[0]
        lo, hi = tree.tin[x0], tree.tout[x0]
        if any(not (lo <= tree.tin[x] < hi) for x in members):
            return []
        if len(members) == hi - lo:
            out.append((TYPE1, x0))
            if tree.parent[x0] != -1:
                out.append((TYPE2, tree.parent[x0]))
            return out
        tins = sorted(tree.tin[x] for x in members)
        gaps = _gaps(tins, lo, hi)
        if len(gaps) == 1:
            gs, ge = gaps[0]
            w = node_at[gs]
            if tree.tout[w] == ge:
                out.append((TYPE3, x0))
        chosen = [c for c in tree.children[x0] if c in member_set]
        if 1 + sum(tree.tout[c] - tree.tin[c] for c in chosen) == len(members):
            idxs = [child_pos[c] for c in chosen]
            if not idxs or idxs == list(range(idxs[0], idxs[-1] + 1)):
                out.append((TYPE1, x0))
        return out
    # Multiple tops: only a union of full sibling subtrees qualifies.
    parents = {tree.parent[t] for t in tops}
    if len(parents) != 1 or -1 in parents:
        return []
    v = parents.pop()
    positions = sorted(child_pos[t] for t in tops)
    if positions != list(range(positions[0], positions[-1] + 1)):
        return []
    if sum(tree.tout[t] - tree.tin[t] for t in tops) != len(members):
        return []
    return [(TYPE2, v)]


def _gaps(tins, lo, hi):
    gaps = []
    cursor = lo
    for t in tins:
        if t > cursor:
            gaps.append((cursor, t))
        cursor = t + 1
    if cursor < hi:
        gaps.append((cursor, hi))
    return gaps


# -- JSON -----------------------------------------------------------------------


def measure_to_json(measure: TreeMeasure) -> dict:
    return {"weights": measure.weights, "total": measure.total}


def measure_from_json(obj, where: str = "measure") -> TreeMeasure:
    weights = expect_key(obj, "weights", where)
    if not isinstance(weights, list) or not all(isinstance(w, int) for w in weights):
        raise InputError(f"{where}/weights: expected integer list")
    m = TreeMeasure(weights)
    if "total" in obj and obj["total"] != m.total:
        raise InputError(f"{where}/total: does not match weight sum")
    return m


def partition_to_json(partition: MeasuredTreePartition) -> dict:
    parts = []
    for p in partition.parts:
        parts.append(
            {
                "kind": p.kind,
                "attachment": p.attachment,
                "interval": list(p.child_interval) if p.child_interval is not None else None,
                "cut": p.cut,
                "spine": list(p.spine),
                "members": list(p.members),
            }
        )
    return {"parts": parts}


def partition_from_json(obj, where: str = "tree-partition") -> MeasuredTreePartition:
    parts_spec = expect_key(obj, "parts", where)
    if not isinstance(parts_spec, list):
        raise InputError(f"{where}/parts: expected list")
    parts = []
    for i, spec in enumerate(parts_spec):
        kind = expect_key(spec, "kind", f"{where}/parts/{i}")
        if kind not in (TYPE1, TYPE2, TYPE3):
            raise InputError(f"{where}/parts/{i}/kind: unknown kind {kind!r}")
        interval = spec.get("interval")
        parts.append(
            TreePart(
                kind,
                expect_key(spec, "attachment", f"{where}/parts/{i}"),
                tuple(sorted(expect_key(spec, "members", f"{where}/parts/{i}"))),
                tuple(interval) if interval is not None else None,
                spec.get("cut"),
                tuple(spec.get("spine", ())),
            )
        )
    return MeasuredTreePartition(parts)
