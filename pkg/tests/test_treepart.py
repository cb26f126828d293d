from fractions import Fraction

import pytest

from regpart.cotree import PlaneTree
from regpart.errors import PreconditionError
from regpart.generators import (
    SplitMix64,
    leaf_uniform_tree_measure,
    random_plane_tree,
    random_tree_measure,
)
from regpart.treepart import (
    BRANCHING,
    CHAINING,
    LIGHT,
    SINGULAR,
    TERMINAL,
    TYPE1,
    TYPE2,
    TYPE3,
    MeasuredTreePartition,
    TreeMeasure,
    TreePart,
    build_eps_partition,
    classify,
    partition_from_json,
    partition_to_json,
    verify_eps_partition,
)

EPS_GRID = (Fraction(1, 2), Fraction(1, 5), Fraction(1, 10), Fraction(1, 50))


def star(n):
    return PlaneTree([[i for i in range(1, n + 1)]] + [[] for _ in range(n)], 0)


def test_classify_examples():
    s = star(10)
    m = TreeMeasure([0] + [1] * 10)
    eps = Fraction(3, 10)
    assert classify(s, m, eps, 1) == LIGHT
    assert classify(s, m, eps, 0) == TERMINAL
    # chaining: spine vertex with one heavy child and a tiny pendant leaf
    cat = PlaneTree([[1, 2], [], [3, 4], [], []], 0)
    mc = TreeMeasure([0, 1, 0, 10, 10])
    assert classify(cat, mc, Fraction(1, 2), 0) == CHAINING
    # singular: light-children mass strictly exceeds eps
    sing = PlaneTree([[1, 2, 3], [], [], [4, 5], [], []], 0)
    ms = TreeMeasure([0, 8, 8, 0, 7, 6])
    assert classify(sing, ms, Fraction(1, 3), 0) == SINGULAR
    # branching
    b = PlaneTree([[1, 2], [3, 4], [5, 6], [], [], [], []], 0)
    mb = TreeMeasure([0, 0, 0, 1, 1, 1, 1])
    assert classify(b, mb, Fraction(1, 4), 0) == BRANCHING


def test_classify_precondition():
    s = star(2)
    m = TreeMeasure([0, 1, 1])
    with pytest.raises(PreconditionError):
        classify(s, m, Fraction(1, 4), 0)


def test_build_two_leaves():
    t = PlaneTree([[1, 2], [], []], 0)
    m = TreeMeasure([0, 1, 1])
    p = build_eps_partition(t, m, Fraction(1, 2))
    assert [q.members for q in p.parts] == [(0, 1), (2,)]
    assert [q.kind for q in p.parts] == [TYPE1, TYPE2]


def test_build_star_runs():
    p = build_eps_partition(star(10), TreeMeasure([0] + [1] * 10), Fraction(3, 10))
    assert len(p.parts) == 4
    assert sorted(len(q.members) for q in p.parts) == [1, 3, 3, 4]
    assert 4 * 3 < 8 * 10  # 4 < 8/eps


def test_build_requires_two_nodes_and_mass_bound():
    with pytest.raises(PreconditionError):
        build_eps_partition(PlaneTree([[]], 0), TreeMeasure([1]), Fraction(1, 2))
    t = PlaneTree([[1, 2], [], []], 0)
    with pytest.raises(PreconditionError):
        build_eps_partition(t, TreeMeasure([0, 3, 1]), Fraction(1, 2))


def test_random_build_verify_and_counting():
    rng = SplitMix64(123)
    runs = 0
    for seed in range(40):
        n = 50 + rng.below(600)
        tree = random_plane_tree(n, 2 + seed % 4, seed)
        for mk in range(2):
            m = leaf_uniform_tree_measure(tree) if mk == 0 else random_tree_measure(tree, seed + 991)
            for eps in EPS_GRID:
                if m.max_point_mass() > eps:
                    continue
                p = build_eps_partition(tree, m, eps)
                runs += 1
                assert len(p.parts) * eps.numerator < 8 * eps.denominator
                report = verify_eps_partition(tree, m, eps, p)
                assert report.ok, report.violations[:3]
                total = sum(sum(m.weights[x] for x in q.members) for q in p.parts)
                assert total == m.total
    assert runs > 100


def test_every_part_shape_occurs():
    seen = set()
    for seed in range(60):
        tree = random_plane_tree(200, 2 + seed % 3, seed)
        m = random_tree_measure(tree, seed)
        p = build_eps_partition(tree, m, Fraction(1, 10))
        seen.update(q.kind for q in p.parts)
        if seen == {TYPE1, TYPE2, TYPE3}:
            break
    assert seen == {TYPE1, TYPE2, TYPE3}


def test_monotonicity_regression_guard():
    # Not a theory claim: a fixed-seed smoke check that doubling eps does not
    # increase the built part count on these instances.
    for seed in range(30):
        tree = random_plane_tree(300, 3, seed)
        m = leaf_uniform_tree_measure(tree)
        small = len(build_eps_partition(tree, m, Fraction(1, 20)).parts)
        big = len(build_eps_partition(tree, m, Fraction(1, 10)).parts)
        assert big <= small, (seed, big, small)


def test_verify_rejects_bad_partitions():
    t = PlaneTree([[1, 2], [3, 4], [], [], []], 0)
    m = TreeMeasure([0, 0, 1, 1, 1])
    whole = MeasuredTreePartition([TreePart(TYPE1, 0, (0, 1, 2, 3, 4), (0, 2))])
    report = verify_eps_partition(t, m, Fraction(1, 2), whole)
    assert not report.ok and any("measure" in v for v in report.violations)
    # declared type-2 part whose attachment anchors no declared type-1 part
    parts = MeasuredTreePartition(
        [
            TreePart(TYPE2, 1, (3,), (0, 1)),
            TreePart(TYPE3, 1, (1, 4), None, 3, (1,)),
            TreePart(TYPE3, 0, (0, 2), None, 1, (0,)),
        ]
    )
    report = verify_eps_partition(t, m, Fraction(2, 3), parts)
    assert not report.ok
    assert any("anchors no type-1" in v for v in report.violations)
    # declared kind must match the member set
    lies = MeasuredTreePartition(
        [
            TreePart(TYPE3, 0, (0, 1, 3, 4), None, 2, (0,)),
            TreePart(TYPE1, 2, (2,), (0, 0)),
        ]
    )
    ok_report = verify_eps_partition(t, m, Fraction(2, 3), lies)
    assert ok_report.ok
    mislabeled = MeasuredTreePartition(
        [
            TreePart(TYPE2, 0, (0, 1, 3, 4), (0, 1)),
            TreePart(TYPE1, 2, (2,), (0, 0)),
        ]
    )
    report = verify_eps_partition(t, m, Fraction(2, 3), mislabeled)
    assert not report.ok
    # non-shape member set
    bad = MeasuredTreePartition(
        [
            TreePart(TYPE1, 0, (0, 3), (0, 1)),
            TreePart(TYPE1, 1, (1, 2, 4), (0, 2)),
        ]
    )
    report = verify_eps_partition(t, m, Fraction(2, 3), bad)
    assert not report.ok


def test_verify_rejects_cover_defects():
    t = PlaneTree([[1, 2], [], []], 0)
    m = TreeMeasure([0, 1, 1])
    missing = MeasuredTreePartition([TreePart(TYPE1, 0, (0, 1), (0, 1))])
    assert not verify_eps_partition(t, m, Fraction(1, 2), missing).ok
    overlap = MeasuredTreePartition(
        [TreePart(TYPE1, 0, (0, 1), (0, 1)), TreePart(TYPE2, 0, (1, 2), (0, 2))]
    )
    assert not verify_eps_partition(t, m, Fraction(1, 2), overlap).ok


def test_bare_vertex_part_is_valid_type1():
    b = PlaneTree([[1, 2], [3, 4], [5, 6], [], [], [], []], 0)
    mb = TreeMeasure([0, 0, 0, 1, 1, 1, 1])
    p = build_eps_partition(b, mb, Fraction(1, 4))
    bare = [q for q in p.parts if q.members == (0,)]
    assert bare and bare[0].kind == TYPE1
    assert verify_eps_partition(b, mb, Fraction(1, 4), p).ok


def test_partition_json_roundtrip():
    tree = random_plane_tree(40, 3, 3)
    m = random_tree_measure(tree, 4)
    p = build_eps_partition(tree, m, Fraction(1, 5))
    again = partition_from_json(partition_to_json(p))
    assert [q.members for q in again.parts] == [q.members for q in p.parts]
    assert verify_eps_partition(tree, m, Fraction(1, 5), again).ok
