from fractions import Fraction

import pytest

from regpart.cographreg import (
    cograph_regular_partition,
    leaf_uniform_measure,
    refine_tree_partition,
    refine_tree_partition_with_parts,
)
from regpart.cotree import EmbeddedCotree, PlaneTree
from regpart.errors import PreconditionError
from regpart.generators import random_cotree
from regpart.graph import is_homogeneous_pair
from regpart.regularity import nice_defect
from regpart.treepart import build_eps_partition


def k4_cotree():
    tree = PlaneTree([[1, 2, 3, 4], [], [], [], []], 0)
    return EmbeddedCotree(tree, 1, [0, 1, 1, 1, 1], [((1,),), None, None, None, None])


def test_leaf_uniform_measure():
    c = k4_cotree()
    m = leaf_uniform_measure(c)
    assert m.mu(1) == Fraction(1, 4)
    assert m.mu(0) == 0
    assert sum(m.mu(v) for v in range(5)) == 1
    with pytest.raises(PreconditionError):
        leaf_uniform_measure(
            EmbeddedCotree(PlaneTree([[1], []], 0), 1, [0, 1], [((1,),), None])
        )


def test_refine_m1_splits_only_by_part():
    c = k4_cotree()
    m = leaf_uniform_measure(c)
    tp = build_eps_partition(c.tree, m, Fraction(1, 2))
    refined = refine_tree_partition(c, tp)
    # one color: pieces are exactly the leaf sets of the tree parts
    leaf_sets = sorted(
        tuple(sorted(c.tree.leaf_pos[x] for x in part.members if not c.tree.children[x]))
        for part in tp.parts
        if any(not c.tree.children[x] for x in part.members)
    )
    assert sorted(refined.blocks) == leaf_sets


def test_refine_cross_part_pairs_homogeneous():
    for seed in range(25):
        for m in (1, 2, 3):
            c = random_cotree(80, m, 4, seed * 3 + m)
            g = c.materialize()
            measure = leaf_uniform_measure(c)
            tp = build_eps_partition(c.tree, measure, Fraction(1, 8))
            refined, piece_part = refine_tree_partition_with_parts(c, tp)
            assert len(refined.blocks) <= 2 * len(tp.parts) * 2 ** (m * m) * m
            report = nice_defect(g, refined)
            for i, j in report.bad_pairs:
                assert piece_part[i] == piece_part[j]


def test_refine_cross_part_exhaustive_small():
    for seed in range(8):
        c = random_cotree(24, 2, 3, seed)
        g = c.materialize()
        measure = leaf_uniform_measure(c)
        tp = build_eps_partition(c.tree, measure, Fraction(1, 4))
        refined, piece_part = refine_tree_partition_with_parts(c, tp)
        for i in range(len(refined.blocks)):
            for j in range(len(refined.blocks)):
                if i != j and piece_part[i] != piece_part[j]:
                    assert is_homogeneous_pair(g, refined.blocks[i], refined.blocks[j])


def test_full_pipeline_examples():
    part, stats = cograph_regular_partition(k4_cotree(), Fraction(1, 2))
    g = k4_cotree().materialize()
    assert nice_defect(g, part).defect == 0
    assert stats["ell"] <= stats["bound"]
    # bound formula spot check: m=2, eps=1/10 -> 40960
    assert Fraction(128, 1) / Fraction(1, 10) * 2 * 2**4 == 40960


def test_pipeline_random_instances():
    for seed in range(12):
        m = 1 + seed % 3
        c = random_cotree(150 + 40 * seed, m, 4, seed * 17)
        g = c.materialize()
        for eps in (Fraction(1, 2), Fraction(1, 5)):
            part, stats = cograph_regular_partition(c, eps)
            report = nice_defect(g, part)
            assert report.defect < eps
            assert report.defect <= stats["defect_upper"]
            assert stats["ell"] <= stats["bound"]


def test_pipeline_rejects_bad_eps():
    c = k4_cotree()
    with pytest.raises(PreconditionError):
        cograph_regular_partition(c, Fraction(3, 2))
