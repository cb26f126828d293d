from itertools import combinations

import pytest

from regpart.errors import InputError, PreconditionError
from regpart.generators import (
    SplitMix64,
    half_graph,
    random_caterpillar_decomposition,
    random_graph,
    random_rank_decomposition,
    random_rank_instance,
)
from regpart.gf2 import (
    RankDecomposition,
    caterpillar_order,
    cutrank,
    decomposition_from_json,
    decomposition_to_json,
    decomposition_width,
    layer_certificate,
    xor_rw1_decompose,
)
from regpart.graph import Graph


def naive_cutrank(g, x):
    """Dense elimination over 0/1 column lists, written independently."""
    xs = sorted(set(x))
    comp = [v for v in range(g.n) if v not in set(xs)]
    if not xs or not comp:
        return 0
    matrix = [[1 if g.has_edge(u, v) else 0 for v in comp] for u in xs]
    rank = 0
    for col in range(len(comp)):
        pivot = next((r for r in range(rank, len(matrix)) if matrix[r][col]), None)
        if pivot is None:
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        for r in range(len(matrix)):
            if r != rank and matrix[r][col]:
                matrix[r] = [(a + b) % 2 for a, b in zip(matrix[r], matrix[rank])]
        rank += 1
    return rank


def test_cutrank_examples():
    k22 = Graph(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    assert cutrank(k22, [0, 1]) == 1
    assert cutrank(Graph(5), [0, 1]) == 0
    h3 = half_graph(3)
    assert cutrank(h3, [0, 1, 2]) == 3
    assert cutrank(h3, []) == 0
    assert cutrank(h3, range(6)) == 0


def test_cutrank_complement_and_oracle():
    for seed in range(20):
        n = 6 + seed % 10
        g = random_graph(n, 1, 2, seed * 3)
        rng = SplitMix64(seed)
        x = [v for v in range(n) if rng.chance(1, 2)]
        assert cutrank(g, x) == cutrank(g, sorted(set(range(n)) - set(x)))
        assert cutrank(g, x) == naive_cutrank(g, x)


def test_decomposition_validation():
    with pytest.raises(PreconditionError):
        RankDecomposition([(0, 1), (1, 2)], {0: 0, 1: 2})  # degree-2 node
    with pytest.raises(PreconditionError):
        RankDecomposition([(0, 1)], {0: 0})  # leaf_map not bijective
    dec = RankDecomposition([(0, 1)], {0: 0, 1: 1})
    assert dec.n == 2


def test_width_examples():
    dec = RankDecomposition([(10, 11), (0, 10), (1, 10), (2, 11), (3, 11)], {i: i for i in range(4)})
    p4 = Graph(4, [(0, 1), (1, 2), (2, 3)])
    assert decomposition_width(p4, dec) == 1
    k4 = Graph(4, list(combinations(range(4), 2)))
    assert decomposition_width(k4, dec) == 1
    c5 = Graph(5, [(i, (i + 1) % 5) for i in range(5)])
    dec5 = RankDecomposition(
        [(10, 11), (11, 12), (0, 10), (1, 10), (2, 11), (3, 12), (4, 12)],
        {i: i for i in range(5)},
    )
    assert decomposition_width(c5, dec5) == 2


def test_xor_decompose_examples():
    dec = RankDecomposition([(10, 11), (0, 10), (1, 10), (2, 11), (3, 11)], {i: i for i in range(4)})
    k4 = Graph(4, list(combinations(range(4), 2)))
    layers = xor_rw1_decompose(k4, dec)
    assert len(layers) == 1
    assert set(layers[0]) == set(k4.edges())
    c5 = Graph(5, [(i, (i + 1) % 5) for i in range(5)])
    dec5 = RankDecomposition(
        [(10, 11), (11, 12), (0, 10), (1, 10), (2, 11), (3, 12), (4, 12)],
        {i: i for i in range(5)},
    )
    layers = xor_rw1_decompose(c5, dec5)
    assert len(layers) == 2
    xor = set()
    for layer in layers:
        xor ^= set(layer)
    assert xor == set(c5.edges())
    ok, violations = layer_certificate(c5, dec5, layers)
    assert ok, violations


def test_xor_decompose_rejects_edgeless():
    dec = RankDecomposition([(10, 11), (0, 10), (1, 10), (2, 11), (3, 11)], {i: i for i in range(4)})
    with pytest.raises(PreconditionError):
        xor_rw1_decompose(Graph(4), dec)


def test_planted_instances_certify():
    for seed in range(20):
        n = 12 + (seed % 5) * 13
        r = 1 + seed % 3
        g, dec = random_rank_instance(n, r, seed * 101)
        assert decomposition_width(g, dec) == r
        layers = xor_rw1_decompose(g, dec)
        assert len(layers) == r
        ok, violations = layer_certificate(g, dec, layers)
        assert ok, violations[:3]
        xor = set()
        for layer in layers:
            xor ^= set(layer)
        assert xor == set(g.edges())


def test_caterpillar_order():
    dec = random_caterpillar_decomposition(9, 3)
    order = caterpillar_order(dec)
    assert sorted(order) == list(range(9))
    # general subcubic trees are usually not caterpillars
    dec2 = random_rank_decomposition(20, 1)
    internal = [x for x, nb in dec2.tree_adj.items() if len(nb) == 3]
    spine_degrees = [sum(1 for y in dec2.tree_adj[x] if y in set(internal)) for x in internal]
    if any(d > 2 for d in spine_degrees):
        assert caterpillar_order(dec2) is None


def test_decomposition_json_roundtrip():
    dec = random_caterpillar_decomposition(7, 5)
    again = decomposition_from_json(decomposition_to_json(dec))
    assert again.edges == dec.edges and again.leaf_map == dec.leaf_map
    with pytest.raises(InputError):
        decomposition_from_json({"edges": [[0, 1], [1, 2]], "leaf_map": {"0": 0, "1": 2}})
