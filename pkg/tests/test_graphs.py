from __future__ import annotations

import numpy as np
import pytest

from oracles import mat_add, mat_from_index, mat_mul, ofield
from sumproduct.counting import degree_formula, legal_ranks
from sumproduct.field import field_of_order
from sumproduct.graphs import (
    BipartiteGraph,
    build_connection_set,
    classify_differences,
    connection_sets,
    product_vertices,
    triple_decode,
    triple_encode,
    verify_nnt_decomposition,
)
from sumproduct.ring import RingSpec
from sumproduct.sets import count_N6, set_build


def ring(q, n=1):
    return RingSpec(field_of_order(q), n)


def test_triple_encoding_round_trip():
    R = ring(3, 1)
    idx = triple_encode(R, 1, 2, 0)
    assert idx == 1 + 3 * 2
    assert [int(t) for t in triple_decode(R, idx)] == [1, 2, 0]


@pytest.mark.parametrize("orientation", ["left", "right"])
@pytest.mark.parametrize("q,n", [(2, 1), (3, 1), (4, 1)])
def test_edges_match_oracle(orientation, q, n):
    R = ring(q, n)
    O = ofield(R.field.p, R.field.m)
    g = BipartiteGraph(R, orientation)
    assert g.side_size == q ** (3 * n * n) and g.degree == q ** (2 * n * n)
    nb = g.neighbors
    assert nb.shape == (g.side_size, g.degree)
    for u in range(0, g.side_size, 5):
        a, e, c = (mat_from_index(O, int(t), n) for t in triple_decode(R, u))
        expected = set()
        for v in range(g.side_size):
            b, f, d = (mat_from_index(O, int(t), n) for t in triple_decode(R, v))
            first = mat_mul(O, a, b) if orientation == "left" else mat_mul(O, b, a)
            if mat_add(O, first, mat_mul(O, e, f)) == mat_add(O, c, d):
                expected.add(v)
        assert set(nb[u].tolist()) == expected
        assert set(g.neighbors_of(u).tolist()) == expected
    right_deg = np.bincount(nb.ravel(), minlength=g.side_size)
    assert (right_deg == g.degree).all()


def test_edge_count_and_export(tmp_path):
    g = BipartiteGraph(ring(2), "left")
    assert g.edge_count == 32
    path = tmp_path / "edges.txt"
    assert g.export_edge_list(path) == 32
    text = path.read_bytes()
    lines = text.decode("ascii").splitlines()
    assert len(lines) == 32 and text.endswith(b"\n")
    for line in lines:
        u, v = map(int, line.split(" "))
        assert g.is_edge(u, v)


@pytest.mark.parametrize("orientation", ["left", "right"])
@pytest.mark.parametrize("q,n", [(2, 1), (3, 1), (4, 1), (5, 1), (2, 2)])
def test_connection_sets_match_degree_formulas(orientation, q, n):
    R = ring(q, n)
    sets = connection_sets(R, orientation)
    covered = np.zeros(R.card**3, dtype=np.int64)
    for S in sets:
        assert S.size == degree_formula(S.family, n, q, S.ranks).value
        assert S.is_symmetric()
        covered[S.members] += 1
    assert covered[0] == 0
    assert (covered[1:] == 1).all()


@pytest.mark.parametrize("orientation", ["left", "right"])
@pytest.mark.parametrize("q", [2, 3])
def test_nnt_decomposition_exact(orientation, q):
    R = ring(q)
    rep = verify_nnt_decomposition(R, orientation)
    assert rep.equal
    assert rep.max_discrepancy == 0


def test_nnt_decomposition_n2_left():
    rep = verify_nnt_decomposition(ring(2, 2), "left")
    assert rep.equal


def test_unknown_family_and_orientation():
    with pytest.raises(ValueError):
        build_connection_set("K", ring(2), 1)
    with pytest.raises(ValueError):
        BipartiteGraph(ring(2), "up")
    with pytest.raises(ValueError):
        classify_differences(ring(2), "sideways")


@pytest.mark.parametrize("q", [2, 3, 5])
def test_edge_count_between_is_N6(q):
    R = ring(q)
    g = BipartiteGraph(R, "left")
    for seed in range(4):
        S = [set_build(R, "random", density=0.6, seed=seed, stream=k) for k in range(6)]
        A, B, C, D, E, F = S
        X = product_vertices(R, A, E, C)
        Y = product_vertices(R, B, F, D)
        assert g.edge_count_between(X, Y) == count_N6(A, B, C, D, E, F)


def test_legal_ranks_cover_all_sets():
    R = ring(2, 2)
    names = {(S.family, S.ranks) for S in connection_sets(R, "right")}
    expected = {(f, r) for f in ("G_k1k2", "H_k1k2") for r in legal_ranks(f, 2)}
    assert names == expected
