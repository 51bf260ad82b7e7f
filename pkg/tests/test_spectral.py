from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumproduct.field import field_of_order
from sumproduct.graphs import BipartiteGraph, connection_sets
from sumproduct.ring import RingSpec
from sumproduct.spectral import (
    bound_exponent,
    cayley_spectrum,
    character_sum,
    dense_eigh,
    dense_spectrum,
    jacobi_eigh,
    mixing_check,
    nnt_character_spectrum,
    third_eigenvalue,
)


def ring(q, n=1):
    return RingSpec(field_of_order(q), n)


@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_jacobi_matches_lapack(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    M = M + M.T
    w, V = jacobi_eigh(M)
    assert np.allclose(w, np.linalg.eigvalsh(M), atol=1e-9 * max(1, np.abs(M).max()))
    assert np.allclose(M @ V, V * w, atol=1e-8 * max(1, np.abs(M).max()))
    assert np.allclose(V.T @ V, np.eye(n), atol=1e-10)


def test_jacobi_degenerate_inputs():
    w, V = jacobi_eigh(np.zeros((3, 3)))
    assert (w == 0).all()
    w, _ = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    assert w.tolist() == [1.0, 2.0, 3.0]
    with pytest.raises(ValueError):
        dense_eigh(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValueError):
        jacobi_eigh(np.zeros((2, 3)))


def test_nnt_spectrum_n1_q2():
    g = BipartiteGraph(ring(2), "left")
    w = dense_spectrum(g.nnt())
    assert np.allclose(w, [16, 4, 4, 4, 4, 0, 0, 0], atol=1e-9)
    assert np.isclose(w.sum(), np.trace(g.nnt()))


@pytest.mark.parametrize("orientation", ["left", "right"])
@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_character_path_matches_dense_spectrum(orientation, q):
    g = BipartiteGraph(ring(q), orientation)
    dense = np.sort(dense_spectrum(g.nnt()))
    chars = np.sort(nnt_character_spectrum(g))
    assert np.allclose(dense, chars, atol=1e-7 * dense.max())
    assert np.allclose(chars, np.sort(np.linalg.eigvalsh(g.nnt().astype(float))), atol=1e-7 * dense.max())


@pytest.mark.parametrize("q", [2, 3, 4])
def test_cayley_spectrum_vs_direct_character_sums(q):
    R = ring(q)
    for S in connection_sets(R, "right"):
        spec = cayley_spectrum(S)
        for y in range(0, R.card**3, 3):
            assert spec[y] == pytest.approx(character_sum(S, y).real, abs=1e-8)
            assert abs(character_sum(S, y).imag) < 1e-8


@pytest.mark.parametrize("q", [2, 3])
def test_cayley_spectrum_vs_dense_adjacency(q):
    R = ring(q)
    for S in connection_sets(R, "left"):
        A = S.adjacency()
        assert np.allclose(np.sort(cayley_spectrum(S)), np.linalg.eigvalsh(A.astype(float)), atol=1e-8)


@pytest.mark.parametrize("orientation,q,expected", [("left", 2, 2.0), ("left", 3, 3.0), ("right", 2, 2.0), ("right", 3, 3.0)])
def test_lambda3_small(orientation, q, expected):
    g = BipartiteGraph(ring(q), orientation)
    d = third_eigenvalue(g, "dense")
    c = third_eigenvalue(g, "character")
    assert d.lambda3 == pytest.approx(expected, rel=1e-9)
    assert c.lambda3 == pytest.approx(d.lambda3, rel=1e-6)
    assert d.lambda1 == pytest.approx(g.degree, rel=1e-9)
    assert d.measured_constant <= 2


def test_bound_exponents():
    assert bound_exponent(1, "left") == 1
    assert bound_exponent(2, "left") == 6.5
    assert bound_exponent(2, "right") == 7


def test_unknown_method():
    with pytest.raises(ValueError):
        third_eigenvalue(BipartiteGraph(ring(2)), "magic")


@pytest.mark.parametrize("orientation", ["left", "right"])
def test_mixing_holds_on_random_sets(orientation):
    g = BipartiteGraph(ring(5), orientation)
    lam = third_eigenvalue(g).lambda3
    rng = np.random.default_rng(1)
    for _ in range(30):
        X = rng.choice(g.side_size, size=rng.integers(1, g.side_size), replace=False)
        Y = rng.choice(g.side_size, size=rng.integers(1, g.side_size), replace=False)
        rep = mixing_check(g, X, Y, lam)
        assert rep.holds
        assert rep.edges == sum(int(np.isin(g.neighbors[x], Y).sum()) for x in X)


def test_mixing_detects_a_too_small_lambda():
    g = BipartiteGraph(ring(3), "left")
    X = np.arange(9)
    Y = g.neighbors[0]
    assert not mixing_check(g, X, Y, 0.0).holds
