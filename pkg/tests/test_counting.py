from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import all_matrices, brute_linear_count, brute_two_sided_count, ofield
from sumproduct.counting import (
    FAMILIES,
    degree_formula,
    legal_ranks,
    linear_solution_count,
    nnt_coefficient,
    q_factor,
    rank_count,
    rank_normal_form,
    two_sided_solution_count,
)
from sumproduct.field import field_of_order
from sumproduct.ring import batch_matmul, mat_rank


def test_q_factor_examples():
    assert q_factor(4, 1, 2) == 3
    assert q_factor(4, 2, 2) == 6
    assert q_factor(9, 0, 3) == 1
    with pytest.raises(ValueError):
        q_factor(4, -1, 2)


def test_rank_count_examples():
    assert rank_count(2, 2, 1, 2) == 9
    assert rank_count(2, 2, 2, 2) == 6
    assert rank_count(2, 2, 1, 3) == 32
    assert rank_count(3, 3, 0, 5) == 1
    with pytest.raises(ValueError):
        rank_count(2, 2, 3, 2)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("m,n", [(1, 2), (2, 1), (2, 2), (1, 3)])
def test_rank_count_vs_span_oracle(q, m, n):
    from oracles import rank_by_span

    O = ofield(q)
    counts = {}
    for a in all_matrices(O, m, n):
        r = rank_by_span(O, a)
        counts[r] = counts.get(r, 0) + 1
    for k in range(min(m, n) + 1):
        assert rank_count(m, n, k, q) == counts.get(k, 0)


@given(st.integers(1, 6), st.integers(1, 6), st.sampled_from([2, 3, 4, 5, 7, 8, 9]))
def test_rank_counts_sum_to_all_matrices(m, n, q):
    assert sum(rank_count(m, n, k, q) for k in range(min(m, n) + 1)) == q ** (m * n)


def test_linear_solution_examples():
    F = field_of_order(2)
    assert linear_solution_count(F, [[1, 0]], [[1]]) == 2
    assert linear_solution_count(F, [[0, 0]], [[1]]) == 0
    assert linear_solution_count(F, [[0, 0]], [[0]]) == 4
    with pytest.raises(ValueError):
        linear_solution_count(F, [[1, 0, 0]], [[1]])


def test_two_sided_examples():
    F = field_of_order(2)
    assert two_sided_solution_count(F, [[1]], [[1]], [[1]]) == 2
    F3 = field_of_order(3)
    assert two_sided_solution_count(F3, [[0]], [[2]], [[1]]) == 3
    assert two_sided_solution_count(F3, [[0]], [[0]], [[1]]) == 0
    with pytest.raises(ValueError):
        two_sided_solution_count(F, [[1]], [[1, 0]], [[1]])


@pytest.mark.parametrize("q", [2, 3, 4])
def test_solution_counts_vs_brute_force_n1(q):
    F = field_of_order(q)
    O = ofield(F.p, F.m)
    for a in range(q):
        for e in range(q):
            for c in range(q):
                A, E, C = ((a,),), ((e,),), ((c,),)
                assert linear_solution_count(F, [[a, e]], [[c]]) == brute_linear_count(O, 1, A, E, C)
                assert two_sided_solution_count(F, [[a]], [[e]], [[c]]) == brute_two_sided_count(O, 1, A, E, C)


@given(st.data())
def test_solution_counts_vs_brute_force_n2(data):
    F = field_of_order(2)
    O = ofield(2)
    a, e, c = (np.array(data.draw(st.lists(st.integers(0, 1), min_size=4, max_size=4))).reshape(2, 2)
               for _ in range(3))
    t = lambda x: tuple(map(tuple, x.tolist()))  # noqa: E731
    assert linear_solution_count(F, np.concatenate([a, e], axis=1), c) == brute_linear_count(O, 2, t(a), t(e), t(c))
    assert two_sided_solution_count(F, a, e, c) == brute_two_sided_count(O, 2, t(a), t(e), t(c))


@given(st.sampled_from([2, 3, 4, 5, 8, 9]), st.integers(1, 3), st.integers(1, 4), st.data())
def test_rank_normal_form(q, r, c, data):
    F = field_of_order(q)
    a = np.array(data.draw(st.lists(st.integers(0, q - 1), min_size=r * c, max_size=r * c))).reshape(r, c)
    P, Q, k = rank_normal_form(F, a)
    assert k == mat_rank(F, a)
    assert mat_rank(F, P) == r and mat_rank(F, Q) == c
    D = batch_matmul(F, batch_matmul(F, P, a), Q)
    expected = np.zeros((r, c), dtype=np.int64)
    expected[range(k), range(k)] = 1
    assert np.array_equal(D, expected)


def test_degree_examples():
    assert degree_formula("G_k", 1, 2, 1).value == 6
    assert degree_formula("H_k", 1, 2, 0).value == 1
    assert degree_formula("G_k1k2", 1, 2, (1, 0)).value == 2
    assert degree_formula("G_k1k2", 1, 2, (1, 1)).value == 2
    with pytest.raises(ValueError):
        degree_formula("G_k", 1, 2, 0)
    with pytest.raises(ValueError):
        degree_formula("G_k1k2", 2, 2, (0, 0))
    with pytest.raises(ValueError):
        legal_ranks("X", 1)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_families_partition_nonzero_triples(n, q):
    total = q ** (3 * n * n) - 1
    left = sum(degree_formula(f, n, q, r).value for f in ("G_k", "H_k") for r in legal_ranks(f, n))
    right = sum(degree_formula(f, n, q, r).value for f in ("G_k1k2", "H_k1k2") for r in legal_ranks(f, n))
    assert left == total
    assert right == total


@pytest.mark.parametrize("n", [1, 2, 3])
def test_degree_exponent_is_leading(n):
    # value / q^exponent tends to 1 as q grows
    for fam in FAMILIES:
        for r in legal_ranks(fam, n):
            d = degree_formula(fam, n, 10007, r)
            assert 0.99 < d.value / 10007**d.exponent < 1.01


@pytest.mark.parametrize("n,q", [(1, 2), (1, 3), (2, 2)])
def test_nnt_coefficients_sum_to_row_total(n, q):
    # each row of NN^T sums to deg^2 (every vertex has deg neighbours of degree deg)
    deg = q ** (2 * n * n)
    side = q ** (3 * n * n)
    for fams in (("G_k", "H_k"), ("G_k1k2", "H_k1k2")):
        total = q ** (n * n) * side + deg - q ** (n * n)
        for f in fams:
            for r in legal_ranks(f, n):
                total += nnt_coefficient(f, n, q, r) * degree_formula(f, n, q, r).value
        assert total == deg * deg
