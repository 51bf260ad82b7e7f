from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import (
    brute_a_plus_b_eq_cd,
    brute_a_plus_bc,
    brute_collisions,
    brute_energy,
    brute_N6,
    brute_productset,
    brute_sumset,
    ofield,
)
from sumproduct.field import field_of_order
from sumproduct.ring import RingSpec
from sumproduct.sets import (
    MatrixSet,
    SingularMember,
    additive_energy,
    collision_count_apb_times_c,
    compose_a_plus_bc,
    compose_apb_times_c,
    count_a_plus_b_eq_cd,
    count_N6,
    exact_dot,
    image_counts,
    philox_uniform,
    set_build,
    set_combine,
)

SMALL = [(2, 1), (3, 1), (4, 1), (5, 1), (7, 1), (2, 2)]


def ring(q, n=1):
    return RingSpec(field_of_order(q), n)


@st.composite
def small_sets(draw, k, max_size=5):
    q, n = draw(st.sampled_from(SMALL))
    R = ring(q, n)
    out = []
    for _ in range(k):
        out.append(sorted(draw(st.sets(st.integers(0, R.card - 1), max_size=max_size))))
    return R, out


def oracle_args(R):
    return ofield(R.field.p, R.field.m), R.n


def test_builders():
    assert set_build(ring(5), "gl").indices().tolist() == [1, 2, 3, 4]
    assert set_build(ring(2, 2), "zero").size == 10
    assert set_build(ring(3), "all").size == 3
    assert set_build(ring(3), "list", members=[]).size == 0
    with pytest.raises(ValueError):
        set_build(ring(3), "random", density=0.0)
    with pytest.raises(ValueError):
        set_build(ring(3), "bogus")


def test_random_sets_are_deterministic_and_respect_universe():
    R = ring(2, 2)
    a = set_build(R, "random", density=0.5, seed=7, stream=3)
    b = set_build(R, "random", density=0.5, seed=7, stream=3)
    c = set_build(R, "random", density=0.5, seed=7, stream=4)
    assert a == b and hash(a) == hash(b)
    assert a != c or a.size in (0, 16)
    g = set_build(R, "random", density=0.9, seed=1, within="gl")
    assert all(R.rank_of_index[i] == 2 for i in g)
    assert set_build(R, "random", density=1.0, seed=0).size == 16
    assert np.array_equal(philox_uniform(3, 1, 10), philox_uniform(3, 1, 10))
    with pytest.raises(ValueError):
        philox_uniform(-1, 0, 3)


def test_random_density_is_roughly_right():
    R = ring(7, 2)
    s = set_build(R, "random", density=0.25, seed=11)
    assert abs(s.size / R.card - 0.25) < 0.03


@given(small_sets(1, max_size=30))
def test_bitset_invariants(rs):
    R, (A,) = rs
    S = MatrixSet.from_indices(R, A)
    assert S.size == len(A) == len(S)
    assert S.indices().tolist() == A
    assert all(i in S for i in A)
    assert sum(i in S for i in range(R.card)) == len(A)
    assert -1 not in S and R.card not in S
    assert MatrixSet.from_json(json.dumps(S.to_json())) == S


def test_json_format():
    S = MatrixSet.from_indices(ring(4), [1, 3])
    obj = S.to_json()
    assert obj["encoding"] == "base-q row-major"
    assert obj["spec"] == {"n": 1, "p": 2, "m": 2, "q": 4, "modulus": [1, 1, 1]}
    assert obj["members"] == [1, 3]
    obj["encoding"] = "other"
    with pytest.raises(ValueError):
        MatrixSet.from_json(obj)


def test_from_indices_rejects_out_of_range():
    with pytest.raises(ValueError):
        MatrixSet.from_indices(ring(2), [2])


def test_mixed_rings_rejected():
    with pytest.raises(ValueError):
        set_combine("sum", set_build(ring(2), "all"), set_build(ring(3), "all"))


@given(small_sets(2, max_size=8))
def test_sumset_and_productset_match_oracle(rs):
    R, (A, B) = rs
    O, n = oracle_args(R)
    X, Y = MatrixSet.from_indices(R, A), MatrixSet.from_indices(R, B)
    s = set_combine("sum", X, Y)
    p = set_combine("product", X, Y)
    assert set(s.indices().tolist()) == brute_sumset(O, n, A, B)
    assert set(p.indices().tolist()) == brute_productset(O, n, A, B)
    assert s.size <= min(R.card, X.size * Y.size)


@given(small_sets(2, max_size=6))
def test_energy_matches_oracle(rs):
    R, (A, B) = rs
    O, n = oracle_args(R)
    X, Y = MatrixSet.from_indices(R, A), MatrixSet.from_indices(R, B)
    assert additive_energy(X, Y) == brute_energy(O, n, A, B)


@given(small_sets(6, max_size=3))
def test_N6_matches_oracle(rs):
    R, sets = rs
    O, n = oracle_args(R)
    ms = [MatrixSet.from_indices(R, s) for s in sets]
    assert count_N6(*ms) == brute_N6(O, n, *sets)


@given(small_sets(4, max_size=4))
def test_a_plus_b_eq_cd_matches_oracle(rs):
    R, sets = rs
    O, n = oracle_args(R)
    ms = [MatrixSet.from_indices(R, s) for s in sets]
    assert count_a_plus_b_eq_cd(*ms) == brute_a_plus_b_eq_cd(O, n, *sets)


@given(small_sets(3, max_size=4))
def test_compositions_match_oracle(rs):
    R, (A, B, C) = rs
    O, n = oracle_args(R)
    X, Y, Z = (MatrixSet.from_indices(R, s) for s in (A, B, C))
    image, t = compose_a_plus_bc(X, Y, Z)
    expected = brute_a_plus_bc(O, n, A, B, C)
    assert {int(k): int(v) for k, v in enumerate(t) if v} == expected
    assert int(t.sum()) == len(A) * len(B) * len(C)
    assert image.size == len(expected)
    coll, size = brute_collisions(O, n, A, B, C)
    assert collision_count_apb_times_c(X, Y, Z) == coll
    assert compose_apb_times_c(X, Y, Z)[0].size == size


def test_full_set_examples():
    R = ring(2)
    full = set_build(R, "all")
    assert count_N6(*[full] * 6) == 32
    assert additive_energy(full, full) == 8
    assert additive_energy(set_build(ring(3), "all"), set_build(ring(3), "all")) == 27
    assert count_a_plus_b_eq_cd(*[full] * 4) == 8
    _, t = compose_a_plus_bc(full, full, full)
    assert t.tolist() == [4, 4]


def test_small_products():
    R = ring(5)
    X = MatrixSet.from_indices(R, [1, 2])
    assert set_combine("product", X, X).indices().tolist() == [1, 2, 4]
    R2 = ring(2, 2)
    gl = set_build(R2, "gl")
    assert set_combine("product", gl, gl).size == 6


def test_negate_and_invert():
    R = ring(7)
    X = MatrixSet.from_indices(R, [1, 3, 5])
    assert set_combine("negate", X).indices().tolist() == [2, 4, 6]
    assert set_combine("invert", X).indices().tolist() == [1, 3, 5]  # 3*5 = 1, 1*1 = 1
    with pytest.raises(SingularMember):
        set_combine("invert", MatrixSet.from_indices(R, [0, 1]))
    with pytest.raises(ValueError):
        set_combine("power", X)


@given(small_sets(1, max_size=10))
def test_invert_is_an_involution_on_gl(rs):
    R, (A,) = rs
    X = MatrixSet.from_mask(R, MatrixSet.from_indices(R, A).mask() & (R.rank_of_index == R.n))
    inv = set_combine("invert", X)
    assert inv.size == X.size
    assert set_combine("invert", inv) == X


def test_empty_sets_give_zero_counts():
    R = ring(3)
    empty = set_build(R, "list", members=[])
    full = set_build(R, "all")
    assert count_N6(empty, full, full, full, full, full) == 0
    assert additive_energy(empty, full) == 0
    assert set_combine("sum", empty, full).size == 0


def test_image_counts_big_weights_stay_exact():
    R = ring(2)
    big = np.array([2**40, 2**40], dtype=np.int64)
    out = image_counts(R, "add", big, big)
    assert [int(x) for x in out] == [2**81, 2**81]
    assert exact_dot(np.array([2**40], dtype=np.int64), np.array([2**40], dtype=np.int64)) == 2**80
