"""Closed-form counts: rank statistics, linear-system solution counts, and
the degrees of the Cayley graphs that decompose NN^T.

Everything here returns exact Python ints. Leading exponents are reported
separately so asymptotic claims can be compared as integers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import FieldSpec
from .ring import batch_matmul, mat_rank

LEFT_FAMILIES = ("G_k", "H_k")
RIGHT_FAMILIES = ("G_k1k2", "H_k1k2")
FAMILIES = LEFT_FAMILIES + RIGHT_FAMILIES


def q_factor(x: int, k: int, q: int) -> int:
    """Q_k(x) = (x - 1)(x - q)...(x - q^(k-1)) for x a power of q."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = 1
    for i in range(k):
        out *= x - q**i
    return out


@dataclass(frozen=True)
class RankCountQuery:
    m: int
    n: int
    k: int
    q: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("block dimensions must be positive")
        if not 0 <= self.k <= min(self.m, self.n):
            raise ValueError(f"rank {self.k} impossible for a {self.m}x{self.n} matrix")


def rank_count(m: int, n: int, k: int, q: int) -> int:
    """Number of m x n matrices over F_q of rank exactly k, in closed form."""
    RankCountQuery(m, n, k, q)
    num = q_factor(q**m, k, q) * q_factor(q**n, k, q)
    den = q_factor(q**k, k, q)
    assert num % den == 0
    return num // den


# -- linear systems ------------------------------------------------------------


def linear_solution_count(F: FieldSpec, block, rhs) -> int:
    """Number of (b; f) with (a e) (b; f) = c, for block = (a e) of shape n x 2n."""
    block = np.asarray(block, dtype=np.int64)
    rhs = np.asarray(rhs, dtype=np.int64)
    n = block.shape[0]
    if block.shape != (n, 2 * n) or rhs.shape != (n, n):
        raise ValueError("expected an n x 2n block and an n x n right-hand side")
    k = mat_rank(F, block)
    if mat_rank(F, np.concatenate([block, rhs], axis=1)) != k:
        return 0
    return F.q ** ((2 * n - k) * n)


def rank_normal_form(F: FieldSpec, a) -> tuple[np.ndarray, np.ndarray, int]:
    """Invertible P, Q with P a Q = diag(I_k, 0).

    Rows are reduced to reduced echelon form (pivot = first nonzero entry
    found scanning rows in order), then column operations clear the
    non-pivot columns and move the pivots to the front.
    """
    a = np.array(a, dtype=np.int64, copy=True)
    n, c = a.shape
    add, mul, neg, inv = F.add_table, F.mul_table, F.neg_table, F.inv_table
    R = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    pivots = []
    row = 0
    for col in range(c):
        nz = [r for r in range(row, n) if R[r, col]]
        if not nz:
            continue
        r = nz[0]
        R[[row, r]] = R[[r, row]]
        R[row] = mul[inv[R[row, col]], R[row]]
        for rr in range(n):
            if rr != row and R[rr, col]:
                R[rr] = add[R[rr], neg[mul[R[rr, col], R[row]]]]
        pivots.append(col)
        row += 1
        if row == n:
            break
    k = len(pivots)
    E, P = R[:, :c], R[:, c:]
    # columns: bring pivots to the front, then clear the rest of each pivot row
    order = pivots + [j for j in range(c) if j not in pivots]
    Q = np.eye(c, dtype=np.int64)[:, order]
    E = E[:, order]
    for j in range(k, c):
        for i in range(k):
            f = E[i, j]
            if f:
                E[:, j] = add[E[:, j], neg[mul[f, E[:, i]]]]
                Q[:, j] = add[Q[:, j], neg[mul[f, Q[:, i]]]]
    return P, Q, k


def two_sided_solution_count(F: FieldSpec, a_diff, e_diff, c_diff) -> int:
    """Number of (b, f) with b a + e f = c, where a, e, c are the given differences.

    With k1 = rank(e), k2 = rank(a) and normal forms P1 e Q1, P2 a Q2, the
    system is solvable iff the lower-right (n-k1) x (n-k2) block of
    P1 c Q2 vanishes; then it has q^(2n^2 - k1 n - k2 n + k1 k2) solutions.
    """
    a = np.asarray(a_diff, dtype=np.int64)
    e = np.asarray(e_diff, dtype=np.int64)
    c = np.asarray(c_diff, dtype=np.int64)
    n = a.shape[0]
    if a.shape != (n, n) or e.shape != (n, n) or c.shape != (n, n):
        raise ValueError("expected three n x n matrices")
    P1, Q1, k1 = rank_normal_form(F, e)
    P2, Q2, k2 = rank_normal_form(F, a)
    C = batch_matmul(F, batch_matmul(F, P1, c), Q2)
    if C[k1:, k2:].any():
        return 0
    return F.q ** (2 * n * n - k1 * n - k2 * n + k1 * k2)


# -- degrees of the auxiliary Cayley graphs ----------------------------------------


@dataclass(frozen=True)
class DegreeFormula:
    family: str
    n: int
    q: int
    ranks: tuple[int, ...]
    value: int
    exponent: int


def legal_ranks(family: str, n: int) -> list[tuple[int, ...]]:
    if family == "G_k":
        return [(k,) for k in range(1, n + 1)]
    if family == "H_k":
        return [(k,) for k in range(n)]
    if family == "G_k1k2":
        return [(k1, k2) for k1 in range(n + 1) for k2 in range(n + 1) if (k1, k2) != (0, 0)]
    if family == "H_k1k2":
        return [(k1, k2) for k1 in range(n) for k2 in range(n)]
    raise ValueError(f"unknown family {family!r}")


def _normalise_ranks(ranks) -> tuple[int, ...]:
    if isinstance(ranks, int):
        return (ranks,)
    return tuple(int(r) for r in ranks)


def degree_formula(family: str, n: int, q: int, ranks) -> DegreeFormula:
    ranks = _normalise_ranks(ranks)
    if ranks not in legal_ranks(family, n):
        raise ValueError(f"ranks {ranks} are illegal for {family} at n={n}")
    N2 = n * n
    if family in LEFT_FAMILIES:
        (k,) = ranks
        blocks = rank_count(n, 2 * n, k, q)
        if family == "G_k":
            value = blocks * q ** (n * k)
            exponent = 4 * n * k - k * k
        else:
            value = blocks * (q**N2 - q ** (n * k))
            exponent = N2 + 3 * n * k - k * k
    else:
        k1, k2 = ranks
        pairs = rank_count(n, n, k1, q) * rank_count(n, n, k2, q)
        free = n * k1 + n * k2 - k1 * k2
        if family == "G_k1k2":
            value = pairs * q**free
            exponent = 3 * n * k1 + 3 * n * k2 - k1 * k1 - k2 * k2 - k1 * k2
        else:
            value = pairs * (q**N2 - q**free)
            exponent = N2 + 2 * n * k1 + 2 * n * k2 - k1 * k1 - k2 * k2
    return DegreeFormula(family, n, q, ranks, value, exponent)


def nnt_coefficient(family: str, n: int, q: int, ranks) -> int:
    """Weight of the family's adjacency matrix in the NN^T decomposition.

    A pair at difference s in a G-family shares q^(solution exponent)
    neighbours; the J term already contributes q^(n^2), hence the
    subtraction. H-families share none.
    """
    ranks = _normalise_ranks(ranks)
    N2 = n * n
    if family == "G_k":
        (k,) = ranks
        return q ** (2 * N2 - n * k) - q**N2
    if family == "G_k1k2":
        k1, k2 = ranks
        return q ** (2 * N2 - k1 * n - k2 * n + k1 * k2) - q**N2
    if family in ("H_k", "H_k1k2"):
        return -(q**N2)
    raise ValueError(f"unknown family {family!r}")
