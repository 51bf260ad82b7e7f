"""The matrix ring M_n(F_q): arithmetic, elimination, and index encoding.

A matrix is an ``(n, n)`` int64 array of field reps. Its index is the
row-major base-q number ``sum(a[r, c] * q**(r*n + c))``, so matrix addition
is digitwise field addition on indices.

Batched routines take arrays of shape ``(..., r, c)`` and are what the
exhaustive oracles and graph builders run on; the scalar helpers are thin
wrappers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .field import FieldSpec, VectorSpace

ENUMERATION_CEILING = 2**30
TABLE_CEILING = 2**11


@dataclass(frozen=True)
class RingSpec:
    field: FieldSpec
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix dimension must be >= 1")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def card(self) -> int:
        return self.field.q ** (self.n * self.n)

    def __repr__(self):
        return f"M_{self.n}({self.field!r})"

    @cached_property
    def space(self) -> VectorSpace:
        return VectorSpace(self.field, self.n * self.n)

    # -- encoding -------------------------------------------------------------

    def encode(self, a) -> int:
        a = self._as_matrix(a)
        return int(self.space.index(a.reshape(-1)))

    def decode(self, idx: int) -> np.ndarray:
        if not 0 <= int(idx) < self.card:
            raise ValueError(f"index {idx} out of range for {self!r}")
        return self.space.digits(int(idx)).reshape(self.n, self.n)

    def encode_many(self, mats) -> np.ndarray:
        mats = np.asarray(mats, dtype=np.int64)
        return self.space.index(mats.reshape(mats.shape[:-2] + (self.n * self.n,)))

    def decode_many(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return self.space.digits(idx).reshape(idx.shape + (self.n, self.n))

    def _as_matrix(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if a.shape != (self.n, self.n):
            raise ValueError(f"expected a {self.n}x{self.n} matrix, got shape {a.shape}")
        if a.size and (a.min() < 0 or a.max() >= self.q):
            raise ValueError("matrix entry outside the field")
        return a

    # -- elements -----------------------------------------------------------------

    def zero(self) -> np.ndarray:
        return np.zeros((self.n, self.n), dtype=np.int64)

    def identity(self) -> np.ndarray:
        return np.eye(self.n, dtype=np.int64)

    @property
    def identity_index(self) -> int:
        return self.encode(self.identity())

    # -- index-level arithmetic (vectorised) ----------------------------------

    def add_idx(self, x, y) -> np.ndarray:
        if self._tabulate:
            return self.add_table[x, y]
        return self.space.add(x, y)

    def sub_idx(self, x, y) -> np.ndarray:
        return self.space.sub(x, y)

    def neg_idx(self, x) -> np.ndarray:
        return self.space.neg(x)

    def mul_idx(self, x, y) -> np.ndarray:
        if self._tabulate:
            return self.mul_table[x, y]
        x, y = np.broadcast_arrays(np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64))
        prod = batch_matmul(self.field, self.decode_many(x), self.decode_many(y))
        return self.encode_many(prod)

    @property
    def _tabulate(self) -> bool:
        return self.card <= TABLE_CEILING

    @cached_property
    def add_table(self) -> np.ndarray:
        idx = np.arange(self.card, dtype=np.int64)
        t = self.space.add(idx[:, None], idx[None, :])
        t.setflags(write=False)
        return t

    @cached_property
    def mul_table(self) -> np.ndarray:
        mats = self.decode_many(np.arange(self.card, dtype=np.int64))
        t = self.encode_many(batch_matmul(self.field, mats[:, None], mats[None, :]))
        t.setflags(write=False)
        return t

    @cached_property
    def rank_of_index(self) -> np.ndarray:
        """rank of every matrix, indexed by MatrixIndex."""
        self._check_enumerable()
        r = batch_rank(self.field, self.decode_many(np.arange(self.card, dtype=np.int64)))
        r.setflags(write=False)
        return r

    @cached_property
    def det_of_index(self) -> np.ndarray:
        self._check_enumerable()
        _, d = batch_eliminate(self.field, self.decode_many(np.arange(self.card, dtype=np.int64)))
        d.setflags(write=False)
        return d

    def _check_enumerable(self):
        if self.card > ENUMERATION_CEILING:
            raise ValueError(f"{self!r} has {self.card} elements, above the enumeration ceiling")


# -- batched linear algebra over F_q -------------------------------------------


def batch_matmul(F: FieldSpec, a, b) -> np.ndarray:
    """Matrix product over F_q for broadcastable stacks of shape (..., r, k) @ (..., k, c)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if F.m == 1:
        return np.matmul(a, b) % F.p
    a, b = a[..., :, :, None], b[..., None, :, :]
    prods = F.mul_table[a, b]
    acc = prods[..., 0, :]
    for t in range(1, prods.shape[-2]):
        acc = F.add_table[acc, prods[..., t, :]]
    return acc


def batch_eliminate(F: FieldSpec, mats) -> tuple[np.ndarray, np.ndarray]:
    """Forward elimination on a stack of matrices.

    Returns ``(rank, det)`` per matrix. ``det`` is only meaningful for square
    inputs (it is the product of pivots with the swap sign, 0 if singular).
    """
    M = np.array(mats, dtype=np.int64, copy=True)
    if M.ndim < 2:
        raise ValueError("expected a stack of matrices")
    batch = M.shape[:-2]
    r, c = M.shape[-2:]
    M = M.reshape((-1, r, c))
    N = M.shape[0]
    rank = np.zeros(N, dtype=np.int64)
    det = np.ones(N, dtype=np.int64)
    rows = np.arange(r)
    sel = np.arange(N)
    add, mul, neg, inv = F.add_table, F.mul_table, F.neg_table, F.inv_table
    for j in range(c):
        cand = (M[:, :, j] != 0) & (rows[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        live = sel[has]
        top = rank[has]
        src = piv[has]
        swapped = src != top
        # swap pivot row into position
        tmp = M[live, top].copy()
        M[live, top] = M[live, src]
        M[live, src] = tmp
        det[live[swapped]] = neg[det[live[swapped]]]
        pv = M[live, top, j]
        det[live] = mul[det[live], pv]
        pivot_row = mul[inv[pv][:, None], M[live, top]]
        M[live, top] = pivot_row
        # clear column j below the pivot
        factors = M[live, :, j].copy()
        factors[rows[None, :] <= top[:, None]] = 0
        M[live] = add[M[live], neg[mul[factors[:, :, None], pivot_row[:, None, :]]]]
        rank[live] += 1
    if r != c:
        det[:] = 0
    det[rank < min(r, c)] = 0
    return rank.reshape(batch), det.reshape(batch)


def batch_rank(F: FieldSpec, mats) -> np.ndarray:
    return batch_eliminate(F, mats)[0]


# -- scalar operations ---------------------------------------------------------


def mat_arith(spec: RingSpec, op: str, a, b=None) -> np.ndarray:
    F = spec.field
    a = spec._as_matrix(a)
    if op == "neg":
        return F.neg_table[a]
    b = spec._as_matrix(b)
    if op == "add":
        return F.add_table[a, b]
    if op == "sub":
        return F.sub_table[a, b]
    if op == "mul":
        return batch_matmul(F, a, b)
    raise ValueError(f"unknown ring operation {op!r}")


def mat_rank(F: FieldSpec, a) -> int:
    """Rank of any r x c array over F_q."""
    a = np.asarray(a, dtype=np.int64)
    if a.ndim != 2:
        raise ValueError("rank needs a 2-d array")
    if a.size == 0:
        return 0
    return int(batch_rank(F, a[None])[0])


def mat_inv_det(spec: RingSpec, a) -> tuple[int, np.ndarray | None]:
    """Determinant and, when it is nonzero, the inverse (Gauss-Jordan on [a | I])."""
    F = spec.field
    a = spec._as_matrix(a)
    n = spec.n
    aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    det = 1
    for col in range(n):
        nz = [r for r in range(col, n) if aug[r, col]]
        if not nz:
            return 0, None
        r = nz[0]
        if r != col:
            aug[[col, r]] = aug[[r, col]]
            det = F.neg(det)
        pv = int(aug[col, col])
        det = F.mul(det, pv)
        aug[col] = F.mul_table[F.inv(pv), aug[col]]
        for rr in range(n):
            if rr != col and aug[rr, col]:
                aug[rr] = F.sub_table[aug[rr], F.mul_table[aug[rr, col], aug[col]]]
    return det, aug[:, n:].copy()


def enumerate_matrices(spec: RingSpec, rank: int | None = None, det: str | None = None,
                       predicate=None, chunk: int = 1 << 16):
    """Yield every matrix of ``spec`` in increasing index order.

    ``rank`` keeps matrices of that rank; ``det`` is ``"nonzero"`` or
    ``"zero"``; ``predicate`` is any callable on a single matrix.
    """
    spec._check_enumerable()
    if det not in (None, "zero", "nonzero"):
        raise ValueError("det filter must be 'zero' or 'nonzero'")
    for start in range(0, spec.card, chunk):
        idx = np.arange(start, min(start + chunk, spec.card), dtype=np.int64)
        mats = spec.decode_many(idx)
        keep = np.ones(len(idx), dtype=bool)
        if rank is not None or det is not None:
            r, _ = batch_eliminate(spec.field, mats)
            if rank is not None:
                keep &= r == rank
            if det == "nonzero":
                keep &= r == spec.n
            elif det == "zero":
                keep &= r < spec.n
        for i in np.flatnonzero(keep):
            m = mats[i]
            if predicate is None or predicate(m):
                yield m
