"""Bipartite sum-product graphs on (M_n(F_q))^3 and their Cayley decomposition.

Vertices on either side are triples of matrices, encoded as
``x + G*y + G**2*z`` with G = q^(n^2) (equivalently, the base-q digits of the
three matrices concatenated). Left vertex (a, e, c) is joined to right vertex
(b, f, d) when

    left  orientation:  ab + ef = c + d
    right orientation:  ba + ef = c + d

Two left vertices u, u' have common neighbours exactly when a linear system
in (b, f) determined by u - u' is solvable, so NN^T is a combination of
Cayley graphs on the additive group of triples. ``classify_differences``
labels every triple with the Cayley family containing it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sp

from .counting import LEFT_FAMILIES, RIGHT_FAMILIES, legal_ranks, nnt_coefficient
from .field import VectorSpace
from .ring import RingSpec, batch_rank

ORIENTATIONS = ("left", "right")
MATERIALIZE_CEILING = 2**22
EDGE_CEILING = 2**27
NNT_CEILING = 4096
_CHUNK = 1 << 15


def _check_orientation(orientation: str):
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")


def triple_space(ring: RingSpec) -> VectorSpace:
    return VectorSpace(ring.field, 3 * ring.n * ring.n)


def triple_encode(ring: RingSpec, x, y, z) -> np.ndarray:
    G = ring.card
    return np.asarray(x, dtype=np.int64) + G * np.asarray(y, dtype=np.int64) + G * G * np.asarray(z, dtype=np.int64)


def triple_decode(ring: RingSpec, idx) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    G = ring.card
    idx = np.asarray(idx, dtype=np.int64)
    return idx % G, (idx // G) % G, idx // (G * G)


def product_vertices(ring: RingSpec, X, Y, Z) -> np.ndarray:
    """Triple indices of X x Y x Z for three collections of matrix indices."""
    X, Y, Z = (np.asarray(list(s), dtype=np.int64) for s in (X, Y, Z))
    return triple_encode(ring, X[:, None, None], Y[None, :, None], Z[None, None, :]).ravel()


# -- classification of differences -------------------------------------------------


@dataclass(frozen=True)
class DifferenceLabels:
    """Family label of every triple s = u - u'.

    ``code[s]`` indexes ``keys`` (pairs (family, ranks)); the zero triple
    gets -1.
    """

    ring: RingSpec
    orientation: str
    keys: tuple
    code: np.ndarray = field(repr=False)

    def members(self, family: str, ranks) -> np.ndarray:
        ranks = (ranks,) if isinstance(ranks, int) else tuple(ranks)
        key = (family, ranks)
        if key not in self.keys:
            raise ValueError(f"{family} with ranks {ranks} is not a family of the {self.orientation} graph")
        return np.flatnonzero(self.code == self.keys.index(key)).astype(np.int64)


def _kron_system(F, a: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Coefficient matrix of (b, f) -> b a + e f on vectorised unknowns.

    Row (i, j), column (i', l) of the b-part carries delta(i, i') a[l, j];
    column (l, j') of the f-part carries e[i, l] delta(j, j').
    """
    N, n, _ = a.shape
    eye = np.eye(n, dtype=np.int64)
    mb = eye[None, :, None, :, None] * np.swapaxes(a, 1, 2)[:, None, :, None, :]
    mf = e[:, :, None, :, None] * eye[None, None, :, None, :]
    return np.concatenate([mb.reshape(N, n * n, n * n), mf.reshape(N, n * n, n * n)], axis=2)


def _classify_chunk(ring: RingSpec, orientation: str, s: np.ndarray):
    F, n = ring.field, ring.n
    x, y, z = triple_decode(ring, s)
    a, e, c = ring.decode_many(x), ring.decode_many(y), ring.decode_many(z)
    if orientation == "left":
        ae = np.concatenate([a, e], axis=2)
        k = batch_rank(F, ae)
        k_aug = batch_rank(F, np.concatenate([ae, c], axis=2))
        return (k,), k == k_aug
    k1 = ring.rank_of_index[y]
    k2 = ring.rank_of_index[x]
    M = _kron_system(F, a, e)
    rhs = c.reshape(len(s), n * n, 1)
    solvable = batch_rank(F, M) == batch_rank(F, np.concatenate([M, rhs], axis=2))
    return (k1, k2), solvable


@lru_cache(maxsize=16)
def classify_differences(ring: RingSpec, orientation: str) -> DifferenceLabels:
    _check_orientation(orientation)
    total = ring.card**3
    if total > MATERIALIZE_CEILING * 4:
        raise ValueError(f"{total} triples exceed the classification ceiling")
    families = LEFT_FAMILIES if orientation == "left" else RIGHT_FAMILIES
    keys = tuple((fam, r) for fam in families for r in legal_ranks(fam, ring.n))
    gfam, hfam = families
    lut = np.full((2,) + (ring.n + 1,) * (1 if orientation == "left" else 2), -1, dtype=np.int64)
    for i, (fam, r) in enumerate(keys):
        lut[(int(fam == gfam),) + r] = i
    code = np.empty(total, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        s = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        ranks, solvable = _classify_chunk(ring, orientation, s)
        code[start:start + len(s)] = lut[(solvable.astype(np.int64),) + ranks]
    code[0] = -1
    if (code[1:] < 0).any():
        raise AssertionError("a nonzero difference fell outside every family")
    code.setflags(write=False)
    return DifferenceLabels(ring, orientation, keys, code)


@dataclass(frozen=True)
class ConnectionSet:
    """S with u ~ v iff u - v in S, on the group of matrix triples."""

    ring: RingSpec
    family: str
    ranks: tuple[int, ...]
    members: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def group(self) -> VectorSpace:
        return triple_space(self.ring)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.ring.card**3, dtype=bool)
        m[self.members] = True
        return m

    def is_symmetric(self) -> bool:
        neg = np.sort(self.group.neg(self.members))
        return bool(np.array_equal(neg, self.members))

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency of the Cayley graph."""
        total = self.ring.card**3
        if total > NNT_CEILING:
            raise ValueError("Cayley graph too large to materialise densely")
        V = self.group
        idx = np.arange(total, dtype=np.int64)
        diff = V.sub(idx[:, None], idx[None, :])
        return self.mask()[diff].astype(np.int64)


def build_connection_set(family: str, ring: RingSpec, ranks) -> ConnectionSet:
    orientation = "left" if family in LEFT_FAMILIES else "right"
    if family not in LEFT_FAMILIES + RIGHT_FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    labels = classify_differences(ring, orientation)
    ranks = (ranks,) if isinstance(ranks, int) else tuple(int(r) for r in ranks)
    members = labels.members(family, ranks)
    members.setflags(write=False)
    return ConnectionSet(ring, family, ranks, members)


def connection_sets(ring: RingSpec, orientation: str) -> list[ConnectionSet]:
    families = LEFT_FAMILIES if orientation == "left" else RIGHT_FAMILIES
    return [build_connection_set(fam, ring, r) for fam in families for r in legal_ranks(fam, ring.n)]


# -- the bipartite graphs --------------------------------------------------------------


class BipartiteGraph:
    """The sum-product graph of one orientation over M_n(F_q).

    The edge rule is always available as a predicate; ``neighbors`` (the
    biadjacency as a |U| x deg array of right-vertex indices, row u listing
    (b, f, d) in increasing b + G*f order) is built on first access.
    """

    def __init__(self, ring: RingSpec, orientation: str = "left"):
        _check_orientation(orientation)
        self.ring = ring
        self.orientation = orientation

    def __repr__(self):
        return f"BipartiteGraph({self.ring!r}, {self.orientation})"

    @property
    def side_size(self) -> int:
        return self.ring.card**3

    @property
    def degree(self) -> int:
        return self.ring.card**2

    @property
    def name(self) -> str:
        return f"{self.orientation}:n={self.ring.n},q={self.ring.q}"

    def is_edge(self, u, v) -> np.ndarray:
        ring = self.ring
        a, e, c = triple_decode(ring, u)
        b, f, d = triple_decode(ring, v)
        first = ring.mul_idx(a, b) if self.orientation == "left" else ring.mul_idx(b, a)
        lhs = ring.add_idx(first, ring.mul_idx(e, f))
        return lhs == ring.add_idx(c, d)

    def neighbors_of(self, u: int) -> np.ndarray:
        ring = self.ring
        G = ring.card
        a, e, c = (int(t) for t in triple_decode(ring, u))
        bf = np.arange(G * G, dtype=np.int64)
        b, f = bf % G, bf // G
        first = ring.mul_idx(np.full_like(b, a), b) if self.orientation == "left" else ring.mul_idx(b, np.full_like(b, a))
        s = ring.add_idx(first, ring.mul_idx(np.full_like(f, e), f))
        d = ring.sub_idx(s, np.full_like(s, c))
        return triple_encode(ring, b, f, d)

    @cached_property
    def neighbors(self) -> np.ndarray:
        ring = self.ring
        if self.side_size > MATERIALIZE_CEILING or self.side_size * self.degree > EDGE_CEILING:
            raise ValueError(f"{self!r} is above the materialisation ceiling")
        G = ring.card
        idx = np.arange(G, dtype=np.int64)
        mul = ring.mul_table if ring._tabulate else ring.mul_idx(idx[:, None], idx[None, :])
        add = ring.add_table if ring._tabulate else ring.add_idx(idx[:, None], idx[None, :])
        sub = add[:, ring.neg_idx(idx)]
        first = mul if self.orientation == "left" else mul.T  # first[a, b]
        # S[e, a, f, b] = first(a, b) + e f
        S = add[first[None, :, None, :], mul[:, None, :, None]]
        D = sub[S[None], idx[:, None, None, None, None]]  # D[c, e, a, f, b]
        bf = (idx[None, :] + G * idx[:, None])  # [f, b] -> b + G f
        V = bf[None, None, None] + G * G * D
        nbrs = V.reshape(self.side_size, self.degree)
        self._check_biregular(nbrs)
        nbrs.setflags(write=False)
        return nbrs

    def _check_biregular(self, nbrs: np.ndarray):
        if nbrs.shape != (self.side_size, self.degree):
            raise AssertionError("left side is not regular")
        right_deg = np.bincount(nbrs.ravel(), minlength=self.side_size)
        if not np.all(right_deg == self.degree):
            raise AssertionError("right side is not regular")
        srt = np.sort(nbrs, axis=1)
        if np.any(srt[:, 1:] == srt[:, :-1]):
            raise AssertionError("repeated neighbour")

    @property
    def edge_count(self) -> int:
        return self.side_size * self.degree

    def biadjacency(self) -> sp.csr_matrix:
        nbrs = self.neighbors
        rows = np.repeat(np.arange(self.side_size, dtype=np.int64), self.degree)
        data = np.ones(nbrs.size, dtype=np.int64)
        return sp.csr_matrix((data, (rows, nbrs.ravel())), shape=(self.side_size, self.side_size))

    def nnt(self) -> np.ndarray:
        """Exact integer NN^T: entry (u, u') counts common neighbours."""
        if self.side_size > NNT_CEILING:
            raise ValueError("NN^T too large to materialise densely")
        N = self.biadjacency()
        return np.asarray((N @ N.T).toarray(), dtype=np.int64)

    def adjacency(self) -> np.ndarray:
        """Full adjacency [[0, N], [N^T, 0]] on U followed by V."""
        if self.side_size > NNT_CEILING // 2:
            raise ValueError("adjacency too large to materialise densely")
        N = self.biadjacency().toarray().astype(np.int64)
        Z = np.zeros_like(N)
        return np.block([[Z, N], [N.T, Z]])

    def edge_count_between(self, X, Y) -> int:
        """e(X, Y) for X a set of left vertices and Y a set of right vertices."""
        X = _as_vertex_indices(X, self.side_size)
        ymask = np.zeros(self.side_size, dtype=bool)
        ymask[_as_vertex_indices(Y, self.side_size)] = True
        if X.size == 0 or not ymask.any():
            return 0
        if self.side_size <= MATERIALIZE_CEILING and self.side_size * self.degree <= EDGE_CEILING:
            return int(ymask[self.neighbors[X]].sum())
        return int(sum(ymask[self.neighbors_of(u)].sum() for u in X))

    def export_edge_list(self, path) -> int:
        """Write one "u v" line per edge (TripleIndex decimals). Returns the edge count."""
        nbrs = self.neighbors
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            for u in range(self.side_size):
                fh.write("".join(f"{u} {v}\n" for v in nbrs[u].tolist()))
        return nbrs.size


def _as_vertex_indices(X, size: int) -> np.ndarray:
    X = np.asarray(X)
    if X.dtype == bool:
        if X.shape != (size,):
            raise ValueError("vertex mask has the wrong length")
        return np.flatnonzero(X).astype(np.int64)
    X = np.unique(X.astype(np.int64).ravel())
    if X.size and (X[0] < 0 or X[-1] >= size):
        raise ValueError("vertex index out of range")
    return X


def build_bipartite(ring: RingSpec, orientation: str = "left", materialize: bool = True) -> BipartiteGraph:
    g = BipartiteGraph(ring, orientation)
    if materialize:
        g.neighbors  # noqa: B018 - builds and checks biregularity
    return g


# -- the NN^T identity ----------------------------------------------------------------------


def nnt_row(ring: RingSpec, orientation: str) -> np.ndarray:
    """NN^T[u, u'] as a function of the difference u - u', from the connection sets."""
    n, q = ring.n, ring.q
    qn2 = q ** (n * n)
    total = ring.card**3
    row = np.full(total, qn2, dtype=np.int64)
    for S in connection_sets(ring, orientation):
        row[S.members] += nnt_coefficient(S.family, n, q, S.ranks)
    row[0] = q ** (2 * n * n)
    return row


@dataclass(frozen=True)
class NNTReport:
    orientation: str
    n: int
    q: int
    max_discrepancy: int
    coefficients: dict

    @property
    def equal(self) -> bool:
        return self.max_discrepancy == 0


def verify_nnt_decomposition(ring: RingSpec, orientation: str = "left") -> NNTReport:
    """Compare NN^T with q^(n^2) J + (deg - q^(n^2)) I + sum_f coeff_f * Adj(S_f) entrywise."""
    g = build_bipartite(ring, orientation)
    nnt = g.nnt()
    n, q = ring.n, ring.q
    qn2 = q ** (n * n)
    total = g.side_size
    coeff = np.zeros(total, dtype=np.int64)
    coefficients = {}
    for S in connection_sets(ring, orientation):
        c = nnt_coefficient(S.family, n, q, S.ranks)
        coeff[S.members] = c
        coefficients[f"{S.family}{list(S.ranks)}"] = c
    V = triple_space(ring)
    idx = np.arange(total, dtype=np.int64)
    worst = 0
    for start in range(0, total, 256):
        rows = idx[start:start + 256]
        diff = V.sub(rows[:, None], idx[None, :])
        assembled = qn2 + coeff[diff]
        assembled[diff == 0] += g.degree - qn2
        worst = max(worst, int(np.abs(assembled - nnt[rows]).max()))
    return NNTReport(orientation, n, q, worst, coefficients)
