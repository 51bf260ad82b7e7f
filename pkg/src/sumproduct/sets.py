"""Subsets of M_n(F_q) and the counting quantities built from them.

A ``MatrixSet`` is a packed little-endian bitset over MatrixIndex. Every
counter works through multiplicity tables: dense int arrays ``m`` of length
q^(n^2) with ``m[s]`` the number of representations of ``s``. Counting the
solutions of an equation ``L = R`` is then ``sum_s m_L(s) * m_R(s)``, which
never touches the full product of the set sizes.

Random sets use numpy's Philox generator, a counter-based PRNG: the key is
``(stream << 64) | seed`` and each matrix is kept when its uniform draw is
below the density, in increasing index order.
"""

from __future__ import annotations

import json

import numpy as np

from .field import make_field
from .ring import RingSpec, mat_inv_det

# float64 accumulation is exact below this; beyond it we fall back to object ints
_EXACT_FLOAT = 2**53
_EXACT_INT64 = 2**62
_PAIR_CHUNK = 1 << 22


class SingularMember(ValueError):
    pass


class MatrixSet:
    """Immutable subset of M_n(F_q)."""

    __slots__ = ("spec", "_bits", "size")

    def __init__(self, spec: RingSpec, bits: np.ndarray):
        expected = (spec.card + 7) // 8
        if bits.dtype != np.uint8 or bits.shape != (expected,):
            raise ValueError("bitset has the wrong shape for this ring")
        bits.setflags(write=False)
        self.spec = spec
        self._bits = bits
        self.size = int(np.unpackbits(bits, bitorder="little").sum())

    @classmethod
    def from_mask(cls, spec: RingSpec, mask) -> "MatrixSet":
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (spec.card,):
            raise ValueError("mask length must equal q^(n^2)")
        return cls(spec, np.packbits(mask, bitorder="little"))

    @classmethod
    def from_indices(cls, spec: RingSpec, indices) -> "MatrixSet":
        idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                         dtype=np.int64).reshape(-1)
        if idx.size and (idx.min() < 0 or idx.max() >= spec.card):
            raise ValueError("matrix index out of range")
        mask = np.zeros(spec.card, dtype=bool)
        mask[idx] = True
        return cls.from_mask(spec, mask)

    @classmethod
    def from_matrices(cls, spec: RingSpec, mats) -> "MatrixSet":
        return cls.from_indices(spec, [spec.encode(m) for m in mats])

    def mask(self) -> np.ndarray:
        return np.unpackbits(self._bits, count=self.spec.card, bitorder="little").astype(bool)

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask()).astype(np.int64)

    def multiplicity(self) -> np.ndarray:
        return self.mask().astype(np.int64)

    def __contains__(self, idx) -> bool:
        idx = int(idx)
        if not 0 <= idx < self.spec.card:
            return False
        return bool((self._bits[idx >> 3] >> (idx & 7)) & 1)

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(self.indices().tolist())

    def __eq__(self, other):
        if not isinstance(other, MatrixSet):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash((self.spec, self._bits.tobytes()))

    def __repr__(self):
        return f"MatrixSet({self.spec!r}, size={self.size})"

    def to_json(self) -> dict:
        F = self.spec.field
        return {
            "spec": {"n": self.spec.n, "p": F.p, "m": F.m, "q": F.q, "modulus": list(F.modulus)},
            "encoding": "base-q row-major",
            "members": self.indices().tolist(),
        }

    @classmethod
    def from_json(cls, obj) -> "MatrixSet":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if obj.get("encoding") != "base-q row-major":
            raise ValueError(f"unsupported encoding {obj.get('encoding')!r}")
        s = obj["spec"]
        spec = RingSpec(make_field(s["p"], s["m"]), s["n"])
        if list(spec.field.modulus) != list(s.get("modulus", spec.field.modulus)):
            raise ValueError("set was serialised with a different field modulus")
        return cls.from_indices(spec, obj["members"])


# -- construction ------------------------------------------------------------


def philox_uniform(seed: int, stream: int, count: int) -> np.ndarray:
    if not 0 <= seed < 2**64 or not 0 <= stream < 2**64:
        raise ValueError("seed and stream must be 64-bit unsigned integers")
    gen = np.random.Generator(np.random.Philox(key=(stream << 64) | seed))
    return gen.random(count)


def set_build(spec: RingSpec, source: str, members=None, density: float = 1.0,
              seed: int = 0, stream: int = 0, within: str = "all") -> MatrixSet:
    """Build a set from ``source`` in {list, all, gl, zero, random}.

    ``random`` keeps each matrix of the universe ``within`` (all/gl/zero)
    independently with probability ``density``.
    """
    if source == "list":
        return MatrixSet.from_indices(spec, members if members is not None else [])
    if source in ("all", "gl", "zero"):
        return MatrixSet.from_mask(spec, _universe(spec, source))
    if source == "random":
        if not 0 < density <= 1:
            raise ValueError("density must lie in (0, 1]")
        u = philox_uniform(seed, stream, spec.card)
        return MatrixSet.from_mask(spec, _universe(spec, within) & (u < density))
    raise ValueError(f"unknown set source {source!r}")


def _universe(spec: RingSpec, which: str) -> np.ndarray:
    if which == "all":
        return np.ones(spec.card, dtype=bool)
    if which == "gl":
        return spec.rank_of_index == spec.n
    if which == "zero":
        return spec.rank_of_index < spec.n
    raise ValueError(f"unknown universe {which!r}")


def _same_spec(*sets: MatrixSet) -> RingSpec:
    spec = sets[0].spec
    for s in sets[1:]:
        if s.spec != spec:
            raise ValueError(f"sets live in different rings: {spec!r} vs {s.spec!r}")
    return spec


# -- multiplicity tables -----------------------------------------------------


def image_counts(spec: RingSpec, op: str, mx: np.ndarray, my: np.ndarray) -> np.ndarray:
    """Multiplicity table of x (op) y weighted by mx[x] * my[y].

    ``op`` is ``"add"`` or ``"mul"``. Exact for any weights: float64
    accumulation is used only while every partial sum stays below 2^53.
    """
    fn = {"add": spec.add_idx, "mul": spec.mul_idx}[op]
    xs = np.flatnonzero(mx)
    ys = np.flatnonzero(my)
    G = spec.card
    total = int(np.sum(mx[xs], dtype=object)) * int(np.sum(my[ys], dtype=object)) if xs.size and ys.size else 0
    if total == 0:
        return np.zeros(G, dtype=np.int64)
    wy = my[ys]
    if total < _EXACT_FLOAT:
        out = np.zeros(G, dtype=np.float64)
        step = max(1, _PAIR_CHUNK // len(ys))
        for i in range(0, len(xs), step):
            xb = xs[i:i + step]
            img = fn(xb[:, None], ys[None, :])
            w = mx[xb][:, None].astype(np.float64) * wy[None, :].astype(np.float64)
            out += np.bincount(img.ravel(), weights=w.ravel(), minlength=G)
        return out.astype(np.int64)
    out = np.zeros(G, dtype=object)
    wy_obj = wy.astype(object)
    for x in xs:
        img = fn(np.full(len(ys), x), ys)
        np.add.at(out, img, wy_obj * int(mx[x]))
    return out if total >= _EXACT_INT64 else out.astype(np.int64)


def exact_dot(a: np.ndarray, b: np.ndarray) -> int:
    """sum a*b as a Python int, without int64 overflow."""
    bound = int(np.max(a, initial=0)) * int(np.max(b, initial=0)) * len(a)
    if a.dtype != object and b.dtype != object and bound < _EXACT_INT64:
        return int(np.dot(a.astype(np.int64), b.astype(np.int64)))
    return int(np.dot(a.astype(object), b.astype(object)))


def sum_counts(X: MatrixSet, Y: MatrixSet) -> np.ndarray:
    """t(s) = #{(x, y) : x + y = s}."""
    spec = _same_spec(X, Y)
    return image_counts(spec, "add", X.multiplicity(), Y.multiplicity())


def product_counts(X: MatrixSet, Y: MatrixSet) -> np.ndarray:
    spec = _same_spec(X, Y)
    return image_counts(spec, "mul", X.multiplicity(), Y.multiplicity())


def _support(spec: RingSpec, counts: np.ndarray) -> MatrixSet:
    return MatrixSet.from_mask(spec, np.asarray(counts != 0, dtype=bool))


# -- set operations ----------------------------------------------------------


def set_combine(op: str, X: MatrixSet, Y: MatrixSet | None = None) -> MatrixSet:
    """sum, product, negate or invert (the last two ignore Y)."""
    spec = X.spec
    if op == "sum":
        return _support(spec, sum_counts(X, Y))
    if op == "product":
        return _support(spec, product_counts(X, Y))
    if op == "negate":
        return MatrixSet.from_indices(spec, spec.neg_idx(X.indices()))
    if op == "invert":
        out = []
        for idx in X.indices():
            det, inv = mat_inv_det(spec, spec.decode(idx))
            if inv is None:
                raise SingularMember(f"matrix index {idx} is singular")
            out.append(spec.encode(inv))
        return MatrixSet.from_indices(spec, out)
    raise ValueError(f"unknown set operation {op!r}")


def compose_a_plus_bc(A: MatrixSet, B: MatrixSet, C: MatrixSet) -> tuple[MatrixSet, np.ndarray]:
    """A + BC and its representation counts t(lambda) = #{a + bc = lambda}."""
    spec = _same_spec(A, B, C)
    t = image_counts(spec, "add", A.multiplicity(), product_counts(B, C))
    return _support(spec, t), t


def compose_apb_times_c(A: MatrixSet, B: MatrixSet, C: MatrixSet) -> tuple[MatrixSet, np.ndarray]:
    """(A + B)C with t(lambda) = #{(a, b, c) : (a + b)c = lambda}."""
    spec = _same_spec(A, B, C)
    t = image_counts(spec, "mul", sum_counts(A, B), C.multiplicity())
    return _support(spec, t), t


# -- solution counters -------------------------------------------------------


def count_N6(A, B, C, D, E, F) -> int:
    """Number of (a, b, c, d, e, f) in A x B x C x D x E x F with ab + ef = c + d."""
    spec = _same_spec(A, B, C, D, E, F)
    lhs = image_counts(spec, "add", product_counts(A, B), product_counts(E, F))
    rhs = sum_counts(C, D)
    return exact_dot(lhs, rhs)


def additive_energy(A: MatrixSet, B: MatrixSet) -> int:
    """E_+(A, B) = #{(a1, a2, b1, b2) : a1 + b1 = a2 + b2}."""
    t = sum_counts(A, B)
    return exact_dot(t, t)


def count_a_plus_b_eq_cd(A, B, C, D) -> int:
    return exact_dot(sum_counts(A, B), product_counts(C, D))


def collision_count_apb_times_c(A, B, C) -> int:
    """#{(a1, b1, c1, a2, b2, c2) : (a1 + b1)c1 = (a2 + b2)c2}."""
    _, t = compose_apb_times_c(A, B, C)
    return exact_dot(t, t)
