"""Finite fields F_q, q = p^m, in a fixed polynomial basis.

An element is an integer ``rep`` in [0, q). Its base-p digits are the
coefficients of a polynomial of degree < m, reduced modulo the
lexicographically least monic irreducible polynomial of degree m over F_p.
For m = 1 this is plain arithmetic mod p.

All per-element operations have a scalar form (``FieldSpec.add`` etc.) and a
table form (``add_table`` etc.) used by the vectorised matrix code.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

FIELD_CEILING = 64


class DivisionByZero(ZeroDivisionError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


# -- polynomials over F_p as coefficient tuples, lowest degree first --------


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(a, b, p):
    """Remainder of a modulo b over F_p (b nonzero)."""
    a = _poly_trim(a)
    b = _poly_trim(b)
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bi) % p
        a = _poly_trim(a)
    return a


def _monic_polys(p: int, d: int):
    """Monic degree-d polynomials in lexicographic order of lower coefficients."""
    for low in range(p**d):
        coeffs = [(low // p**i) % p for i in range(d)]
        yield tuple(coeffs) + (1,)


def is_irreducible(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(_poly_trim(poly)) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_mod(poly, g, p):
                return False
    return True


def least_irreducible(p: int, m: int) -> tuple[int, ...]:
    for poly in _monic_polys(p, m):
        if is_irreducible(poly, p):
            return poly
    raise AssertionError(f"no irreducible polynomial of degree {m} over F_{p}")


@dataclass(frozen=True)
class FieldSpec:
    """The field F_q with q = p**m.

    ``modulus`` lists the coefficients of the defining polynomial, lowest
    degree first, including the leading 1. It is ``(0, 1)`` (the polynomial
    x) for prime fields and is not used there.
    """

    p: int
    m: int
    modulus: tuple[int, ...] = field(default=(0, 1))

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        if self.m < 1:
            raise ValueError("extension degree must be >= 1")
        if self.p**self.m > FIELD_CEILING:
            raise ValueError(f"q = {self.p}^{self.m} exceeds the ceiling {FIELD_CEILING}")
        if self.m > 1:
            if len(self.modulus) != self.m + 1 or self.modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            if not is_irreducible(self.modulus, self.p):
                raise ValueError(f"modulus {self.modulus} is reducible over F_{self.p}")

    @property
    def q(self) -> int:
        return self.p**self.m

    def __repr__(self):
        if self.m == 1:
            return f"F_{self.p}"
        return f"F_{self.q}[{poly_str(self.modulus)}]"

    # -- scalar arithmetic ---------------------------------------------------

    def coords(self, x: int) -> list[int]:
        return [(x // self.p**i) % self.p for i in range(self.m)]

    def from_coords(self, c) -> int:
        return sum(int(ci) * self.p**i for i, ci in enumerate(c))

    def _check(self, x: int) -> int:
        if not 0 <= x < self.q:
            raise ValueError(f"{x} is not an element of {self!r}")
        return x

    def add(self, x: int, y: int) -> int:
        x, y = self._check(x), self._check(y)
        if self.m == 1:
            return (x + y) % self.p
        return self.from_coords((a + b) % self.p for a, b in zip(self.coords(x), self.coords(y)))

    def neg(self, x: int) -> int:
        x = self._check(x)
        if self.m == 1:
            return (-x) % self.p
        return self.from_coords((-a) % self.p for a in self.coords(x))

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        x, y = self._check(x), self._check(y)
        if self.m == 1:
            return (x * y) % self.p
        a, b = self.coords(x), self.coords(y)
        prod = [0] * (2 * self.m - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] = (prod[i + j] + ai * bj) % self.p
        return self.from_coords(_poly_mod(prod, self.modulus, self.p))

    def pow(self, x: int, e: int) -> int:
        result, base = 1, x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, x: int) -> int:
        if self._check(x) == 0:
            raise DivisionByZero(f"0 has no inverse in {self!r}")
        return self.pow(x, self.q - 2)

    def trace(self, x: int) -> int:
        """Absolute trace x + x^p + ... + x^(p^(m-1)); lands in F_p."""
        total, y = 0, x
        for _ in range(self.m):
            total = self.add(total, y)
            y = self.pow(y, self.p)
        assert total < self.p, "trace left the prime subfield"
        return total

    def character(self, x: int) -> complex:
        """Canonical additive character exp(2*pi*i*Tr(x)/p)."""
        return cmath.exp(2j * cmath.pi * self.trace(x) / self.p)

    # -- tables --------------------------------------------------------------

    def elements(self) -> range:
        return range(self.q)

    @cached_property
    def add_table(self) -> np.ndarray:
        return self._table(self.add)

    @cached_property
    def mul_table(self) -> np.ndarray:
        return self._table(self.mul)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return self._frozen(np.array([self.neg(x) for x in self.elements()], dtype=np.int64))

    @cached_property
    def sub_table(self) -> np.ndarray:
        return self._frozen(self.add_table[:, self.neg_table])

    @cached_property
    def inv_table(self) -> np.ndarray:
        """Inverse table with inv_table[0] = 0 as a sentinel."""
        inv = [0] + [self.inv(x) for x in range(1, self.q)]
        return self._frozen(np.array(inv, dtype=np.int64))

    @cached_property
    def trace_table(self) -> np.ndarray:
        return self._frozen(np.array([self.trace(x) for x in self.elements()], dtype=np.int64))

    @cached_property
    def trace_dual(self) -> np.ndarray:
        """Map y to the coordinate functional x -> Tr(y*x).

        ``trace_dual[y]`` is the element whose coordinate vector k satisfies
        Tr(y*x) = k . coords(x) (mod p) for every x. This lets a DFT over
        F_p^m evaluate the characters x -> psi(y*x).
        """
        basis_tr = [[self.trace(self.mul(self.p**i, self.p**j)) for j in range(self.m)]
                    for i in range(self.m)]
        dual = []
        for y in self.elements():
            c = self.coords(y)
            k = [sum(c[i] * basis_tr[i][j] for i in range(self.m)) % self.p for j in range(self.m)]
            dual.append(self.from_coords(k))
        return self._frozen(np.array(dual, dtype=np.int64))

    def _table(self, op) -> np.ndarray:
        q = self.q
        t = np.array([[op(x, y) for y in range(q)] for x in range(q)], dtype=np.int64)
        return self._frozen(t)

    @staticmethod
    def _frozen(a: np.ndarray) -> np.ndarray:
        a.setflags(write=False)
        return a


def poly_str(coeffs) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if c == 1 and mono:
            terms.append(mono)
        else:
            terms.append(f"{c}{mono}")
    return "+".join(terms) or "0"


def make_field(p: int, m: int = 1) -> FieldSpec:
    """Build F_{p^m} with the lexicographically least irreducible modulus."""
    if not is_prime(p):
        raise ValueError(f"characteristic {p} is not prime")
    if m < 1:
        raise ValueError("extension degree must be >= 1")
    if p**m > FIELD_CEILING:
        raise ValueError(f"q = {p}^{m} exceeds the ceiling {FIELD_CEILING}")
    if m == 1:
        return FieldSpec(p, 1)
    return FieldSpec(p, m, least_irreducible(p, m))


def field_of_order(q: int) -> FieldSpec:
    """F_q for a prime power q."""
    for p in range(2, q + 1):
        if q % p == 0:
            m, r = 0, q
            while r % p == 0:
                r //= p
                m += 1
            if r != 1:
                raise ValueError(f"{q} is not a prime power")
            return make_field(p, m)
    raise ValueError(f"{q} is not a prime power")


def ff_arith(spec: FieldSpec, op: str, x: int, y: int) -> int:
    spec._check(x)
    spec._check(y)
    try:
        fn = {"add": spec.add, "sub": spec.sub, "mul": spec.mul}[op]
    except KeyError:
        raise ValueError(f"unknown field operation {op!r}") from None
    return fn(x, y)


def ff_inv(spec: FieldSpec, x: int) -> int:
    return spec.inv(spec._check(x))


def ff_trace_character(spec: FieldSpec, x: int) -> complex:
    return spec.character(spec._check(x))


class VectorSpace:
    """The additive group F_q^dim with elements encoded as base-q integers.

    Index i has digit j equal to (i // q**j) % q. Matrices (dim = n*n,
    row-major) and matrix triples (dim = 3*n*n) both live here.
    """

    def __init__(self, spec: FieldSpec, dim: int):
        self.field = spec
        self.dim = dim
        self.size = spec.q**dim
        self._powers = spec.q ** np.arange(dim, dtype=np.int64)

    def __repr__(self):
        return f"VectorSpace({self.field!r}, dim={self.dim})"

    def digits(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[..., None] // self._powers) % self.field.q

    def index(self, digits) -> np.ndarray:
        digits = np.asarray(digits, dtype=np.int64)
        return (digits * self._powers).sum(axis=-1)

    def add(self, x, y) -> np.ndarray:
        return self.index(self.field.add_table[self.digits(x), self.digits(y)])

    def sub(self, x, y) -> np.ndarray:
        return self.index(self.field.sub_table[self.digits(x), self.digits(y)])

    def neg(self, x) -> np.ndarray:
        return self.index(self.field.neg_table[self.digits(x)])

    def pairing(self, y, x) -> np.ndarray:
        """Tr(<y, x>) in F_p with <.,.> the coordinatewise dot product over F_q."""
        F = self.field
        prods = F.mul_table[self.digits(y), self.digits(x)]
        acc = prods[..., 0]
        for j in range(1, self.dim):
            acc = F.add_table[acc, prods[..., j]]
        return F.trace_table[acc]

    def character(self, y, x) -> np.ndarray:
        return np.exp(2j * np.pi * self.pairing(y, x) / self.field.p)

    def fourier(self, weights: np.ndarray) -> np.ndarray:
        """All character sums sum_x w(x) chi_y(x), indexed by y.

        The index space is F_p^(m*dim) in base-p digits, so a DFT over that
        box evaluates every coordinate functional; ``trace_dual`` converts
        the functional back to the character label y.
        """
        F = self.field
        w = np.asarray(weights)
        if w.shape != (self.size,):
            raise ValueError("weights must cover the whole group")
        box = w.reshape((F.p,) * (F.m * self.dim))
        spectrum = np.fft.ifftn(box).ravel() * self.size
        y = np.arange(self.size, dtype=np.int64)
        k = self.index(F.trace_dual[self.digits(y)])
        return spectrum[k]
