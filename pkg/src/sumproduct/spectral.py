"""Eigenvalues of the sum-product graphs.

Two independent routes to the third eigenvalue:

* dense: materialise the exact integer NN^T and diagonalise it with the
  in-repo Jacobi solver;
* character: NN^T commutes with translations of the triple group, so each
  additive character is an eigenvector and its eigenvalue is assembled
  from the character sums of the connection sets.

lambda_3 is sqrt of the second-largest eigenvalue of NN^T.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .counting import nnt_coefficient
from .graphs import BipartiteGraph, ConnectionSet, connection_sets

DENSE_AUTO_LIMIT = 400
DENSE_CEILING = 4096


# -- Jacobi eigensolver ------------------------------------------------------------


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint index pairs per round; every pair appears once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            P, Q = zip(*pairs)
            rounds.append((np.array(P), np.array(Q)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(M, tol: float = 1e-15, max_sweeps: int = 80) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Rotations within a round act on disjoint index pairs, so a whole round
    is applied at once. Returns ``(w, V)`` with w ascending and M V = V diag(w).
    """
    A = np.array(M, dtype=np.float64, copy=True)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    V = np.eye(n)
    if n <= 1:
        return np.diag(A).copy(), V
    norm = np.linalg.norm(A)
    if norm == 0:
        return np.zeros(n), V
    rounds = _round_robin(n)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        # taken entrywise: ||A||^2 - ||diag||^2 cancels catastrophically
        off = np.linalg.norm(A[offdiag])
        if off <= tol * norm:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            theta = (A[Q, Q] - A[P, P]) / (2.0 * apq)
            big = np.abs(theta) > 1e150
            with np.errstate(over="ignore"):
                t = np.where(big, 0.5 / np.where(big, theta, 1.0),
                             np.sign(theta + (theta == 0)) / (np.abs(theta) + np.sqrt(theta * theta + 1.0)))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            Ap, Aq = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = c[:, None] * Ap - s[:, None] * Aq
            A[Q, :] = s[:, None] * Ap + c[:, None] * Aq
            Ap, Aq = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = Ap * c - Aq * s
            A[:, Q] = Ap * s + Aq * c
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            Vp, Vq = V[:, P].copy(), V[:, Q].copy()
            V[:, P] = Vp * c - Vq * s
            V[:, Q] = Vp * s + Vq * c
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def _check_symmetric(M) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if M.shape[0] > DENSE_CEILING:
        raise ValueError(f"dimension {M.shape[0]} above the dense ceiling {DENSE_CEILING}")
    if not np.array_equal(M, M.T):
        raise ValueError("matrix is not symmetric")
    return M


def dense_eigh(M) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs sorted by decreasing eigenvalue."""
    M = _check_symmetric(M)
    w, V = jacobi_eigh(M)
    return w[::-1].copy(), V[:, ::-1].copy()


def dense_spectrum(M) -> np.ndarray:
    return dense_eigh(M)[0]


# -- Cayley spectra ----------------------------------------------------------------


def character_sum(S: ConnectionSet, y) -> complex:
    """sum_{s in S} chi_y(s), evaluated directly."""
    vals = S.group.character(np.full(S.size, int(y)), S.members)
    return complex(vals.sum())


def cayley_spectrum(S: ConnectionSet) -> np.ndarray:
    """Eigenvalue of the Cayley graph on every character y (indexed by y)."""
    if not S.is_symmetric():
        raise ValueError("connection set is not symmetric")
    spec = S.group.fourier(S.mask().astype(np.float64))
    if np.abs(spec.imag).max(initial=0.0) > 1e-9 * max(1, S.size):
        raise AssertionError("symmetric connection set produced a complex eigenvalue")
    return spec.real


def nnt_character_spectrum(graph: BipartiteGraph) -> np.ndarray:
    """NN^T eigenvalue on every character, assembled from the connection sets."""
    ring = graph.ring
    n, q = ring.n, ring.q
    qn2 = q ** (n * n)
    eig = np.full(graph.side_size, float(graph.degree - qn2))
    eig[0] += qn2 * graph.side_size
    for S in connection_sets(ring, graph.orientation):
        coeff = nnt_coefficient(S.family, n, q, S.ranks)
        if coeff:
            eig += coeff * cayley_spectrum(S)
    return eig


# -- third eigenvalue ------------------------------------------------------------------


def bound_exponent(n: int, orientation: str) -> float:
    if orientation == "left":
        return 2 * n * n - (n + 1) / 2
    return 2 * n * n - 1


@dataclass(frozen=True)
class SpectralReport:
    graph: str
    method: str
    lambda1: float
    lambda3: float
    bound_exponent: float
    bound: float
    measured_constant: float

    def to_json(self) -> dict:
        return asdict(self)


def third_eigenvalue(graph: BipartiteGraph, method: str = "auto") -> SpectralReport:
    if method == "auto":
        method = "dense" if graph.side_size <= DENSE_AUTO_LIMIT else "character"
    if method == "dense":
        w, _ = dense_eigh(graph.nnt())
        top, second = w[0], w[1]
    elif method == "character":
        eig = nnt_character_spectrum(graph)
        top = eig[0]
        rest = eig[1:]
        if rest.min(initial=0.0) < -1e-6 * top:
            raise AssertionError("assembled NN^T has a negative eigenvalue")
        second = rest.max(initial=0.0)
    else:
        raise ValueError(f"unknown method {method!r}")
    exp = bound_exponent(graph.ring.n, graph.orientation)
    bound = graph.ring.q**exp
    lam3 = math.sqrt(max(second, 0.0))
    return SpectralReport(
        graph=graph.name,
        method=method,
        lambda1=math.sqrt(top),
        lambda3=lam3,
        bound_exponent=exp,
        bound=bound,
        measured_constant=lam3 / bound,
    )


# -- expander mixing ---------------------------------------------------------------------


@dataclass(frozen=True)
class MixingReport:
    edges: int
    expected: float
    error: float
    allowance: float
    slack: float
    holds: bool


def mixing_check(graph: BipartiteGraph, X, Y, lambda3: float) -> MixingReport:
    """Check |e(X,Y) - deg/|V| |X||Y|| <= lambda3 sqrt(|X||Y|)."""
    X = np.unique(np.asarray(X, dtype=np.int64))
    Y = np.unique(np.asarray(Y, dtype=np.int64))
    e = graph.edge_count_between(X, Y)
    nx, ny = len(X), len(Y)
    expected = graph.degree * nx * ny / graph.side_size
    error = abs(e - expected)
    allowance = lambda3 * math.sqrt(nx * ny)
    holds = error <= allowance * (1 + 1e-12) + 1e-9
    return MixingReport(e, expected, error, allowance, allowance - error, holds)
