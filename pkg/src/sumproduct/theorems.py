"""Concrete instances of the sum-product inequalities, with measured constants.

Every inequality here hides a constant C(n). A trial computes the exact
left-hand side and the bound expression with C(n) = 1, and reports the
constant the instance needs:

* upper bounds  (LHS <~ bound):  constant = LHS / bound
* lower bounds  (LHS >~ bound):  constant = bound / LHS

so a constant <= budget always means "the inequality holds with C(n) =
budget". Each trial also checks the exact Cauchy-Schwarz steps that link
the quantity to a solution count, independently of any spectral bound.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np

from .field import make_field
from .graphs import BipartiteGraph, product_vertices, triple_encode
from .ring import RingSpec
from .sets import (
    MatrixSet,
    additive_energy,
    collision_count_apb_times_c,
    compose_a_plus_bc,
    compose_apb_times_c,
    count_a_plus_b_eq_cd,
    count_N6,
    set_build,
    set_combine,
)

GRAPH_BRIDGE_LIMIT = 2**15
CSV_COLUMNS = ["theorem", "n", "p", "m", "q", "density", "trial", "sizes", "lhs", "bound",
               "constant", "degenerate", "hypothesis_ok", "bridge_ok"]


@dataclass(frozen=True)
class SetRecipe:
    source: str = "all"
    density: float = 1.0
    seed: int = 0
    within: str = "all"
    members: tuple[int, ...] | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "SetRecipe":
        unknown = set(d) - {"source", "density", "seed", "within", "members"}
        if unknown:
            raise ValueError(f"unknown set recipe keys {sorted(unknown)}")
        members = d.get("members")
        return cls(
            source=d.get("source", "all"),
            density=float(d.get("density", 1.0)),
            seed=int(d.get("seed", 0)),
            within=d.get("within", "all"),
            members=tuple(members) if members is not None else None,
        )

    def build(self, ring: RingSpec, stream: int) -> MatrixSet:
        return set_build(ring, self.source, members=self.members, density=self.density,
                         seed=self.seed, stream=stream, within=self.within)


@dataclass(frozen=True)
class ExperimentConfig:
    theorem: str
    n: int = 1
    p: int = 2
    m: int = 1
    sets: dict = field(default_factory=dict)
    default: SetRecipe = SetRecipe()
    trials: int = 1
    budget: float = 10.0
    out: str | None = None

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ValueError(f"unknown theorem {self.theorem!r}; choose from {sorted(THEOREMS)}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        names = THEOREMS[self.theorem].set_names
        extra = set(self.sets) - set(names)
        if extra:
            raise ValueError(f"{self.theorem} takes sets {names}, got extra {sorted(extra)}")

    @property
    def ring(self) -> RingSpec:
        return RingSpec(make_field(self.p, self.m), self.n)

    def recipe(self, name: str) -> SetRecipe:
        if name in self.sets:
            return self.sets[name]
        r = self.default
        if name in THEOREMS[self.theorem].needs_gl and r.within == "all" and r.source != "list":
            r = replace(r, source="gl" if r.source == "all" else r.source, within="gl")
        return r

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {"theorem", "n", "p", "m", "sets", "default", "trials", "budget", "out"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        if "theorem" not in d:
            raise ValueError("config needs a 'theorem'")
        return cls(
            theorem=d["theorem"],
            n=int(d.get("n", 1)),
            p=int(d.get("p", 2)),
            m=int(d.get("m", 1)),
            sets={k: SetRecipe.from_dict(v) for k, v in d.get("sets", {}).items()},
            default=SetRecipe.from_dict(d.get("default", {})),
            trials=int(d.get("trials", 1)),
            budget=float(d.get("budget", 10.0)),
            out=d.get("out"),
        )

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class TrialResult:
    trial: int
    sizes: dict
    lhs: int
    bound: float
    constant: float | None
    degenerate: bool = False
    hypothesis_ok: bool = True
    bridge_ok: bool | None = None
    details: dict = field(default_factory=dict)


@dataclass
class TheoremReport:
    theorem: str
    n: int
    p: int
    m: int
    budget: float
    trials: list
    density: float | None = None

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def constants(self) -> list[float]:
        return [t.constant for t in self.trials if t.constant is not None and not t.degenerate]

    @property
    def min_constant(self):
        return min(self.constants, default=None)

    @property
    def max_constant(self):
        return max(self.constants, default=None)

    @property
    def median_constant(self):
        c = self.constants
        return statistics.median(c) if c else None

    @property
    def bridges_ok(self) -> bool:
        return all(t.bridge_ok is not False for t in self.trials)

    @property
    def passed(self) -> bool:
        return self.bridges_ok and all(c <= self.budget for c in self.constants)

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem, "n": self.n, "p": self.p, "m": self.m, "q": self.q,
            "budget": self.budget,
            "min_constant": self.min_constant,
            "median_constant": self.median_constant,
            "max_constant": self.max_constant,
            "passed": self.passed,
            "trials": [asdict(t) for t in self.trials],
        }

    def csv_rows(self) -> list[list]:
        rows = []
        for t in self.trials:
            sizes = ";".join(f"{k}={v}" for k, v in t.sizes.items())
            rows.append([self.theorem, self.n, self.p, self.m, self.q,
                         "" if self.density is None else repr(self.density), t.trial, sizes,
                         t.lhs, repr(t.bound), "" if t.constant is None else repr(t.constant),
                         int(t.degenerate), int(t.hypothesis_ok),
                         "" if t.bridge_ok is None else int(t.bridge_ok)])
        return rows


def write_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)


def csv_text(rows) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


# -- helpers ---------------------------------------------------------------------


def stream_id(theorem: str, trial: int, name: str) -> int:
    digest = hashlib.blake2b(f"{theorem}|{trial}|{name}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _ratio(num: float, den: float) -> float | None:
    if den == 0:
        return None
    return num / den


def _require_gl(ring: RingSpec, S: MatrixSet, name: str):
    ranks = ring.rank_of_index[S.indices()]
    if (ranks < ring.n).any():
        raise ValueError(f"set {name} must lie in GL_{ring.n}")


@lru_cache(maxsize=8)
def _graph(ring: RingSpec, orientation: str) -> BipartiteGraph | None:
    g = BipartiteGraph(ring, orientation)
    if g.side_size > GRAPH_BRIDGE_LIMIT:
        return None
    g.neighbors  # noqa: B018
    return g


# -- the theorem instances -------------------------------------------------------


def _trial_prop_n(ring, S, trial):
    A, B, C, D, E, F = (S[k] for k in "ABCDEF")
    n, q = ring.n, ring.q
    prod = A.size * B.size * C.size * D.size * E.size * F.size
    N = count_N6(A, B, C, D, E, F)
    t1 = prod / q ** (n * n)
    t2 = q ** (2 * n * n - (n + 1) / 2) * math.sqrt(prod)
    details = {"term1": t1, "term2": t2}
    bridge = None
    g = _graph(ring, "left")
    if g is not None and prod:
        X = product_vertices(ring, A, E, C)
        Y = product_vertices(ring, B, F, D)
        e = g.edge_count_between(X, Y)
        details["edge_count"] = e
        bridge = e == N
    return TrialResult(trial, _sizes(S), N, t1 + t2, _ratio(N, t1 + t2),
                       degenerate=prod == 0, bridge_ok=bridge, details=details)


def _trial_a_plus_bc(ring, S, trial):
    A, B, C = S["A"], S["B"], S["C"]
    n, q = ring.n, ring.q
    prod = A.size * B.size * C.size
    rhs = min(q ** (n * n), prod / q ** (2 * n * n - (n + 1) / 2))
    if C.size == 0 or B.size == 0:
        return TrialResult(trial, _sizes(S), A.size, rhs, None, degenerate=True)
    image, t = compose_a_plus_bc(A, B, C)
    lhs = image.size
    if lhs == 0:
        return TrialResult(trial, _sizes(S), 0, rhs, None, degenerate=True)
    sq = int(sum(int(x) * int(x) for x in t[t != 0]))
    n6 = count_N6(B, C, A, set_combine("negate", A), set_combine("negate", B), C)
    bridge = sq == n6 and prod * prod <= lhs * sq and int(t.sum()) == prod
    return TrialResult(trial, _sizes(S), lhs, rhs, _ratio(rhs, lhs), bridge_ok=bridge,
                       details={"sum_t_squared": sq, "N": n6})


def _trial_sum_product(ring, S, trial):
    A = S["A"]
    n, q = ring.n, ring.q
    zero_count = int((ring.rank_of_index < n).sum())
    hyp = A.size > 2 * zero_count
    if A.size == 0:
        return TrialResult(trial, _sizes(S), 0, 0.0, None, degenerate=True, hypothesis_ok=hyp)
    plus = set_combine("sum", A, A).size
    times = set_combine("product", A, A).size
    lhs = max(plus, times)
    rhs = min(A.size**2 / q ** (n * n - (n + 1) / 4), q ** (n * n / 3) * A.size ** (2 / 3))
    details = {"sumset": plus, "productset": times}
    # the argument runs on the invertible part of A
    Ag = MatrixSet.from_mask(ring, A.mask() & (ring.rank_of_index == n))
    bridge = None
    if Ag.size:
        energy = additive_energy(Ag, Ag)
        sum_g = set_combine("sum", Ag, Ag).size
        AA = set_combine("product", Ag, Ag)
        inv = set_combine("invert", Ag)
        n6 = count_N6(AA, inv, Ag, set_combine("negate", Ag), set_combine("negate", AA), inv)
        bridge = Ag.size**4 <= sum_g * energy and Ag.size**2 * energy <= n6
        details.update({"invertible_part": Ag.size, "energy": energy, "N": n6})
    return TrialResult(trial, _sizes(S), lhs, rhs, _ratio(rhs, lhs), hypothesis_ok=hyp,
                       bridge_ok=bridge, details=details)


def _trial_energy(ring, S, trial):
    A, B, C = S["A"], S["B"], S["C"]
    _require_gl(ring, C, "C")
    n, q = ring.n, ring.q
    if 0 in (A.size, B.size, C.size):
        return TrialResult(trial, _sizes(S), 0, 0.0, None, degenerate=True)
    E = additive_energy(A, B)
    BC = set_combine("product", B, C)
    bound = BC.size**2 * A.size**2 / q ** (n * n) + q ** (2 * n * n - (n + 1) / 2) * BC.size * A.size / C.size
    sumset = set_combine("sum", A, B).size
    inv = set_combine("invert", C)
    n6 = count_N6(BC, inv, A, set_combine("negate", A), set_combine("negate", BC), inv)
    bridge = (A.size * B.size) ** 2 <= sumset * E and C.size**2 * E <= n6
    return TrialResult(trial, _sizes(S), E, bound, _ratio(E, bound), bridge_ok=bridge,
                       details={"BC": BC.size, "sumset": sumset, "N": n6})


def _trial_a_plus_b_eq_cd(ring, S, trial):
    A, B, C, D = S["A"], S["B"], S["C"], S["D"]
    n, q = ring.n, ring.q
    N = count_a_plus_b_eq_cd(A, B, C, D)
    prod = A.size * B.size * C.size * D.size
    bound = (A.size * math.sqrt(B.size) * C.size * D.size / q ** (n * n / 2)
             + q ** (n * n - (n + 1) / 4) * math.sqrt(prod))
    if prod == 0:
        return TrialResult(trial, _sizes(S), N, bound, None, degenerate=True)
    n6 = count_N6(C, D, A, set_combine("negate", A), set_combine("negate", C), D)
    bridge = N * N <= B.size * n6
    return TrialResult(trial, _sizes(S), N, bound, _ratio(N, bound), bridge_ok=bridge,
                       details={"N": n6})


def _trial_apb_times_c(ring, S, trial):
    A, B, C = S["A"], S["B"], S["C"]
    _require_gl(ring, C, "C")
    n, q = ring.n, ring.q
    prod = A.size * B.size * C.size
    rhs = min(q ** (n * n), prod / q ** (2 * n * n - 1))
    if prod == 0:
        return TrialResult(trial, _sizes(S), 0, rhs, None, degenerate=True)
    image, _ = compose_apb_times_c(A, B, C)
    lhs = image.size
    coll = collision_count_apb_times_c(A, B, C)
    bridge = prod * prod <= lhs * coll
    details = {"collisions": coll}
    g = _graph(ring, "right")
    if g is not None:
        X, Y = apb_vertex_sets(ring, A, B, C)
        e = g.edge_count_between(X, Y)
        details["edge_count"] = e
        bridge = bridge and e == coll and len(X) == prod and len(Y) == prod
    return TrialResult(trial, _sizes(S), lhs, rhs, _ratio(rhs, lhs), bridge_ok=bridge,
                       details=details)


def apb_vertex_sets(ring: RingSpec, A, B, C):
    """X = {(c1, -b2, -a1 c1)} and Y = {(b1, c2, a2 c2)} in the right-orientation graph."""
    a, b, c = (s.indices() for s in (A, B, C))
    aa, bb, cc = (x.ravel() for x in np.meshgrid(a, b, c, indexing="ij"))
    ac = ring.mul_idx(aa, cc)
    X = triple_encode(ring, cc, ring.neg_idx(bb), ring.neg_idx(ac))
    Y = triple_encode(ring, bb, cc, ac)
    return X, Y


def _sizes(S: dict) -> dict:
    return {k: v.size for k, v in S.items()}


@dataclass(frozen=True)
class TheoremSpec:
    name: str
    set_names: str
    needs_gl: str
    kind: str
    trial: object


THEOREMS = {
    "prop-n": TheoremSpec("prop-n", "ABCDEF", "", "upper", _trial_prop_n),
    "a-plus-bc": TheoremSpec("a-plus-bc", "ABC", "", "lower", _trial_a_plus_bc),
    "sum-product": TheoremSpec("sum-product", "A", "", "lower", _trial_sum_product),
    "energy": TheoremSpec("energy", "ABC", "C", "upper", _trial_energy),
    "a-plus-b-eq-cd": TheoremSpec("a-plus-b-eq-cd", "ABCD", "", "upper", _trial_a_plus_b_eq_cd),
    "apb-times-c": TheoremSpec("apb-times-c", "ABC", "C", "lower", _trial_apb_times_c),
}


def run_trial(config: ExperimentConfig, trial: int) -> TrialResult:
    ring = config.ring
    spec = THEOREMS[config.theorem]
    sets = {name: config.recipe(name).build(ring, stream_id(config.theorem, trial, name))
            for name in spec.set_names}
    return spec.trial(ring, sets, trial)


def run_theorem(config: ExperimentConfig, threads: int = 1) -> TheoremReport:
    if threads > 1 and config.trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trials = list(pool.map(lambda t: run_trial(config, t), range(config.trials)))
    else:
        trials = [run_trial(config, t) for t in range(config.trials)]
    density = config.default.density if config.default.source == "random" else None
    return TheoremReport(config.theorem, config.n, config.p, config.m, config.budget, trials, density)


def verify_prop_N_bound(config: ExperimentConfig) -> TheoremReport:
    return run_theorem(replace(config, theorem="prop-n"))


def verify_a_plus_bc(config: ExperimentConfig) -> TheoremReport:
    return run_theorem(replace(config, theorem="a-plus-bc"))


def verify_sum_product(config: ExperimentConfig) -> TheoremReport:
    return run_theorem(replace(config, theorem="sum-product"))


def verify_energy_lemma(config: ExperimentConfig) -> TheoremReport:
    return run_theorem(replace(config, theorem="energy"))


def verify_a_plus_b_eq_cd(config: ExperimentConfig) -> TheoremReport:
    return run_theorem(replace(config, theorem="a-plus-b-eq-cd"))


def verify_apb_times_c(config: ExperimentConfig) -> TheoremReport:
    return run_theorem(replace(config, theorem="apb-times-c"))


# -- sweeps ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    theorems: tuple[str, ...]
    n: int
    fields: tuple[tuple[int, int], ...]
    densities: tuple[float, ...]
    trials: int = 1
    seed: int = 0
    budget: float = 10.0

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        known = {"theorems", "theorem", "n", "q", "fields", "densities", "trials", "seed", "budget"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown sweep keys {sorted(unknown)}")
        theorems = d.get("theorems") or ([d["theorem"]] if "theorem" in d else None)
        if not theorems:
            raise ValueError("sweep needs 'theorems'")
        for t in theorems:
            if t not in THEOREMS:
                raise ValueError(f"unknown theorem {t!r}")
        if "fields" in d:
            fields = tuple((int(p), int(m)) for p, m in d["fields"])
        elif "q" in d:
            fields = tuple(prime_power(int(q)) for q in d["q"])
        else:
            raise ValueError("sweep needs 'q' or 'fields'")
        densities = tuple(float(x) for x in d.get("densities", [1.0]))
        for x in densities:
            if not 0 < x <= 1:
                raise ValueError("densities must lie in (0, 1]")
        trials = int(d.get("trials", 1))
        if trials < 1:
            raise ValueError("trials must be >= 1")
        return cls(tuple(theorems), int(d.get("n", 1)), fields, densities, trials,
                   int(d.get("seed", 0)), float(d.get("budget", 10.0)))

    def points(self) -> list[tuple[ExperimentConfig, int]]:
        pts = []
        for theorem in self.theorems:
            for p, m in self.fields:
                for dens in self.densities:
                    cfg = ExperimentConfig(theorem=theorem, n=self.n, p=p, m=m,
                                           default=SetRecipe("random", dens, self.seed),
                                           trials=self.trials, budget=self.budget)
                    pts.extend((cfg, t) for t in range(self.trials))
        return pts


def prime_power(q: int) -> tuple[int, int]:
    F = None
    for p in range(2, q + 1):
        if q % p == 0:
            m, r = 0, q
            while r % p == 0:
                r //= p
                m += 1
            if r != 1:
                break
            F = (p, m)
            break
    if F is None:
        raise ValueError(f"{q} is not a prime power")
    make_field(*F)
    return F


def run_sweep(config: SweepConfig, threads: int = 1) -> list[list]:
    """One CSV row per (theorem, field, density, trial), in grid order."""
    points = config.points()

    def one(point):
        cfg, t = point
        res = run_trial(cfg, t)
        report = TheoremReport(cfg.theorem, cfg.n, cfg.p, cfg.m, cfg.budget, [res], cfg.default.density)
        return report.csv_rows()[0]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, points))
    return [one(pt) for pt in points]
