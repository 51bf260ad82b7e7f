"""Command-line entry point: ``python -m sumproduct <subcommand> ...``.

Exit codes: 0 success, 1 invalid input, 2 internal assertion failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import counting, sets, spectral, theorems
from .field import make_field
from .graphs import ORIENTATIONS, BipartiteGraph, verify_nnt_decomposition
from .ring import RingSpec

COUNT_KINDS = ("n6", "energy", "a-plus-b-eq-cd", "collisions", "a-plus-bc", "apb-times-c",
               "sumset", "productset")
FIELD_OPS = ("add", "sub", "mul", "inv", "trace", "character")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--n", type=int, default=1, help="matrix dimension")
    p.add_argument("--p", type=int, default=2, help="field characteristic")
    p.add_argument("--m", type=int, default=1, help="field degree, q = p^m")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("json", "csv"), default=None, help="json (csv for sweep)")
    p.add_argument("--dry-run", action="store_true", help="validate and print the plan only")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="sumproduct", description="Sum-product experiments over matrix rings.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("field", parents=[common], help="inspect F_q and evaluate one operation")
    f.add_argument("--op", choices=FIELD_OPS)
    f.add_argument("--x", type=int, default=0)
    f.add_argument("--y", type=int, default=0)

    # rank-count has its own matrix shape, so it takes no ring flags
    rc = sub.add_parser("rank-count", help="number of m x n matrices of rank k over F_q")
    rc.add_argument("--m", type=int, required=True)
    rc.add_argument("--n", type=int, required=True)
    rc.add_argument("--q", type=int, required=True)
    rc.add_argument("--k", type=int, required=True)
    rc.add_argument("--format", choices=("json", "csv"), default="json")
    rc.add_argument("--out", default=None)
    rc.add_argument("--dry-run", action="store_true")

    c = sub.add_parser("count", parents=[common], help="exact counts over chosen sets")
    c.add_argument("kind", choices=COUNT_KINDS)
    src = c.add_mutually_exclusive_group()
    src.add_argument("--all", action="store_true", help="every set is M_n (default)")
    src.add_argument("--gl", action="store_true", help="every set is GL_n")
    src.add_argument("--density", type=float, help="independent random sets at this density")

    g = sub.add_parser("graph", parents=[common], help="build a bipartite graph")
    g.add_argument("--orientation", choices=ORIENTATIONS, default="left")
    g.add_argument("--edges", default=None, help="write the edge list here")
    g.add_argument("--verify", action="store_true", help="check the NN^T decomposition")

    s = sub.add_parser("spectrum", parents=[common], help="third eigenvalue report")
    s.add_argument("--orientation", choices=ORIENTATIONS, default="left")
    s.add_argument("--method", choices=("auto", "dense", "character"), default="auto")

    v = sub.add_parser("verify", parents=[common], help="run one theorem instance")
    v.add_argument("--config", default=None, help="ExperimentConfig JSON")
    v.add_argument("--theorem", choices=sorted(theorems.THEOREMS))
    v.add_argument("--trials", type=int, default=1)
    v.add_argument("--density", type=float, default=None)
    v.add_argument("--budget", type=float, default=10.0)

    sw = sub.add_parser("sweep", parents=[common], help="grid over theorems, fields and densities")
    sw.add_argument("--config", required=True, help="sweep JSON")
    return parser


def _ring(args) -> RingSpec:
    if args.n < 1:
        raise ValueError("--n must be >= 1")
    return RingSpec(make_field(args.p, args.m), args.n)


def _emit(args, payload, csv_rows=None):
    if args.format == "csv" and csv_rows is not None:
        text = csv_rows
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _plan(args, **extra):
    plan = {k: v for k, v in vars(args).items() if k not in ("dry_run",)}
    plan.update(extra)
    sys.stdout.write(json.dumps({"plan": plan}, indent=2, sort_keys=True, default=str) + "\n")
    return 0


def _flat_csv(d: dict) -> str:
    keys = list(d)
    return ",".join(keys) + "\n" + ",".join(str(d[k]) for k in keys) + "\n"


# -- subcommands ------------------------------------------------------------------


def cmd_field(args):
    F = make_field(args.p, args.m)
    if args.dry_run:
        return _plan(args, q=F.q)
    out = {"p": F.p, "m": F.m, "q": F.q, "modulus": list(F.modulus)}
    if args.op:
        x, y = args.x, args.y
        if args.op == "inv":
            result = F.inv(x)
        elif args.op == "trace":
            result = F.trace(x)
        elif args.op == "character":
            z = F.character(x)
            result = [z.real, z.imag]
        else:
            result = getattr(F, args.op)(x, y)
        out.update(op=args.op, x=x, y=y, result=result)
    _emit(args, out, _flat_csv({k: v for k, v in out.items() if k != "modulus"}))
    return 0


def cmd_rank_count(args):
    counting.RankCountQuery(args.m, args.n, args.k, args.q)
    theorems.prime_power(args.q)
    if args.dry_run:
        return _plan(args)
    value = counting.rank_count(args.m, args.n, args.k, args.q)
    _emit(args, value, _flat_csv({"m": args.m, "n": args.n, "q": args.q, "k": args.k, "count": value}))
    return 0


def _count_sets(args, ring, names):
    if args.density is not None:
        recipe = theorems.SetRecipe("random", args.density, args.seed)
    elif args.gl:
        recipe = theorems.SetRecipe("gl")
    else:
        recipe = theorems.SetRecipe("all")
    return {k: recipe.build(ring, theorems.stream_id("count", 0, k)) for k in names}


def cmd_count(args):
    ring = _ring(args)
    if args.density is not None and not 0 < args.density <= 1:
        raise ValueError("--density must lie in (0, 1]")
    if args.dry_run:
        return _plan(args, q=ring.q, card=ring.card)
    kind = args.kind
    if kind == "n6":
        S = _count_sets(args, ring, "ABCDEF")
        value = sets.count_N6(*S.values())
    elif kind == "energy":
        S = _count_sets(args, ring, "AB")
        value = sets.additive_energy(S["A"], S["B"])
    elif kind == "a-plus-b-eq-cd":
        S = _count_sets(args, ring, "ABCD")
        value = sets.count_a_plus_b_eq_cd(*S.values())
    elif kind == "collisions":
        S = _count_sets(args, ring, "ABC")
        value = sets.collision_count_apb_times_c(*S.values())
    elif kind == "a-plus-bc":
        S = _count_sets(args, ring, "ABC")
        value = sets.compose_a_plus_bc(*S.values())[0].size
    elif kind == "apb-times-c":
        S = _count_sets(args, ring, "ABC")
        value = sets.compose_apb_times_c(*S.values())[0].size
    elif kind == "sumset":
        S = _count_sets(args, ring, "AB")
        value = sets.set_combine("sum", S["A"], S["B"]).size
    else:
        S = _count_sets(args, ring, "AB")
        value = sets.set_combine("product", S["A"], S["B"]).size
    row = {"kind": kind, "n": ring.n, "q": ring.q, "value": value}
    _emit(args, value, _flat_csv(row))
    return 0


def cmd_graph(args):
    ring = _ring(args)
    g = BipartiteGraph(ring, args.orientation)
    if args.dry_run:
        return _plan(args, side_size=g.side_size, degree=g.degree)
    out = {"graph": g.name, "side_size": g.side_size, "degree": g.degree, "edges": g.side_size * g.degree}
    if args.edges:
        out["edges_written"] = g.export_edge_list(args.edges)
    if args.verify:
        rep = verify_nnt_decomposition(ring, args.orientation)
        out["nnt_max_discrepancy"] = rep.max_discrepancy
        out["nnt_equal"] = rep.equal
        if not rep.equal:
            raise AssertionError("NN^T differs from its Cayley decomposition")
    _emit(args, out, _flat_csv(out))
    return 0


def cmd_spectrum(args):
    ring = _ring(args)
    g = BipartiteGraph(ring, args.orientation)
    if args.dry_run:
        return _plan(args, side_size=g.side_size)
    rep = spectral.third_eigenvalue(g, args.method)
    _emit(args, rep.to_json(), _flat_csv(rep.to_json()))
    return 0


def _verify_config(args) -> theorems.ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            return theorems.ExperimentConfig.from_dict(json.load(fh))
    if not args.theorem:
        raise ValueError("verify needs --theorem or --config")
    default = (theorems.SetRecipe("random", args.density, args.seed) if args.density is not None
               else theorems.SetRecipe("all"))
    if args.density is not None and not 0 < args.density <= 1:
        raise ValueError("--density must lie in (0, 1]")
    return theorems.ExperimentConfig(theorem=args.theorem, n=args.n, p=args.p, m=args.m,
                                     default=default, trials=args.trials, budget=args.budget)


def cmd_verify(args):
    cfg = _verify_config(args)
    cfg.ring  # noqa: B018  validates the field
    if args.out is None and cfg.out:
        args = replace_namespace(args, out=cfg.out)
    if args.dry_run:
        return _plan(args, resolved={"theorem": cfg.theorem, "n": cfg.n, "p": cfg.p, "m": cfg.m,
                                     "trials": cfg.trials, "budget": cfg.budget,
                                     "sets": {k: cfg.recipe(k).__dict__ for k in
                                              theorems.THEOREMS[cfg.theorem].set_names}})
    report = theorems.run_theorem(cfg, threads=max(1, args.threads))
    _emit(args, report.to_json(), theorems.csv_text(report.csv_rows()))
    return 0


def replace_namespace(ns, **kw):
    d = dict(vars(ns))
    d.update(kw)
    return argparse.Namespace(**d)


def cmd_sweep(args):
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed sweep config: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError("sweep config must be a JSON object")
    raw.setdefault("seed", args.seed)
    cfg = theorems.SweepConfig.from_dict(raw)
    if args.dry_run:
        return _plan(args, rows=len(cfg.points()), fields=cfg.fields, densities=cfg.densities,
                     theorems=cfg.theorems)
    rows = theorems.run_sweep(cfg, threads=max(1, args.threads))
    text = theorems.csv_text(rows)
    if args.format == "json":
        payload = [dict(zip(theorems.CSV_COLUMNS, r)) for r in rows]
        _emit(args, payload)
    else:
        _emit(args, None, text)
    return 0


COMMANDS = {
    "field": cmd_field,
    "rank-count": cmd_rank_count,
    "count": cmd_count,
    "graph": cmd_graph,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.format is None:
            args.format = "csv" if args.command == "sweep" else "json"
        return COMMANDS[args.command](args)
    except AssertionError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ZeroDivisionError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> int:
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
