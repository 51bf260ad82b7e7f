"""Density sweep showing where |A + BC| saturates M_n(F_q).

Writes the sweep CSV, then prints the mean fraction |A + BC| / q^(n^2) and
the mean measured constant per (q, density).

    python scripts/threshold_sweep.py --q 5 7 11 --trials 10 --out a_plus_bc.csv
"""

from __future__ import annotations

import argparse
import csv
import io
import statistics
from collections import defaultdict

import numpy as np

from sumproduct.theorems import SweepConfig, csv_text, run_sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--theorem", default="a-plus-bc")
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--q", type=int, nargs="+", default=[5, 7, 11, 13])
    ap.add_argument("--densities", type=float, nargs="+",
                    default=[round(x, 2) for x in np.linspace(0.05, 0.6, 12)])
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    cfg = SweepConfig.from_dict({"theorems": [args.theorem], "n": args.n, "q": args.q,
                                 "densities": args.densities, "trials": args.trials, "seed": args.seed})
    text = csv_text(run_sweep(cfg, threads=args.threads))
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)

    frac, const = defaultdict(list), defaultdict(list)
    for row in csv.DictReader(io.StringIO(text)):
        key = (int(row["q"]), float(row["density"]))
        frac[key].append(int(row["lhs"]) / int(row["q"]) ** (args.n * args.n))
        if row["constant"]:
            const[key].append(float(row["constant"]))
    print(f"{'q':>4} {'density':>8} {'coverage':>9} {'constant':>9}")
    for key in sorted(frac):
        c = f"{statistics.mean(const[key]):9.3f}" if const[key] else f"{'-':>9}"
        print(f"{key[0]:>4} {key[1]:>8.2f} {statistics.mean(frac[key]):>9.3f} {c}")


if __name__ == "__main__":
    main()
