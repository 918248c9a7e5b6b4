"""Command-line entry point for the experiment runner."""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .config import load_config
from .experiments import (
    epsilon_continuation,
    l_sweep,
    refinement_study,
    run_scenario,
)
from .inequalities import check_ineq_61, check_ineq_64, cosine_family


def _floats(raw: str) -> list[float]:
    return [float(x) for x in raw.split(",") if x.strip()]


def _ints(raw: str) -> list[int]:
    return [int(x) for x in raw.split(",") if x.strip()]


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    return cfg


def _add_common(p):
    p.add_argument("config", help="run configuration file")
    p.add_argument("--out", default=None, help="output directory override")
    p.add_argument("--seed", type=int, default=None, help="seed override")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="taxisim",
        description="Numerical laboratory for the regularized degenerate "
                    "nutrient-taxis system")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single simulation")
    _add_common(p)

    p = sub.add_parser("continuation", help="decreasing-epsilon study")
    _add_common(p)
    p.add_argument("--eps", required=True, type=_floats,
                   help="strictly decreasing comma list, e.g. 0.1,0.05,0.025")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("refine", help="manufactured-solution order study")
    _add_common(p)
    p.add_argument("--n", required=True, type=_ints,
                   help="doubling grid sizes, e.g. 32,64,128,256")

    p = sub.add_parser("sweep", help="diffusion-exponent sweep")
    _add_common(p)
    p.add_argument("--l", required=True, type=_floats,
                   help="comma list of exponents, e.g. 1.5,2,2.5,3")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("ineq", help="functional-inequality stress test")
    _add_common(p)
    p.add_argument("--count", type=int, default=100, help="field pairs")
    p.add_argument("--p", type=_floats, default=[1.0, 2.0])
    p.add_argument("--eta", type=_floats, default=[0.1, 1.0, 10.0])

    args = ap.parse_args(argv)
    cfg = _load(args)

    if args.command == "run":
        res = run_scenario(cfg)
        print(f"run finished: status={res.manifest['status']} "
              f"out={cfg.out_dir}")
        return 0 if res.manifest["status"] == "success" else 1
    if args.command == "continuation":
        man = epsilon_continuation(cfg, args.eps, jobs=args.jobs)
        print(f"continuation finished: out={cfg.out_dir}")
        return 0 if man["status"] == "success" else 1
    if args.command == "refine":
        man = refinement_study(cfg, args.n)
        print("spatial orders:",
              ["%.3f/%.3f" % (ou, ov) for _, ou, ov in man["spatial_orders"]])
        print("temporal orders:",
              ["%.3f" % o for o in man["temporal_orders"]])
        return 0
    if args.command == "sweep":
        man = l_sweep(cfg, args.l, jobs=args.jobs)
        print(f"sweep finished: out={cfg.out_dir}")
        return 0 if man["status"] == "success" else 1
    if args.command == "ineq":
        return _run_ineq(cfg, args)
    return 2


def _run_ineq(cfg, args) -> int:
    grid = cfg.grid()
    pairs = cosine_family(grid, args.count, cfg.seed)
    os.makedirs(cfg.out_dir, exist_ok=True)
    rows = []
    fitted = {}
    for p in args.p:
        best = 0.0
        for i, (phi, psi) in enumerate(pairs):
            rep = check_ineq_61(phi, psi, p, field_seed=i)
            rows.append(("6.1", i, p, "", rep.lhs, rep.rhs_terms, rep.ratio))
            best = max(best, rep.ratio)
        fitted[f"c61_p{p:g}"] = best
        for eta in args.eta:
            best = 0.0
            for i, (phi, psi) in enumerate(pairs):
                rep = check_ineq_64(phi, psi, p, eta, field_seed=i)
                rows.append(("6.4", i, p, eta, rep.lhs, rep.rhs_terms,
                             rep.ratio))
                best = max(best, rep.ratio)
            fitted[f"c64_p{p:g}_eta{eta:g}"] = best

    with open(os.path.join(cfg.out_dir, "ineq_reports.csv"), "w") as fh:
        fh.write("ineq,field_seed,p,eta,lhs,rhs_total,ratio\n")
        for ineq, i, p, eta, lhs, terms, ratio in rows:
            total = (terms["bracket"] * terms["factor"] if ineq == "6.1"
                     else sum(terms.values()))
            fh.write(f"{ineq},{i},{p:g},{eta if eta == '' else '%g' % eta},"
                     f"{lhs:.17g},{total:.17g},{ratio:.17g}\n")
    summary = {"grid": list(grid.shape), "count": args.count,
               "seed": cfg.seed, "fitted_constants": fitted}
    with open(os.path.join(cfg.out_dir, "ineq_summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"inequality lab finished: out={cfg.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
