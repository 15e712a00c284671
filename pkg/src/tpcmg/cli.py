"""Command-line benchmark harness.

Subcommands:
  table    march the manufactured problem and print N/error/rate/cpu/iter
  verify   run the dense convergence-theory certification checks
  scaling  time matvecs and V-cycles across sizes

Exit codes: 0 success, 1 criteria failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bench import (rows_pretty, rows_to_csv, run_scaling, run_table,
                    run_verify, table_json)
from .peridynamic import SQRT_H
from .solver import SmootherConfig


def _delta_arg(value):
    if value == SQRT_H:
        return value
    try:
        out = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"delta must be a number or '{SQRT_H}', got {value!r}")
    if out <= 0:
        raise argparse.ArgumentTypeError("delta must be positive")
    return out


def _add_common(p):
    p.add_argument("--model", required=True,
                   choices=("gamma", "pd-nonsym", "pd-sym"))
    p.add_argument("--N", action="append", type=int, required=True,
                   help="grid size, repeatable")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--delta", type=_delta_arg, default=0.25,
                   help=f"horizon: positive number or '{SQRT_H}'")
    p.add_argument("--tol", type=float, default=1e-15)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--omega-pre", type=float, default=1.0)
    p.add_argument("--omega-post", type=float, default=0.5)
    p.add_argument("--m1", type=int, default=1)
    p.add_argument("--m2", type=int, default=1)
    p.add_argument("--coarsest", type=int, default=7)
    p.add_argument("--out", choices=("csv", "json", "pretty"), default="pretty")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="tpcmg", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("table", "verify", "scaling"):
        p = sub.add_parser(name)
        _add_common(p)
        if name == "verify":
            p.add_argument("--r", type=int, default=None,
                           help="mesh ratio; overrides --delta as r/N")
        if name == "scaling":
            p.add_argument("--reps", type=int, default=5)
            p.add_argument("--dense-compare-N", type=int, default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    smoother = SmootherConfig(omega_pre=args.omega_pre, omega_post=args.omega_post,
                              m1=args.m1, m2=args.m2)
    if args.command == "table":
        rows = run_table(args.model, args.N, gamma=args.gamma, delta=args.delta,
                         tol=args.tol, max_iter=args.max_iter,
                         smoother=smoother, coarsest=args.coarsest)
        params = {"gamma": args.gamma} if args.model == "gamma" else {"delta": str(args.delta)}
        if args.out == "csv":
            sys.stdout.write(rows_to_csv(rows))
        elif args.out == "json":
            json.dump(table_json(args.model, params, rows), sys.stdout, indent=2)
            sys.stdout.write("\n")
        else:
            print(rows_pretty(rows))
        failed = any(r.error != r.error for r in rows)   # NaN marks a bad row
        return 1 if failed else 0

    if args.command == "verify":
        status = 0
        for N in args.N:
            lines, passed = run_verify(args.model, N, gamma=args.gamma,
                                       delta=args.delta, r=args.r, seed=args.seed)
            print(f"# model={args.model} N={N}")
            for line in lines:
                print(line)
            status |= 0 if passed else 1
        return status

    if args.command == "scaling":
        out = run_scaling(args.model, args.N, gamma=args.gamma, delta=args.delta,
                          reps=args.reps, coarsest=args.coarsest,
                          dense_compare_N=args.dense_compare_N)
        if args.out == "json":
            json.dump(out, sys.stdout, indent=2)
            sys.stdout.write("\n")
        else:
            for row in out["rows"]:
                print(f"N={row['N']:>7} n={row['n']:>7} matvec={row['matvec']*1e3:9.3f}ms "
                      f"vcycle={row['vcycle']*1e3:9.3f}ms levels={row['levels']} "
                      f"storage={row['storage']}")
            for ratio in out["ratios"]:
                print(f"growth {ratio['N']} -> {2*ratio['N']}: "
                      f"matvec x{ratio['matvec']:.2f} vcycle x{ratio['vcycle']:.2f}")
            if "dense_compare" in out:
                d = out["dense_compare"]
                print(f"dense comparison at N={d['N']}: fast {d['fast']*1e3:.3f}ms "
                      f"vs dense {d['dense']*1e3:.3f}ms (x{d['speedup']:.1f})")
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
