"""Command-line driver: single density evaluations and verification suites.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 budget abort under --strict-budget.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from swb.counting import Budget, BudgetExceeded, EngineUnsupported, count_reps
from swb.density import DensityError, local_density, rep_dimension
from swb.lattice import LatticeError, parse_lattice
from swb.report import render_value
from swb.suites import SUITES, ConfigError, SuiteConfig, run_suite


def _parse_int_list(text: str) -> tuple:
    """Ranges like '1..60', lists like '2,3,5', or both: '1..4,9,-2..2'."""
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ".." in chunk:
            lo, hi = chunk.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))  # inverted ranges are empty
        else:
            out.append(int(chunk))
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="swb",
        description="Exact local densities of quadratic lattices and the "
        "intersection ledger of the level-N modular curve.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    dens = sub.add_parser("density", help="evaluate a single local density")
    dens.add_argument("--p", type=int, required=True, help="the prime")
    dens.add_argument("--target", required=True, help="lattice spec, e.g. hyp:4:+")
    dens.add_argument("--source", required=True, help="lattice spec, e.g. diag:1,3")
    dens.add_argument("--d", type=int, default=None, help="fixed precision (else stabilized)")
    dens.add_argument("--d-max", type=int, default=None)
    dens.add_argument("--primitive", action="store_true")
    dens.add_argument("--convention", choices=["A", "B"], default="A")
    dens.add_argument("--budget", type=int, default=2**32)
    dens.add_argument("--format", choices=["text", "json"], default="text")

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=SUITES)
    ver.add_argument("--p", default=None, help="prime list, e.g. 2,3,5")
    ver.add_argument("--N", default=None, help="level range, e.g. 1..60")
    ver.add_argument("--t", default=None, help="t range, e.g. -10..10")
    ver.add_argument("--k", default=None, help="k range, e.g. 1..3")
    ver.add_argument("--d-max", type=int, default=None)
    ver.add_argument("--budget", type=int, default=2**32)
    ver.add_argument("--jobs", type=int, default=1)
    ver.add_argument("--convention", choices=["A", "B"], default="A")
    ver.add_argument("--format", choices=["text", "json"], default="text")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--strict-budget", action="store_true")
    return ap


def _density_command(args) -> int:
    try:
        target = parse_lattice(args.target, args.p)
        source = parse_lattice(args.source, args.p)
    except (LatticeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    budget = Budget(limit=args.budget)
    lines = {}
    try:
        if args.d is not None:
            cnt = count_reps(
                target, source, args.d, primitive=args.primitive,
                convention=args.convention, budget=budget,
            )
            dim = rep_dimension(target.rank, source.rank)
            lines = {
                "count": cnt,
                "d": args.d,
                "normalized": Fraction(cnt) / Fraction(args.p) ** (args.d * dim),
            }
        else:
            dv = local_density(
                target, source, convention=args.convention,
                primitive=args.primitive, d_max=args.d_max, budget=budget,
            )
            lines = {
                "density": dv.value,
                "stabilized_at": dv.stabilized_at,
                "convention": dv.convention,
            }
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return 3
    except (DensityError, EngineUnsupported) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.format == "json":
        import json

        print(json.dumps({k: render_value(v) for k, v in lines.items()}, sort_keys=True))
    else:
        for k, v in lines.items():
            print(f"{k}: {render_value(v)}")
    return 0


def _verify_command(args) -> int:
    kwargs = {}
    try:
        if args.p:
            kwargs["primes"] = _parse_int_list(args.p)
        if args.N:
            kwargs["n_values"] = _parse_int_list(args.N)
        if args.t:
            kwargs["t_values"] = tuple(t for t in _parse_int_list(args.t) if t)
        if args.k:
            kwargs["k_values"] = _parse_int_list(args.k)
        cfg = SuiteConfig(
            suite=args.suite,
            d_max=args.d_max,
            budget=args.budget,
            jobs=args.jobs,
            convention=args.convention,
            output_format=args.format,
            seed=args.seed,
            strict_budget=args.strict_budget,
            **kwargs,
        ).validate()
    except (ConfigError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    t0 = time.time()
    report = run_suite(cfg)
    wall = time.time() - t0
    out = report.to_json() if cfg.output_format == "json" else report.to_text()
    print(out)
    print(f"wall time: {wall:.1f}s", file=sys.stderr)
    summary = report.summary
    if summary["fail"]:
        return 1
    if cfg.strict_budget and summary["skipped-budget"]:
        return 3
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "density":
        return _density_command(args)
    return _verify_command(args)


if __name__ == "__main__":
    sys.exit(main())
