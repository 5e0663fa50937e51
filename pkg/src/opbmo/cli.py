"""Command-line front end.

Exit codes: 0 pass, 1 assert failure, 2 usage/config/parse error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import averaging, norms
from .dyadic import TreeConfig
from .growth import ENSEMBLES, NORM_FIELDS, ExperimentConfig, run_growth
from .io import SymbolParseError, dumps_symbol, load_symbol
from .suite import TOLERANCES, SuiteConfig, run_suite
from .sweep import iterated_sweep, sweep
from .symbol import gaussian_symbol, make_rng

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _emit(obj, path=None):
    text = json.dumps(obj, indent=1) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_norms(args) -> int:
    B = load_symbol(args.file)
    reports = norms.all_norms(B)
    _emit({k: v.to_json() for k, v in reports.items()}, args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    B = load_symbol(args.file)
    S = iterated_sweep(B, args.iterate)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(dumps_symbol(S.haar))
    else:
        sys.stdout.write(dumps_symbol(S.haar))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = SuiteConfig(depths=args.depth, dims=args.dim, seeds=args.seeds,
                      tolerance=args.tolerance, checks=args.checks)
    report = run_suite(cfg)
    _emit(report, args.output)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _assert(name, value, bound, passed):
    return {"name": name, "value": float(value), "bound": float(bound), "passed": bool(passed)}


def _average_asserts(B, check, mode, samples, seed) -> list[dict]:
    out = []
    if check == "sweep":
        mean, se = averaging.sweep_average(B, mode, samples, seed)
        dev = mean - sweep(B).step.cells
        if mode == "exact":
            v = float(np.abs(dev).max())
            out.append(_assert("sweep_exact", v, 1e-12, v < 1e-12))
        else:
            # each of re/im within 4 standard errors, with a float floor
            z = max(float(np.max(np.abs(dev.real) - 4 * se.real)), float(np.max(np.abs(dev.imag) - 4 * se.imag)))
            out.append(_assert("sweep_mc_4stderr", z, 1e-12, z < 1e-12))
    elif check == "pythagoras":
        n = B.cfg.dim
        rng = make_rng(seed, 9)
        f = rng.standard_normal(B.cfg.space_dim) + 1j * rng.standard_normal(B.cfg.space_dim)
        f[:n] = 0
        r = averaging.pythagoras_check(B, f)
        out.append(_assert("pythagoras_full", r["full_residual"], 1e-10, r["full_residual"] < 1e-10))
        out.append(_assert("pythagoras_lambda", r["lambda_residual"], 1e-10, r["lambda_residual"] < 1e-10))
        for key in ("cross_pi_gamma", "cross_gamma_delta", "cross_pi_delta"):
            out.append(_assert(key, r[key], 1e-12, r[key] < 1e-12))
    elif check == "avchar":
        r = averaging.avchar_check(B, mode, samples, seed)
        slack = 4 * r["stderr"]
        out.append(_assert("avchar_lower", r["estimate"], r["lower"], r["estimate"] + slack >= r["lower"]))
        out.append(_assert("avchar_upper", r["estimate"], r["upper"], r["estimate"] - slack <= r["upper"]))
    elif check == "phinorm":
        s = norms.sbmo(B).value
        a, b = averaging.phi_norm_closed(B), averaging.phi_norm_direct(B)
        out.append(_assert("phi_closed_vs_sbmo", abs(a - s), 1e-8, abs(a - s) < 1e-8))
        out.append(_assert("phi_direct_vs_sbmo", abs(b - s), 1e-8, abs(b - s) < 1e-8))
        so, ref = averaging.so_from_phi(B)
        out.append(_assert("phi_sum_vs_bmo_so", abs(so - ref), 1e-8, abs(so - ref) < 1e-8))
    elif check == "bmopara":
        r = averaging.bmopara_check(B, mode, samples, seed)
        out.append(_assert("bmopara_l1", r["l1_worst_ratio"], 1.0, r["l1_ok"]))
        out.append(_assert("bmopara_policy", r["policy_ratio"], 8.0, r["policy_ok"]))
    return out


def cmd_average(args) -> int:
    if args.file:
        B = load_symbol(args.file)
    else:
        B = gaussian_symbol(TreeConfig(args.depth, args.dim), args.symbol_seed)
    mode = "exact" if args.mode == "exact" else "monte_carlo"
    kind = {"norm": "bmo_norm", "mult": "bmo_mult"}[args.kind]
    est = averaging.averaged_norm_sq(B, kind, mode, args.samples, args.seed)
    asserts = []
    for check in args.check or []:
        asserts += _average_asserts(B, check, mode, args.samples, args.seed)
    report = {"kind": kind, "mode": est.mode, "samples": est.samples, "estimate": est.value,
              "stderr": est.stderr, "asserts": asserts}
    _emit(report, args.output)
    return EXIT_OK if all(a["passed"] for a in asserts) else EXIT_FAIL


def cmd_growth(args) -> int:
    cfg = ExperimentConfig(dims=args.dims, depth=args.depth, seeds=args.seeds, ensemble=args.ensemble,
                           norms=args.norms, output=args.output, format=args.format)
    res = run_growth(cfg)
    for w in res["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    _emit({k: res[k] for k in ("records", "output", "summary_file", "summary")})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opbmo", description="Operator-valued dyadic BMO at finite resolution.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("norms", help="all norms of a symbol file, with witnesses")
    s.add_argument("file")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_norms)

    s = sub.add_parser("sweep", help="(iterated) sweep of a symbol file, written as a symbol file")
    s.add_argument("file")
    s.add_argument("--iterate", type=int, default=1)
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("verify", help="run the identity and inequality suite")
    s.add_argument("--depth", type=int, nargs="+", default=[2, 3])
    s.add_argument("--dim", type=int, nargs="+", default=[1, 2, 4])
    s.add_argument("--seeds", type=int, default=25)
    s.add_argument("--tolerance", type=float, default=None, help="override every check tolerance")
    s.add_argument("--checks", nargs="+", choices=sorted(TOLERANCES), default=None)
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("average", help="martingale-transform averages and their checks")
    s.add_argument("--file")
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--symbol-seed", type=int, default=0)
    s.add_argument("--mode", choices=["exact", "mc"], default="exact")
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--kind", choices=["norm", "mult"], default="norm")
    s.add_argument("--check", action="append",
                   choices=["sweep", "pythagoras", "avchar", "phinorm", "bmopara"])
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_average)

    s = sub.add_parser("growth", help="dimensional-growth experiment (CSV or JSON)")
    s.add_argument("--dims", type=int, nargs="+", default=[1, 2, 4, 8, 16])
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--seeds", type=int, default=50)
    s.add_argument("--ensemble", choices=ENSEMBLES, default="gaussian")
    s.add_argument("--norms", nargs="+", choices=NORM_FIELDS, default=None)
    s.add_argument("--output", "-o", default="growth.csv")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(func=cmd_growth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except SymbolParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"I/O error: {e.filename or ''}: {e.strerror or e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
