"""Run the full verification suite and write its JSON report.

    python scripts/verify_all.py --seeds 100 --depths 2 3 4 --out results/verify.json
"""

import argparse
import json
import sys
from pathlib import Path

from opbmo.suite import SuiteConfig, run_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--depths", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--seeds", type=int, default=25)
    ap.add_argument("--out", default="results/verify.json")
    args = ap.parse_args()

    rep = run_suite(SuiteConfig(depths=args.depths, dims=args.dims, seeds=args.seeds))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(rep, indent=1) + "\n")
    for c in rep["checks"]:
        mark = "ok  " if c["passed"] else "FAIL"
        print(f"{mark} {c['name']:<22} {c['residual']:.2e}  (tol {c['tolerance']:.0e})")
    print(f"{rep['cases']} cases in {rep['seconds']}s -> {args.out}")
    return 0 if rep["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
