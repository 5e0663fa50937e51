"""Dimensional-growth experiment: records and per-n summary as CSV.

    python scripts/run_growth.py --out results/growth.csv
    python scripts/run_growth.py --dims 1 2 4 8 16 32 --seeds 20 --ensemble column_embed
"""

import argparse
import json
from pathlib import Path

from opbmo.growth import ENSEMBLES, ExperimentConfig, run_growth


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2, 4, 8, 16])
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--ensemble", choices=ENSEMBLES, default="gaussian")
    ap.add_argument("--out", default="results/growth.csv")
    args = ap.parse_args()

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    cfg = ExperimentConfig(dims=args.dims, depth=args.depth, seeds=args.seeds,
                           ensemble=args.ensemble, output=args.out)
    res = run_growth(cfg)
    print(f"{res['records']} records -> {res['output']}, summary -> {res['summary_file']}")
    cols = ("n", "max_ratio_para_over_so", "max_ratio_sweep_over_so_sq",
            "max_sweep_over_so_sq_per_log", "max_mainteo_ratio")
    print("  ".join(f"{c:>28}" for c in cols))
    for row in res["summary"]:
        print("  ".join(f"{row[c]:>28.6g}" if isinstance(row[c], float) else f"{row[c]:>28}" for c in cols))
    for w in res["warnings"]:
        print("warning:", w)
    print(json.dumps({"config": vars(args)}))


if __name__ == "__main__":
    main()
