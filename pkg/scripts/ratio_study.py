"""Log the ratios behind the policy brackets, one CSV row per symbol.

Columns: the strong-norm / Gram ratio, the mainteo ratio, the averaged-norm
policy ratio, and both bootstrap constants (c1 and c1^2 under the root, and
the strong-norm variant).

    python scripts/ratio_study.py --dims 1 2 4 --depth 3 --seeds 30 --out results/ratios.csv
"""

import argparse
import csv
from pathlib import Path

from opbmo.averaging import bmopara_check
from opbmo.dyadic import TreeConfig
from opbmo.norms import gram_sbmo, sbmo
from opbmo.sweep import bootstrap_check, mainteo_ratio
from opbmo.symbol import gaussian_symbol

FIELDS = ["n", "d", "seed", "sbmo_sq_over_gram", "mainteo_ratio", "bmopara_policy_ratio",
          "bmopara_l1_ratio", "bootstrap_ratio", "bootstrap_C", "bootstrap_C_sbmo", "bootstrap_C_squared_c1"]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--seeds", type=int, default=30)
    ap.add_argument("--out", default="results/ratios.csv")
    args = ap.parse_args()
    if args.depth > 4:
        ap.error("exact sign enumeration needs depth <= 4")

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, FIELDS, lineterminator="\n")
        w.writeheader()
        for n in args.dims:
            for seed in range(args.seeds):
                B = gaussian_symbol(TreeConfig(args.depth, n), seed)
                bp = bmopara_check(B)
                bs = bootstrap_check(B)
                w.writerow({
                    "n": n, "d": args.depth, "seed": seed,
                    "sbmo_sq_over_gram": repr(sbmo(B).value ** 2 / gram_sbmo(B).value),
                    "mainteo_ratio": repr(mainteo_ratio(B)),
                    "bmopara_policy_ratio": repr(bp["policy_ratio"]),
                    "bmopara_l1_ratio": repr(bp["l1_worst_ratio"]),
                    "bootstrap_ratio": repr(bs["ratio"]),
                    "bootstrap_C": repr(bs["C"]),
                    "bootstrap_C_sbmo": repr(bs["C_sbmo"]),
                    "bootstrap_C_squared_c1": repr(bs["C_squared_c1"]),
                })
    print("wrote", args.out)


if __name__ == "__main__":
    main()
