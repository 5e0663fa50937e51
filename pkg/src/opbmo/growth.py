"""Dimensional-growth experiments: norm ratios of random symbols as n grows.

One record per (n, seed), written in (n, seed) order; floats use ``repr`` so
reruns are byte-identical. A summary file gives max and mean ratios per n,
also divided by log(n+1) and log(n+1)^2.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .dyadic import TreeConfig
from .norms import bmo_mult, bmo_norm, bmo_para, bmo_so, sbmo, wbmo
from .sweep import sweep
from .symbol import column_embed, gaussian_symbol

ENSEMBLES = ("gaussian", "column_embed")
NORM_FIELDS = ("bmo_so", "bmo_para", "bmo_mult", "bmo_norm", "sbmo", "wbmo_lower", "sweep_so")


@dataclass
class ExperimentConfig:
    dims: list[int] = field(default_factory=lambda: [1, 2, 4, 8, 16])
    depth: int = 3
    seeds: int = 50
    ensemble: str = "gaussian"
    norms: list[str] | None = None
    output: str = "growth.csv"
    format: str = "csv"

    def __post_init__(self):
        if not self.dims:
            raise ValueError("dims must be nonempty")
        if min(self.dims) < 1:
            raise ValueError("every dim must be >= 1")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"ensemble must be one of {ENSEMBLES}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        bad = set(self.norms or ()) - set(NORM_FIELDS)
        if bad:
            raise ValueError(f"unknown norms {sorted(bad)}")


@dataclass
class GrowthRecord:
    n: int
    d: int
    seed: int
    bmo_so: float | None = None
    bmo_para: float | None = None
    bmo_mult: float | None = None
    bmo_norm: float | None = None
    sbmo: float | None = None
    wbmo_lower: float | None = None
    sweep_so: float | None = None
    ratio_para_over_so: float | None = None
    ratio_sweep_over_so_sq: float | None = None
    mainteo_ratio: float | None = None


FIELDS = tuple(f.name for f in fields(GrowthRecord))


def _ratio(a, b):
    if a is None or b is None or b == 0:
        return None
    return a / b


def make_symbol(ensemble: str, n: int, d: int, seed: int):
    cfg = TreeConfig(d, n)
    if ensemble == "column_embed":
        return column_embed(gaussian_symbol(cfg, seed, kind="vector"))
    return gaussian_symbol(cfg, seed)


def measure(ensemble: str, n: int, d: int, seed: int, wanted=None) -> GrowthRecord:
    wanted = set(NORM_FIELDS if wanted is None else wanted)
    B = make_symbol(ensemble, n, d, seed)
    rec = GrowthRecord(n, d, seed)
    fns = {"bmo_so": bmo_so, "bmo_para": bmo_para, "bmo_mult": bmo_mult,
           "bmo_norm": bmo_norm, "sbmo": sbmo, "wbmo_lower": wbmo}
    for name, fn in fns.items():
        if name in wanted:
            setattr(rec, name, fn(B).value)
    S = sweep(B).haar
    if "sweep_so" in wanted:
        rec.sweep_so = bmo_so(S).value
    rec.ratio_para_over_so = _ratio(rec.bmo_para, rec.bmo_so)
    if rec.sweep_so is not None and rec.bmo_so is not None:
        rec.ratio_sweep_over_so_sq = _ratio(rec.sweep_so, rec.bmo_so**2)
    if rec.bmo_para:
        s = rec.sbmo if rec.sbmo is not None else sbmo(B).value
        rec.mainteo_ratio = (bmo_mult(S).value + s**2) / rec.bmo_para**2
    return rec


def _measure_job(args):
    return measure(*args)


def workers() -> int:
    env = os.environ.get("OPBMO_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValueError(f"OPBMO_THREADS must be an integer, got {env!r}") from None
        return max(cap, 1)
    return os.cpu_count() or 1


def run_records(cfg: ExperimentConfig) -> list[GrowthRecord]:
    jobs = [(cfg.ensemble, n, cfg.depth, s, cfg.norms) for n in cfg.dims for s in range(cfg.seeds)]
    w = min(workers(), len(jobs))
    if w <= 1:
        return [_measure_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=w) as ex:
        return list(ex.map(_measure_job, jobs, chunksize=max(1, len(jobs) // (4 * w))))


SUMMARY_FIELDS = ("n", "d", "seeds",
                  "max_ratio_para_over_so", "mean_ratio_para_over_so",
                  "max_ratio_sweep_over_so_sq", "mean_ratio_sweep_over_so_sq",
                  "max_mainteo_ratio", "mean_mainteo_ratio",
                  "max_para_over_so_per_log", "max_sweep_over_so_sq_per_log", "max_sweep_over_so_sq_per_log2")


def summarize(records: list[GrowthRecord]) -> list[dict]:
    out = []
    for n in dict.fromkeys(r.n for r in records):
        rs = [r for r in records if r.n == n]
        row = {"n": n, "d": rs[0].d, "seeds": len(rs)}
        for key in ("ratio_para_over_so", "ratio_sweep_over_so_sq", "mainteo_ratio"):
            vals = [getattr(r, key) for r in rs if getattr(r, key) is not None]
            row[f"max_{key}"] = max(vals) if vals else None
            row[f"mean_{key}"] = math.fsum(vals) / len(vals) if vals else None
        lg = math.log(n + 1)
        pm, sm = row["max_ratio_para_over_so"], row["max_ratio_sweep_over_so_sq"]
        row["max_para_over_so_per_log"] = None if pm is None else pm / lg
        row["max_sweep_over_so_sq_per_log"] = None if sm is None else sm / lg
        row["max_sweep_over_so_sq_per_log2"] = None if sm is None else sm / lg**2
        out.append(row)
    return out


def trend_warnings(summary: list[dict]) -> list[str]:
    """Flag n values where the max sweep ratio drops below that of a smaller n."""
    msgs = []
    rows = sorted((r for r in summary if r["max_ratio_sweep_over_so_sq"] is not None), key=lambda r: r["n"])
    for a, b in zip(rows, rows[1:]):
        if b["max_ratio_sweep_over_so_sq"] < a["max_ratio_sweep_over_so_sq"]:
            msgs.append(f"max ratio_sweep_over_so_sq decreases from n={a['n']} to n={b['n']}")
    return msgs


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(rows: list[dict], header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(row[h]) for h in header])
    return buf.getvalue()


def summary_path(path: Path) -> Path:
    return path.with_name(path.stem + ".summary" + path.suffix)


def run_growth(cfg: ExperimentConfig) -> dict:
    """Compute, write both files, and return the summary plus trend warnings."""
    records = run_records(cfg)
    summary = summarize(records)
    rows = [asdict(r) for r in records]
    out = Path(cfg.output)
    if cfg.format == "csv":
        body, sbody = to_csv(rows, FIELDS), to_csv(summary, SUMMARY_FIELDS)
    else:
        body = json.dumps({"config": asdict(cfg), "records": rows}, indent=1) + "\n"
        sbody = json.dumps(summary, indent=1) + "\n"
    out.write_text(body, encoding="utf-8")
    summary_path(out).write_text(sbody, encoding="utf-8")
    msgs = trend_warnings(summary)
    for m in msgs:
        warnings.warn(m, stacklevel=2)
    return {"records": len(records), "output": str(out), "summary_file": str(summary_path(out)),
            "summary": summary, "warnings": msgs}
