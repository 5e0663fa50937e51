"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed in the terminal
summary (see conftest) and by ``python tests/test_acceptance.py``.
"""

import csv
import time

import numpy as np
import pytest

from opbmo import averaging, norms, operators, sweep
from opbmo.dyadic import TreeConfig
from opbmo.growth import ExperimentConfig, run_growth
from opbmo.suite import IDENTITIES, SuiteConfig, run_suite
from opbmo.symbol import HaarSymbol, as_haar, conjugate, gaussian_symbol

LINES: dict[int, str] = {}

DEPTHS, DIMS, SEEDS = [2, 3, 4], [1, 2, 4], 100


def record(num: int, title: str, ok: bool, detail: str):
    LINES[num] = f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}: {detail}"
    assert ok, LINES[num]


def _suite(checks, **kw):
    cfg = dict(depths=DEPTHS, dims=DIMS, seeds=SEEDS, checks=list(checks))
    cfg.update(kw)
    return run_suite(SuiteConfig(**cfg))


def _worst(rep):
    return ", ".join(f"{c['name']}={c['residual']:.1e}" for c in rep["checks"])


def _ensemble(depths=DEPTHS, dims=DIMS, seeds=SEEDS):
    for d in depths:
        for n in dims:
            for s in range(seeds):
                yield gaussian_symbol(TreeConfig(d, n), s)


def test_01_identity_suite():
    t0 = time.perf_counter()
    rep = _suite(IDENTITIES)
    dt = time.perf_counter() - t0
    record(1, "exact identity suite (<1e-9, 900 cases)", rep["passed"] and dt < 120,
           f"{_worst(rep)}; {dt:.1f}s")


def test_02_equipara_and_coefficient_bound():
    rep = _suite(["equipara", "coefficient_bound"])
    record(2, "four expressions for the paraproduct norm agree (rel 1e-7)", rep["passed"], _worst(rep))


def test_03_phi_norm():
    rep = _suite(["phi", "phi_so"], averaging_max_depth=4)
    record(3, "Phi_B norm equals sbmo; phi(B)+phi(B*) = bmo_so (1e-8)", rep["passed"], _worst(rep))


def test_04_sweep_as_average():
    t0 = time.perf_counter()
    worst = 0.0
    for B in _ensemble(depths=[1, 2, 3], seeds=20):
        mean, _ = averaging.sweep_average(B)
        worst = max(worst, float(np.abs(mean - sweep.sweep(B).step.cells).max()))
    z = -np.inf
    for n, seed in [(1, 0), (2, 1), (2, 2)]:
        B = gaussian_symbol(TreeConfig(4, n), seed)
        mean, se = averaging.sweep_average(B, "mc", 10_000, seed=seed)
        dev = mean - sweep.sweep(B).step.cells
        z = max(z, float(np.max(np.abs(dev.real) - 4 * se.real)), float(np.max(np.abs(dev.imag) - 4 * se.imag)))
    dt = time.perf_counter() - t0
    ok = worst < 1e-12 and z < 1e-12 and dt < 60
    record(4, "exact enumeration reproduces the sweep; MC within 4 stderr", ok,
           f"max cell deviation {worst:.1e}, MC excess over 4se {max(z, 0):.1e}; {dt:.1f}s")


def test_05_pythagoras():
    worst_res, worst_cross = 0.0, 0.0
    for i, B in enumerate(_ensemble(depths=[1, 2, 3], seeds=5)):
        rng = np.random.default_rng(i)
        n = B.cfg.dim
        f = rng.standard_normal(B.cfg.space_dim) + 1j * rng.standard_normal(B.cfg.space_dim)
        g = rng.standard_normal(B.cfg.space_dim) + 1j * rng.standard_normal(B.cfg.space_dim)
        f[:n] = g[:n] = 0
        r = averaging.pythagoras_check(B, f, g)
        worst_res = max(worst_res, r["full_residual"], r["lambda_residual"])
        worst_cross = max(worst_cross, r["cross_pi_gamma"], r["cross_gamma_delta"], r["cross_pi_delta"])
    record(5, "sigma-averaged Pythagoras and vanishing cross terms", worst_res < 1e-10 and worst_cross < 1e-12,
           f"residual {worst_res:.1e}, cross terms {worst_cross:.1e}")


def test_06_avchar():
    lo_ratio, hi_ratio, ok = np.inf, 0.0, True
    for B in _ensemble(depths=[2, 3], seeds=100):
        r = averaging.avchar_check(B)
        ok &= r["ok"]
        lo_ratio = min(lo_ratio, r["estimate"] / r["upper"])
        hi_ratio = max(hi_ratio, r["estimate"] / r["upper"])
    record(6, "(1/4)(|pi|+|Delta|)^2 <= E|T_sigma B|_mult^2 <= (|pi|+|Delta|)^2, exact mode", ok,
           f"E/(|pi|+|Delta|)^2 in [{lo_ratio:.3f}, {hi_ratio:.3f}]")


def test_07_delta_bounds():
    rep = _suite(["delta_strong", "delta_l1", "projected_sweep"], depths=[2, 3], seeds=25)
    record(7, "strong bound C=1, L1 display constant 2, four-way projection identity", rep["passed"], _worst(rep))


def test_08_norm_chain_and_unitary_invariance():
    rep = _suite(["norm_chain"], depths=[2, 3], seeds=25)
    worst = 0.0
    rng = np.random.default_rng(8)
    for B in _ensemble(depths=[2, 3], dims=[2, 4], seeds=5):
        n = B.cfg.dim
        q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        a, b = norms.all_norms(B), norms.all_norms(conjugate(B, q))
        worst = max(worst, max(abs(a[k].value - b[k].value) / (1 + a[k].value) for k in norms.KINDS))
    record(8, "wbmo <= sbmo <= bmo_norm, sbmo <= bmo_so; unitary invariance (1e-8)",
           rep["passed"] and worst < 1e-8, f"{_worst(rep)}, invariance {worst:.1e}")


@pytest.fixture(scope="module")
def growth_runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("growth")
    cfg = dict(dims=[1, 2, 4, 8, 16], depth=3, seeds=50)
    t0 = time.perf_counter()
    first = run_growth(ExperimentConfig(**cfg, output=str(base / "a.csv")))
    dt = time.perf_counter() - t0
    run_growth(ExperimentConfig(**cfg, output=str(base / "b.csv")))
    return base, first, dt


def test_09_mainteo_bracket(growth_runs):
    base, _, _ = growth_runs
    with open(base / "a.csv", newline="") as fh:
        ratios = [float(r["mainteo_ratio"]) for r in csv.DictReader(fh) if r["mainteo_ratio"]]
    ok = len(ratios) == 250 and all(0.125 <= r <= 8 for r in ratios)
    record(9, "mainteo ratio in [1/8, 8] on the golden ensemble (CSV emitted)", ok,
           f"{len(ratios)} ratios in [{min(ratios):.3f}, {max(ratios):.3f}]")


def test_10_bootstrap():
    worst, ok = 0.0, True
    for B in _ensemble(depths=[2, 3, 4], seeds=25):
        r = sweep.bootstrap_check(B)
        ok &= r["ok"]
        worst = max(worst, r["ratio"])
    record(10, "bmo_para <= 3 (c2 + sqrt(c2^2 + c1)) rho with measured constants", ok,
           f"max bmo_para / (C rho) = {worst:.3f}")


def test_11_growth_reproducible(growth_runs):
    base, first, dt = growth_runs
    same = all((base / f"a{s}.csv").read_bytes() == (base / f"b{s}.csv").read_bytes() for s in ("", ".summary"))
    trend = ", ".join(f"n={r['n']}: {r['max_ratio_sweep_over_so_sq']:.3f}" for r in first["summary"])
    record(11, "growth n in {1..16}, d=3, 50 seeds: byte-identical reruns, < 10 min", same and dt < 600,
           f"{dt:.1f}s per run; max sweep/so^2 {trend}")


def _flipped_avg_table(good):
    def table(depth):
        A = np.array(good(depth))
        A[:, 1:] *= -1  # h_J positive on the right half of J
        return A
    return table


def _row_sweep(B):
    B = as_haar(B)
    Bs = HaarSymbol(B.cfg, B.mean, np.conj(np.swapaxes(B.coeffs, -1, -2)))
    return sweep.bilinear_delta(Bs, Bs)  # B_I B_I* in place of B_I* B_I


def test_12_mutations(monkeypatch):
    small = dict(depths=[2, 3], dims=[1, 2], seeds=3)
    caught = {}
    with monkeypatch.context() as m:
        m.setattr(operators, "_avg_table", _flipped_avg_table(operators._avg_table))
        caught["I+/I- flip"] = _suite(IDENTITIES, **small)["failures"]
    with monkeypatch.context() as m:
        m.setattr(sweep, "sweep", _row_sweep)
        caught["adjoint placement in S_B"] = _suite(IDENTITIES, **small)["failures"]
    with monkeypatch.context() as m:
        m.setattr(operators, "delta_matrix", lambda B: operators.paraproduct_matrix(B).conj().T)
        caught["Delta as (pi_B)*"] = _suite(IDENTITIES, **small)["failures"]
    clean = _suite(IDENTITIES, **small)["passed"]
    ok = clean and all(caught.values())
    record(12, "each single mutation makes the identity suite fail", ok,
           "; ".join(f"{k} -> {','.join(v) or 'NOT CAUGHT'}" for k, v in caught.items()))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
