"""Verification suite: every identity and inequality check over an ensemble.

Each check reduces one symbol (or pair) to a nonnegative residual; a check
passes when the residual is strictly below its tolerance. Inequalities report
their excess ``max(0, lhs - rhs)`` scaled by ``1 + rhs``, so a tolerance of 0
fails even a correct build.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import averaging, norms, operators, sweep
from .dyadic import TreeConfig, measures
from .symbol import adjoint_symbol, gaussian_symbol, make_rng, to_step

# default tolerance per check
TOLERANCES = {
    "lambda_sum": 1e-9,
    "delta_adjoint": 1e-9,
    "lambda_adjoint": 1e-9,
    "multiplication_form": 1e-9,
    "decomposition": 1e-10,
    "sweep_identity": 1e-9,
    "product_identity": 1e-9,
    "equipara": 1e-7,
    "coefficient_bound": 1e-9,
    "mult_adjoint": 1e-10,
    "linf_bound": 1e-9,
    "dbf_bound": 1e-9,
    "isometry": 1e-12,
    "sweep_mean": 1e-10,
    "projected_sweep": 1e-11,
    "delta_strong": 1e-9,
    "delta_l1": 1e-9,
    "norm_chain": 1e-9,
    "gram_bracket": 1e-12,
    "sbmo_para": 1e-9,
    "mainteo_bracket": 1e-12,
    "bootstrap": 1e-12,
    "phi": 1e-8,
    "phi_so": 1e-8,
    "sweep_average": 1e-12,
    "pythagoras": 1e-10,
    "cross_terms": 1e-12,
    "avchar": 1e-12,
    "bmopara_l1": 1e-9,
}

IDENTITIES = ("lambda_sum", "delta_adjoint", "lambda_adjoint", "multiplication_form",
              "sweep_identity", "product_identity")
AVERAGING = ("phi", "phi_so", "sweep_average", "pythagoras", "cross_terms", "avchar", "bmopara_l1")


@dataclass
class SuiteConfig:
    depths: list[int] = field(default_factory=lambda: [2, 3])
    dims: list[int] = field(default_factory=lambda: [1, 2, 4])
    seeds: int = 25
    tolerance: float | None = None
    checks: list[str] | None = None
    averaging_max_depth: int = 3

    def __post_init__(self):
        if not self.depths or not self.dims:
            raise ValueError("depths and dims must be nonempty")
        if min(self.depths) < 1 or min(self.dims) < 1 or self.seeds < 1:
            raise ValueError("depth, dim and seeds must be >= 1")
        if self.tolerance is not None and self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")
        unknown = set(self.checks or ()) - set(TOLERANCES)
        if unknown:
            raise ValueError(f"unknown checks {sorted(unknown)}")


def _excess(lhs: float, rhs: float) -> float:
    return max(0.0, lhs - rhs) / (1.0 + abs(rhs))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _res(diff, scale):
    return sweep.scaled_residual(diff, scale)


def _operator_checks(B, F, rng, want) -> dict:
    cfg = B.cfg
    Bs = adjoint_symbol(B)
    P = operators.paraproduct_matrix(B)
    D = operators.delta_matrix(B)
    L = operators.lambda_matrix(B)
    Q = operators.mean_zero_projector(cfg)
    p, dn = operators.operator_norm(P), operators.operator_norm(D)
    lam = operators.operator_norm(L)
    out = {}
    if want("lambda_sum"):
        out["lambda_sum"] = _res(operators.lambda_multiplier_matrix(B) - P - D, p + dn)
    if want("delta_adjoint"):
        out["delta_adjoint"] = _res(D - operators.paraproduct_matrix(Bs).conj().T, dn)
    if want("lambda_adjoint"):
        out["lambda_adjoint"] = _res(operators.lambda_matrix(Bs) - L.conj().T, lam)
    sup = float(np.linalg.norm(to_step(B).cells, 2, axis=(-2, -1)).max())
    if want("multiplication_form") or want("decomposition"):
        M = operators.multiplication_matrix(B)
        G = operators.gamma_matrix(B)
        out["multiplication_form"] = _res((L - (M - G)) @ Q, lam + sup)
        out["decomposition"] = _res((M - P - D - G) @ Q, sup + p + dn)
    if want("sweep_identity"):
        out["sweep_identity"] = sweep.verify_sweep_identity(B)
    if want("product_identity") or want("dbf_bound"):
        prod = sweep.verify_product_identity(B, F)
        out["product_identity"] = prod["residual"]
        out["dbf_bound"] = _excess(prod["d_norm"], prod["d_bound"])
    if want("equipara"):
        fams = operators.equipara_families(B)
        vals = [operators.operator_norm(operators.multiplier_matrix(f)) for f in fams]
        vals[2] = math.sqrt(vals[2])
        out["equipara"] = max(abs(v - p) for v in vals) / max(p, 1e-300)
    if want("coefficient_bound"):
        coeff_norms = np.linalg.norm(B.coeffs, 2, axis=(-2, -1))
        out["coefficient_bound"] = max(_excess(float(c), p * math.sqrt(m))
                                       for c, m in zip(coeff_norms, measures(cfg.depth)))
    if want("mult_adjoint"):
        out["mult_adjoint"] = _rel(lam, operators.operator_norm(operators.lambda_matrix(Bs)))
    if want("linf_bound"):
        out["linf_bound"] = _excess(lam, 2 * sup)
    if want("isometry"):
        signs = averaging.sign_patterns(cfg, "mc", samples=4, seed=int(rng.integers(2**31)))
        f = rng.standard_normal(cfg.space_dim) + 1j * rng.standard_normal(cfg.space_dim)
        out["isometry"] = max(abs(np.linalg.norm(operators.martingale_matrix(averaging.SigmaSign(cfg, s)) @ f)
                                  - np.linalg.norm(f)) / np.linalg.norm(f) for s in signs)
    return out


def _sweep_checks(B, F, rng, want) -> dict:
    out = {}
    if want("sweep_mean"):
        S = sweep.sweep(B)
        total = (np.conj(np.swapaxes(B.coeffs, -1, -2)) @ B.coeffs).sum(axis=0)
        out["sweep_mean"] = _res(S.haar.mean - total, float(np.linalg.norm(total)))
    if want("projected_sweep"):
        out["projected_sweep"] = max(sweep.projected_sweep_check(B, F, I) for I, _ in B.items())
    if want("delta_strong") or want("delta_l1"):
        md = sweep.maindelta_checks(B, F, seed=int(rng.integers(2**31)))
        out["delta_strong"] = _excess(md["iii_lhs"], md["iii_rhs"])
        out["delta_l1"] = 0.0 if md["ii_ok"] else max(md["ii_core_ratio"], md["ii_normalized_ratio"]) - 1.0
    if want("norm_chain") or want("gram_bracket") or want("sbmo_para"):
        rep = norms.all_norms(B)
        w, s, bn, so = rep["wbmo"].value, rep["sbmo"].value, rep["bmo_norm"].value, rep["bmo_so"].value
        out["norm_chain"] = max(_excess(w, s), _excess(s, bn), _excess(s, so))
        g = rep["gram_sbmo"].value
        ratio = s**2 / g if g > 0 else 1.0
        out["gram_bracket"] = 0.0 if 0.25 <= ratio <= 4.0 else abs(math.log(ratio))
        out["sbmo_para"] = _excess(s, 2 * rep["bmo_para"].value)
    if want("mainteo_bracket"):
        try:
            r = sweep.mainteo_ratio(B)
            out["mainteo_bracket"] = 0.0 if 0.125 <= r <= 8.0 else abs(math.log(r / 8 if r > 8 else 8 * r))
        except sweep.UndefinedRatioError:
            out["mainteo_bracket"] = 0.0
    if want("bootstrap"):
        bs = sweep.bootstrap_check(B)
        out["bootstrap"] = 0.0 if bs["ok"] else _excess(bs["bmo_para"], 3 * bs["C"] * bs["rho"])
    return out


def _averaging_checks(B, F, rng, want) -> dict:
    out = {}
    if want("phi"):
        s = norms.sbmo(B).value
        out["phi"] = max(abs(averaging.phi_norm_closed(B) - s), abs(averaging.phi_norm_direct(B) - s))
    if want("phi_so"):
        a, b = averaging.so_from_phi(B)
        out["phi_so"] = abs(a - b)
    if want("sweep_average"):
        mean, _ = averaging.sweep_average(B)
        out["sweep_average"] = float(np.abs(mean - sweep.sweep(B).step.cells).max())
    if want("pythagoras") or want("cross_terms"):
        n = B.cfg.dim
        f = rng.standard_normal(B.cfg.space_dim) + 1j * rng.standard_normal(B.cfg.space_dim)
        g = rng.standard_normal(B.cfg.space_dim) + 1j * rng.standard_normal(B.cfg.space_dim)
        f[:n] = 0
        g[:n] = 0
        py = averaging.pythagoras_check(B, f, g)
        out["pythagoras"] = max(py["full_residual"], py["lambda_residual"])
        out["cross_terms"] = max(py["cross_pi_gamma"], py["cross_gamma_delta"], py["cross_pi_delta"])
    if want("avchar"):
        av = averaging.avchar_check(B)
        out["avchar"] = max(_excess(av["lower"], av["estimate"]), _excess(av["estimate"], av["upper"]))
    if want("bmopara_l1"):
        bp = averaging.bmopara_check(B)
        out["bmopara_l1"] = 0.0 if bp["l1_ok"] else bp["l1_worst_ratio"] - 1.0
    return out


def check_symbol(B, F, seed: int = 0, averaging_ok: bool = True, checks=None) -> dict:
    """Residuals for one symbol pair, keyed by check name (all checks when ``checks`` is None)."""
    rng = make_rng(seed, 5)
    wanted = set(TOLERANCES if checks is None else checks)

    def want(name):
        return name in wanted

    out = {}
    out.update(_operator_checks(B, F, rng, want))
    out.update(_sweep_checks(B, F, rng, want))
    if averaging_ok:
        out.update(_averaging_checks(B, F, rng, want))
    return {k: v for k, v in out.items() if k in wanted}


def run_suite(cfg: SuiteConfig) -> dict:
    """Run the suite and return a JSON-ready report.

    The per-check entry keeps the largest residual over all cases and the
    case that produced it.
    """
    t0 = time.perf_counter()
    worst: dict[str, tuple[float, dict]] = {}
    cases = 0
    for d in cfg.depths:
        for n in cfg.dims:
            tc = TreeConfig(d, n)
            for seed in range(cfg.seeds):
                B = gaussian_symbol(tc, seed, stream=0)
                F = gaussian_symbol(tc, seed, stream=1)
                res = check_symbol(B, F, seed, averaging_ok=d <= cfg.averaging_max_depth, checks=cfg.checks)
                cases += 1
                for name, val in res.items():
                    val = float(val)
                    if name not in worst or not val <= worst[name][0]:
                        worst[name] = (val, {"n": n, "d": d, "seed": seed})
    checks = []
    for name in TOLERANCES:
        if name not in worst:
            continue
        tol = TOLERANCES[name] if cfg.tolerance is None else cfg.tolerance
        val, case = worst[name]
        checks.append({"name": name, "residual": val, "tolerance": tol,
                       "passed": bool(val < tol), "worst_case": case})
    failures = [c["name"] for c in checks if not c["passed"]]
    return {
        "config": asdict(cfg),
        "cases": cases,
        "passed": not failures,
        "failures": failures,
        "checks": checks,
        "seconds": round(time.perf_counter() - t0, 3),
    }
