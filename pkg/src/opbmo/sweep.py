"""Sweeps, the sesquilinear map Delta(B, F), and checks of the product identities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dyadic import DyadicIndex, check_same, indicator_matrix, measures
from .norms import bmo_mult, bmo_para, bmo_so, sbmo
from .operators import (
    dbf_matrix,
    lambda_matrix,
    mean_zero_projector,
    operator_norm,
    paraproduct_matrix,
)
from .symbol import HaarSymbol, StepSymbol, as_haar, as_step, make_rng, project, to_haar


class UndefinedRatioError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SweepResult:
    """A sweep-type symbol in both forms.

    The sweep of a depth-d symbol is constant on cells of level d-1, so its
    Haar coefficients vanish from level d-1 on.
    """

    step: StepSymbol
    haar: HaarSymbol


def scaled_residual(diff: np.ndarray, scale: float = 0.0) -> float:
    return float(np.linalg.norm(diff) / (1.0 + scale))


def bilinear_delta(B, F) -> SweepResult:
    """Delta(B, F) = sum_I B_I* F_I chi_I/|I|."""
    B, F = as_haar(B), as_haar(F)
    cfg = check_same(B.cfg, F.cfg)
    prods = np.conj(np.swapaxes(B.coeffs, -1, -2)) @ F.coeffs
    weights = indicator_matrix(cfg.depth) / measures(cfg.depth)[:, None]
    step = StepSymbol(cfg, np.tensordot(weights.T, prods, axes=(1, 0)))
    return SweepResult(step, to_haar(step))


def sweep(B) -> SweepResult:
    """S_B = sum_I B_I* B_I chi_I/|I|."""
    return bilinear_delta(B, B)


def iterated_sweep(B, m: int) -> SweepResult:
    if m < 0:
        raise ValueError("iteration count must be >= 0")
    H = as_haar(B)
    out = SweepResult(as_step(B), H)
    for _ in range(m):
        out = sweep(out.haar)
    return out


def _projected_step(S: StepSymbol, I: DyadicIndex) -> np.ndarray:
    """(S - m_I S) chi_I, cell values."""
    out = np.zeros_like(S.cells)
    sl = I.cell_slice(S.cfg.depth)
    out[sl] = S.cells[sl] - S.cells[sl].mean(axis=0)
    return out


def _partial_delta(B: HaarSymbol, F: HaarSymbol, I: DyadicIndex, strict: bool) -> StepSymbol:
    cfg = B.cfg
    cells = np.zeros((cfg.n_cells,) + B.value_shape, dtype=complex)
    for J, bj in B.items():
        if I.contains(J) and not (strict and J == I):
            cells[J.cell_slice(cfg.depth)] += (bj.conj().T @ F.coeff(J)) / J.measure
    return StepSymbol(cfg, cells)


def projected_sweep_check(B, F, I: DyadicIndex) -> float:
    """Largest deviation among the equal projections of Delta(B, F) onto I.

    Compares P_I Delta(B,F), P_I Delta(B, P_I F), P_I of the partial sums over
    J inside I (with and without J = I), and P_I S_B against P_I S_{P_I B} and
    P_I S_{(P_{I+} + P_{I-})B}. Scaled by 1 + ||B|| ||F||.
    """
    B, F = as_haar(B), as_haar(F)
    check_same(B.cfg, F.cfg)
    ref = _projected_step(bilinear_delta(B, F).step, I)
    others = [
        _projected_step(bilinear_delta(B, project(F, I)).step, I),
        _projected_step(_partial_delta(B, F, I, strict=False), I),
        _projected_step(_partial_delta(B, F, I, strict=True), I),
    ]
    sref = _projected_step(sweep(B).step, I)
    sothers = [_projected_step(sweep(project(B, I)).step, I)]
    if I.level + 1 < B.cfg.depth:
        halves = project(B, I.plus) + project(B, I.minus)
    else:
        halves = project(B, I) * 0.0
    sothers.append(_projected_step(sweep(halves).step, I))
    scale = math.sqrt(B.l2_norm_sq() * F.l2_norm_sq())
    res = [scaled_residual(o - ref, scale) for o in others]
    res += [scaled_residual(o - sref, B.l2_norm_sq()) for o in sothers]
    return max(res)


def verify_product_identity(B, F) -> dict:
    """pi_B* pi_F = Lambda_{Delta(B,F)} + D_{B,F} on the mean-zero subspace.

    Returns the scaled residual and the comparison of ||D_{B,F}|| with
    sbmo(B) sbmo(F).
    """
    B, F = as_haar(B), as_haar(F)
    cfg = check_same(B.cfg, F.cfg)
    PB, PF = paraproduct_matrix(B), paraproduct_matrix(F)
    D = dbf_matrix(B, F)
    L = lambda_matrix(bilinear_delta(B, F).haar)
    Q = mean_zero_projector(cfg)
    nb, nf = operator_norm(PB), operator_norm(PF)
    resid = scaled_residual((PB.conj().T @ PF - L - D) @ Q, nb * nf)
    d_norm = operator_norm(D)
    d_bound = sbmo(B).value * sbmo(F).value
    return {"residual": resid, "d_norm": d_norm, "d_bound": d_bound,
            "d_bound_ok": d_norm <= d_bound * (1 + 1e-7) + 1e-12}


def verify_sweep_identity(B) -> float:
    """Scaled residual of pi_B* pi_B - Lambda_{S_B} - D_B on the mean-zero subspace."""
    B = as_haar(B)
    P = paraproduct_matrix(B)
    diff = (P.conj().T @ P - lambda_matrix(sweep(B).haar) - dbf_matrix(B)) @ mean_zero_projector(B.cfg)
    return scaled_residual(diff, operator_norm(P) ** 2)


def rho(B, N: int | None = None) -> float:
    """max over 0 <= k <= min(N, d) of sbmo(S^(k)_B)^(1/2^k); later iterates vanish."""
    H = as_haar(B)
    top = H.cfg.depth if N is None else min(N, H.cfg.depth)
    best = 0.0
    cur = SweepResult(as_step(H), H)
    for k in range(top + 1):
        if k:
            cur = sweep(cur.haar)
        best = max(best, sbmo(cur.step).value ** (1.0 / 2**k))
    return best


def mainteo_ratio(B) -> float:
    """(||S_B||_mult + sbmo(B)^2) / ||pi_B||^2."""
    para = bmo_para(B).value
    if para == 0:
        raise UndefinedRatioError("paraproduct norm is zero")
    return (bmo_mult(sweep(B).haar).value + sbmo(B).value ** 2) / para**2


def _unit_vectors(n: int, rng, count: int) -> np.ndarray:
    raw = rng.standard_normal((count, n, 2))
    v = raw[..., 0] + 1j * raw[..., 1]
    return np.concatenate([np.eye(n, dtype=complex), v / np.linalg.norm(v, axis=-1, keepdims=True)])


def maindelta_checks(B, F, n_random: int = 4, seed: int = 0) -> dict:
    """Bounds on Delta(B, F) with the constants the direct estimates give.

    * strong norm: sbmo(Delta(B,F)) <= ||pi_B|| sbmo(F)  (C = 1);
    * L^1 core of the weak estimate: for every I and test vectors e, f,
      ||<P_I Delta(B,F) e, f>||_L1 <= 2 ||P_I B_f|| ||P_I F_e||, hence
      <= 2|I| sbmo(B) sbmo(F);
    * multiplier norm: ||Delta(B,F)||_mult <= 8 ||pi_B|| ||pi_F||  (policy constant).
    """
    B, F = as_haar(B), as_haar(F)
    cfg = check_same(B.cfg, F.cfg)
    Dl = bilinear_delta(B, F)
    para_b = operator_norm(paraproduct_matrix(B))
    para_f = operator_norm(paraproduct_matrix(F))
    sb, sf = sbmo(B).value, sbmo(F).value
    s_delta = sbmo(Dl.step).value

    vecs = _unit_vectors(cfg.dim, make_rng(seed, 11), n_random)
    w = cfg.cell_weight
    worst_core, worst_norm, ok = 0.0, 0.0, True
    for I, _ in B.items():
        P = _projected_step(Dl.step, I)
        PB = project(B, I).coeffs
        PF = project(F, I).coeffs
        for e in vecs:
            pfe = float(np.sqrt(np.sum(np.abs(PF @ e) ** 2)))
            for f in vecs:
                l1 = float(w * np.sum(np.abs(f.conj() @ P @ e)))
                core = 2 * float(np.sqrt(np.sum(np.abs(PB @ f) ** 2))) * pfe
                normalized = 2 * I.measure * sb * sf
                ok &= l1 <= core * (1 + 1e-9) + 1e-12 and l1 <= normalized * (1 + 1e-9) + 1e-12
                if core > 0:
                    worst_core = max(worst_core, l1 / core)
                if normalized > 0:
                    worst_norm = max(worst_norm, l1 / normalized)
    mult = bmo_mult(Dl.haar).value
    return {
        "iii_lhs": s_delta,
        "iii_rhs": para_b * sf,
        "iii_ok": bool(s_delta <= para_b * sf * (1 + 1e-9) + 1e-12),
        "ii_core_ratio": worst_core,
        "ii_normalized_ratio": worst_norm,
        "ii_ok": bool(ok),
        "i_ratio": mult / (para_b * para_f) if para_b * para_f > 0 else 0.0,
        "i_ok": bool(mult <= 8 * para_b * para_f + 1e-12),
    }


def bootstrap_check(B, factor: float = 3.0) -> dict:
    """Reconstruct the bootstrap bound for one symbol from its measured constants.

    c1 = ||B||_so / rho(B), c2 = rho(S_B) / rho(B)^2, C = c2 + sqrt(c2^2 + c1);
    asserts ||pi_B|| <= factor * C * rho(B). The same bound with the strong norm
    in place of the so-norm, and with c1^2 under the root, is logged alongside.
    """
    H = as_haar(B)
    r = rho(H)
    para = operator_norm(paraproduct_matrix(H))
    if r == 0:
        return {"rho": 0.0, "bmo_para": para, "ok": para == 0}
    so = bmo_so(H).value
    c1 = so / r
    c1_sbmo = sbmo(H).value / r
    c2 = rho(sweep(H).haar) / r**2

    def bound(c1_):
        return c2 + math.sqrt(c2**2 + c1_)

    C = bound(c1)
    return {
        "rho": r, "bmo_para": para, "c1": c1, "c1_sbmo": c1_sbmo, "c2": c2,
        "C": C, "C_sbmo": bound(c1_sbmo), "C_squared_c1": bound(c1**2),
        "ratio": para / (C * r),
        "ok": para <= factor * C * r * (1 + 1e-12),
    }
