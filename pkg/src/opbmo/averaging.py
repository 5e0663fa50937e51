"""Averages over martingale transforms, sign patterns sigma in {-1, 1}^D.

Exact mode enumerates all 2^(2^d - 1) sign patterns (allowed while
2^d - 1 <= 20); Monte Carlo mode draws i.i.d. uniform patterns from a seeded
PCG64 stream. Pattern k of the enumeration gives interval i (bfs) the sign
``-1`` when bit i of k is set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyadic import TreeConfig, basis_matrix
from .norms import bmo_mult, bmo_norm, gram_values, sbmo
from .operators import (
    NumericError,
    delta_matrix,
    gamma_matrix,
    lambda_matrix,
    multiplication_matrix,
    operator_norm,
    paraproduct_matrix,
)
from .symbol import HaarSymbol, StepSymbol, adjoint_symbol, as_haar, make_rng, to_step
from .sweep import _projected_step, sweep

ENUM_GUARD = 20
CHUNK = 4096


class EnumerationGuardError(ValueError):
    """Exact enumeration requested beyond the guard; use Monte Carlo."""


@dataclass(frozen=True, eq=False)
class SigmaSign:
    cfg: TreeConfig
    signs: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.signs, dtype=np.int8)
        if s.shape != (self.cfg.n_intervals,) or not np.all(np.abs(s) == 1):
            raise ValueError("a sign pattern needs one +-1 per interval")
        s.setflags(write=False)
        object.__setattr__(self, "signs", s)

    def __mul__(self, other: "SigmaSign") -> "SigmaSign":
        return SigmaSign(self.cfg, self.signs * other.signs)


@dataclass(frozen=True)
class AverageEstimate:
    value: float
    mode: str
    samples: int
    stderr: float = 0.0

    def to_json(self) -> dict:
        return {"estimate": self.value, "mode": self.mode, "samples": self.samples, "stderr": self.stderr}


def _guard(cfg: TreeConfig):
    if cfg.n_intervals > ENUM_GUARD:
        raise EnumerationGuardError(
            f"{2 ** cfg.n_intervals} sign patterns at depth {cfg.depth}; use Monte Carlo")


def sign_patterns(cfg: TreeConfig, mode: str = "exact", samples: int = 10_000, seed: int = 0) -> np.ndarray:
    """All (or sampled) sign patterns as a ``(count, 2^d - 1)`` float array."""
    m = cfg.n_intervals
    if mode == "exact":
        _guard(cfg)
        k = np.arange(2**m, dtype=np.int64)[:, None]
        bits = (k >> np.arange(m)) & 1
        return 1.0 - 2.0 * bits
    if mode in ("mc", "monte_carlo"):
        if samples < 1:
            raise ValueError("need at least one sample")
        return 1.0 - 2.0 * make_rng(seed, 3).integers(0, 2, size=(samples, m))
    raise ValueError(f"unknown mode {mode!r}")


def enumerate_sigmas(cfg: TreeConfig):
    for row in sign_patterns(cfg, "exact"):
        yield SigmaSign(cfg, row)


def sample_sigmas(cfg: TreeConfig, seed: int, count: int):
    for row in sign_patterns(cfg, "mc", samples=count, seed=seed):
        yield SigmaSign(cfg, row)


def martingale_transform(B, sigma) -> HaarSymbol:
    """T_sigma B: coefficient B_I multiplied by sigma_I, mean unchanged."""
    H = as_haar(B)
    signs = np.asarray(getattr(sigma, "signs", sigma), dtype=float)
    return H.with_coeffs(H.coeffs * signs.reshape((-1,) + (1,) * len(H.value_shape)))


def sweep_average(B, mode: str = "exact", samples: int = 10_000, seed: int = 0):
    """Cell-wise mean and standard error of (T_sigma B)*(T_sigma B) over sigma.

    Uses the mean-zero part of B. The standard error is returned as a complex
    array holding the real- and imaginary-part errors separately.
    """
    H = as_haar(B)
    if H.kind != "operator":
        raise ValueError("sweep averages need an operator-valued symbol")
    signs = sign_patterns(H.cfg, mode, samples, seed)
    hv = basis_matrix(H.cfg.depth)[1:]
    total = np.zeros((H.cfg.n_cells,) + H.value_shape, dtype=complex)
    sq_re = np.zeros(total.shape)
    sq_im = np.zeros(total.shape)
    count = signs.shape[0]
    for start in range(0, count, CHUNK):
        s = signs[start:start + CHUNK]
        vals = np.einsum("si,ic,ipq->scpq", s, hv, H.coeffs)
        prods = np.conj(np.swapaxes(vals, -1, -2)) @ vals
        total += prods.sum(axis=0)
        if mode != "exact":
            sq_re += (prods.real**2).sum(axis=0)
            sq_im += (prods.imag**2).sum(axis=0)
    mean = total / count
    if mode == "exact":
        return mean, np.zeros_like(mean)
    var_re = np.maximum(sq_re / count - mean.real**2, 0) * count / max(count - 1, 1)
    var_im = np.maximum(sq_im / count - mean.imag**2, 0) * count / max(count - 1, 1)
    return mean, (np.sqrt(var_re) + 1j * np.sqrt(var_im)) / np.sqrt(count)


def sweep_from_average(B, mode: str = "exact", samples: int = 10_000, seed: int = 0) -> StepSymbol:
    mean, _ = sweep_average(B, mode, samples, seed)
    return StepSymbol(as_haar(B).cfg, mean)


_NORMS = {"bmo_norm": lambda S: bmo_norm(S).value, "bmo_mult": lambda S: bmo_mult(S).value}


def averaged_norm_sq(B, kind: str, mode: str = "exact", samples: int = 10_000, seed: int = 0) -> AverageEstimate:
    """E_sigma ||T_sigma B||^2 in the norm ``kind`` (bmo_norm or bmo_mult)."""
    if kind not in _NORMS:
        raise ValueError(f"kind must be one of {sorted(_NORMS)}")
    H = as_haar(B)
    norm = _NORMS[kind]
    signs = sign_patterns(H.cfg, mode, samples, seed)
    vals = np.array([norm(martingale_transform(H, s)) ** 2 for s in signs])
    if mode == "exact":
        return AverageEstimate(float(vals.mean()), "exact", len(vals))
    se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else float("inf")
    return AverageEstimate(float(vals.mean()), "monte_carlo", len(vals), se)


def phi_norm_closed(B) -> float:
    """sup over I and unit e of |I|^(-1/2) ||P_I B_e||, from the Gram sums."""
    w, _ = gram_values(B)
    return float(np.sqrt(max(w[:, -1].max(), 0.0)))


def phi_norm_direct(B) -> float:
    """||f -> Lambda_B T_sigma f|| as a map into L^2(T x Sigma).

    Averaging T_sigma G T_sigma over sigma keeps exactly the diagonal blocks of
    G = Lambda_B* Lambda_B, so the norm squared is the largest eigenvalue among
    those blocks.
    """
    H = as_haar(B)
    L = lambda_matrix(H)
    G = L.conj().T @ L
    n = H.cfg.dim
    N = H.cfg.n_cells
    blocks = G.reshape(N, n, N, n)[np.arange(N), :, np.arange(N), :]
    return float(np.sqrt(max(np.linalg.eigvalsh(blocks)[:, -1].max(), 0.0)))


def phi_norm_enumerated(B) -> float:
    """Same norm with the sigma-average formed by explicit enumeration."""
    H = as_haar(B)
    L = lambda_matrix(H)
    G = L.conj().T @ L
    n = H.cfg.dim
    acc = np.zeros_like(G)
    signs = sign_patterns(H.cfg, "exact")
    for s in signs:
        t = np.repeat(np.concatenate([[1.0], s]), n)
        acc += t[:, None] * G * t[None, :]
    acc /= len(signs)
    return float(np.sqrt(max(np.linalg.eigvalsh(acc)[-1], 0.0)))


def phi_norm(B, tol: float = 1e-8) -> float:
    a, b = phi_norm_closed(B), phi_norm_direct(B)
    if abs(a - b) > tol * max(1.0, a):
        raise NumericError(f"Phi_B norm routes disagree: {a} vs {b}")
    return a


def _sup_norm(H: HaarSymbol) -> float:
    cells = to_step(H).cells
    return float(np.linalg.norm(cells, 2, axis=(-2, -1)).max())


def pythagoras_check(B, f: np.ndarray, g: np.ndarray | None = None) -> dict:
    """sigma-averaged energy splitting of B f into paraproduct, Delta and gamma parts.

    Both splittings (with and without the gamma part) are returned as scaled
    residuals, together with the absolute sigma-averaged cross terms
    <pi f, gamma g>, <gamma f, Delta g>, <pi f, Delta g>.
    """
    H = as_haar(B).zero_mean()
    n = H.cfg.dim
    f = np.asarray(f, dtype=complex)
    g = f if g is None else np.asarray(g, dtype=complex)
    if np.any(f[:n] != 0) or np.any(g[:n] != 0):
        raise ValueError("inputs must be mean-zero")
    signs = sign_patterns(H.cfg, "exact")
    acc = dict.fromkeys(["Bf", "pi", "delta", "gamma", "lam", "pi_gamma", "gamma_delta", "pi_delta"], 0.0)
    for s in signs:
        T = martingale_transform(H, s)
        P, D, G = paraproduct_matrix(T), delta_matrix(T), gamma_matrix(T)
        Bf = multiplication_matrix(T) @ f
        pf, df, gf = P @ f, D @ f, G @ f
        acc["Bf"] += np.vdot(Bf, Bf).real
        acc["pi"] += np.vdot(pf, pf).real
        acc["delta"] += np.vdot(df, df).real
        acc["gamma"] += np.vdot(gf, gf).real
        lf = lambda_matrix(T) @ f
        acc["lam"] += np.vdot(lf, lf).real
        acc["pi_gamma"] += np.vdot(G @ g, pf)
        acc["gamma_delta"] += np.vdot(D @ g, gf)
        acc["pi_delta"] += np.vdot(D @ g, pf)
    k = len(signs)
    acc = {key: v / k for key, v in acc.items()}
    scale = 1.0 + np.vdot(f, f).real * _sup_norm(H) ** 2
    return {
        "full_residual": abs(acc["Bf"] - acc["pi"] - acc["delta"] - acc["gamma"]) / scale,
        "lambda_residual": abs(acc["lam"] - acc["pi"] - acc["delta"]) / scale,
        "cross_pi_gamma": float(abs(acc["pi_gamma"])),
        "cross_gamma_delta": float(abs(acc["gamma_delta"])),
        "cross_pi_delta": float(abs(acc["pi_delta"])),
        "energies": {key: float(np.real(acc[key])) for key in ("Bf", "pi", "delta", "gamma", "lam")},
    }


def avchar_check(B, mode: str = "exact", samples: int = 10_000, seed: int = 0) -> dict:
    """(1/4)(||pi_B|| + ||Delta_B||)^2 <= E ||T_sigma B||_mult^2 <= (||pi_B|| + ||Delta_B||)^2."""
    H = as_haar(B)
    p = operator_norm(paraproduct_matrix(H))
    d = operator_norm(delta_matrix(H))
    est = averaged_norm_sq(H, "bmo_mult", mode, samples, seed)
    lo, hi = 0.25 * (p + d) ** 2, (p + d) ** 2
    slack = 1e-12 * (1 + hi)
    return {"estimate": est.value, "stderr": est.stderr, "lower": lo, "upper": hi,
            "ok": bool(lo - slack <= est.value <= hi + slack)}


def bmopara_check(B, mode: str = "exact", samples: int = 10_000, seed: int = 0, policy: float = 8.0) -> dict:
    """Oscillation of the sweep against the averaged norms of martingale transforms.

    Exact part: ||P_I S_B||_L1 <= 2|I| E ||T_sigma B||^2_norm for every I.
    Policy part: bmo_norm(S_B) <= policy * E ||T_sigma B||^2_norm.
    """
    H = as_haar(B)
    est = averaged_norm_sq(H, "bmo_norm", mode, samples, seed)
    S = sweep(H).step
    w = H.cfg.cell_weight
    worst = 0.0
    ok = True
    for I, _ in H.items():
        l1 = float(w * np.linalg.norm(_projected_step(S, I), 2, axis=(-2, -1)).sum())
        rhs = 2 * I.measure * est.value
        ok &= l1 <= rhs * (1 + 1e-9) + 1e-12
        if rhs > 0:
            worst = max(worst, l1 / rhs)
    sweep_norm = bmo_norm(S).value
    ratio = sweep_norm / est.value if est.value > 0 else 0.0
    return {"average": est.value, "stderr": est.stderr, "l1_worst_ratio": worst, "l1_ok": bool(ok),
            "sweep_bmo_norm": sweep_norm, "policy_ratio": ratio, "policy_ok": bool(ratio <= policy)}


def so_from_phi(B) -> tuple[float, float]:
    """(phi(B) + phi(B*), bmo_so(B)) for comparison."""
    H = as_haar(B)
    S = to_step(H)
    return phi_norm(H) + phi_norm(adjoint_symbol(H)), sbmo(S).value + sbmo(adjoint_symbol(S)).value
