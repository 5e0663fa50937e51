"""BMO-type norms of operator-valued step symbols.

Every oscillation norm is an exact finite computation over the dyadic
intervals of levels 0..d-1 (finer intervals see a constant symbol). The
weak norm is the one exception: its bilinear supremum is approximated from
below by alternating maximization and bracketed above by the strong norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dyadic import DyadicIndex, measures, strict_containment
from .operators import lambda_matrix, operator_norm, paraproduct_matrix
from .symbol import adjoint_symbol, as_haar, as_step, make_rng

KINDS = ("bmo_norm", "sbmo", "bmo_so", "wbmo", "bmo_mult", "bmo_para", "gram_sbmo")


@dataclass(frozen=True)
class Witness:
    interval: DyadicIndex
    e: np.ndarray | None = None
    f: np.ndarray | None = None

    def to_json(self) -> dict:
        out = {"level": self.interval.level, "pos": self.interval.position}
        for name in ("e", "f"):
            v = getattr(self, name)
            if v is not None:
                out[name] = [[float(z.real), float(z.imag)] for z in v]
        return out


@dataclass(frozen=True)
class NormReport:
    kind: str
    value: float
    exact: bool = True
    witness: Witness | None = None
    upper: float | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"value": self.value, "exact": self.exact,
               "witness": None if self.witness is None else self.witness.to_json()}
        if self.upper is not None:
            out["upper"] = self.upper
        return out


def _require_operator(S):
    if S.kind != "operator":
        raise ValueError(f"expected an operator-valued symbol, got {S.kind}")


def _oscillations(S):
    """Yield ``(level, X)`` with X[j, c] = B(c) - m_I B for the j-th interval of that level."""
    d = S.cfg.depth
    for k in range(d):
        block = S.cells.reshape((2**k, 2 ** (d - k)) + S.cells.shape[1:])
        yield k, block - block.mean(axis=1, keepdims=True)


def _argmax(values_by_level):
    best = (-1.0, None, None)
    for k, vals in values_by_level:
        j = int(np.argmax(vals))
        if vals[j] > best[0]:
            best = (float(vals[j]), k, j)
    return best


def bmo_norm(B) -> NormReport:
    """sup_I ((1/|I|) int_I ||B(t) - m_I B||^2 dt)^(1/2), operator norm per cell."""
    S = as_step(B)
    _require_operator(S)
    per_level = []
    for k, X in _oscillations(S):
        ops = np.linalg.norm(X, 2, axis=(-2, -1))
        per_level.append((k, np.sqrt(np.mean(ops**2, axis=1))))
    val, k, j = _argmax(per_level)
    return NormReport("bmo_norm", val, witness=Witness(DyadicIndex(k, j)))


def interval_bmo_norm(B, I: DyadicIndex) -> float:
    S = as_step(B)
    cells = S.cells[I.cell_slice(S.cfg.depth)]
    X = cells - cells.mean(axis=0)
    return float(np.sqrt(np.mean(np.linalg.norm(X, 2, axis=(-2, -1)) ** 2)))


def bmo_vector(b) -> float:
    """Dyadic BMO norm of a vector-valued (or scalar) symbol."""
    S = as_step(b)
    if S.kind == "operator":
        raise ValueError("bmo_vector takes vector or scalar symbols")
    d = S.cfg.depth
    best = 0.0
    for k in range(d):
        block = S.cells.reshape((2**k, 2 ** (d - k)) + S.cells.shape[1:])
        dev = np.abs(block - block.mean(axis=1, keepdims=True)) ** 2
        per = dev.reshape(2**k, -1).sum(axis=1) / 2 ** (d - k)
        best = max(best, float(np.sqrt(per.max())))
    return best


def _oscillation_grams(S):
    """Yield ``(level, G)`` with G[j] = (1/|I|) int_I (B - m_I B)*(B - m_I B)."""
    for k, X in _oscillations(S):
        yield k, np.einsum("jcpq,jcpr->jqr", X.conj(), X) / X.shape[1]


def sbmo(B) -> NormReport:
    """sup over I and unit e of ((1/|I|) int_I ||(B - m_I B) e||^2)^(1/2)."""
    S = as_step(B)
    _require_operator(S)
    best = (-1.0, None, None, None)
    for k, G in _oscillation_grams(S):
        w, V = np.linalg.eigh(G)
        j = int(np.argmax(w[:, -1]))
        if w[j, -1] > best[0]:
            best = (float(w[j, -1]), k, j, V[j, :, -1])
    lam, k, j, e = best
    return NormReport("sbmo", float(np.sqrt(max(lam, 0.0))), witness=Witness(DyadicIndex(k, j), e))


def interval_sbmo(B, I: DyadicIndex, e: np.ndarray) -> float:
    S = as_step(B)
    cells = S.cells[I.cell_slice(S.cfg.depth)]
    X = (cells - cells.mean(axis=0)) @ e
    return float(np.sqrt(np.mean(np.sum(np.abs(X) ** 2, axis=-1))))


def bmo_so(B) -> NormReport:
    S = as_step(B)
    a, b = sbmo(S), sbmo(adjoint_symbol(S))
    return NormReport("bmo_so", a.value + b.value, witness=a.witness,
                      extra={"sbmo": a.value, "sbmo_adjoint": b.value})


def interval_wbmo(B, I: DyadicIndex, e: np.ndarray, f: np.ndarray) -> float:
    S = as_step(B)
    cells = S.cells[I.cell_slice(S.cfg.depth)]
    vals = f.conj() @ (cells - cells.mean(axis=0)) @ e
    return float(np.sqrt(np.mean(np.abs(vals) ** 2)))


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _alternate(X, e0, tol, max_iter):
    """Alternating maximization of (1/K) sum_c |f* X_c e|^2 from each start in e0."""
    K = X.shape[0]
    e = e0
    prev = np.full(e.shape[0], -np.inf)
    for _ in range(max_iter):
        y = np.einsum("cpq,rq->rcp", X, e)
        Bm = np.einsum("rcp,rcs->rps", y, y.conj()) / K
        _, V = np.linalg.eigh(Bm)
        f = V[..., -1]
        z = np.einsum("cpq,rp->rcq", X, f.conj())
        Am = np.einsum("rcq,rcs->rqs", z.conj(), z) / K
        w, V = np.linalg.eigh(Am)
        e = V[..., -1]
        val = w[:, -1]
        if np.all(val - prev <= tol * val):
            break
        prev = val
    return np.maximum(val, 0.0), e, f


def wbmo(B, restarts: int = 8, tol: float = 1e-9, seed: int = 0, max_iter: int = 500) -> NormReport:
    """Heuristic lower bound for the weak norm, with the strong norm as upper bracket.

    Per interval: alternate e <-> f top-eigenvector updates from the strong-norm
    eigenvector plus ``restarts`` random unit starts (seeded), keep the best.
    """
    S = as_step(B)
    _require_operator(S)
    n = S.cfg.dim
    rng = make_rng(seed, 7)
    upper = sbmo(S)
    if n == 1:
        # scalars: the bilinear sup is the oscillation itself
        base = bmo_norm(S)
        one = np.ones(1, dtype=complex)
        return NormReport("wbmo", base.value, exact=False, witness=Witness(base.witness.interval, one, one),
                          upper=upper.value)
    best = (-1.0, None, None, None, None)
    for k, X in _oscillations(S):
        grams = np.einsum("jcpq,jcpr->jqr", X.conj(), X) / X.shape[1]
        _, Vg = np.linalg.eigh(grams)
        for j in range(X.shape[0]):
            starts = rng.standard_normal((restarts, n, 2))
            starts = _unit(np.concatenate([Vg[j, None, :, -1], starts[..., 0] + 1j * starts[..., 1]]))
            vals, es, fs = _alternate(X[j], starts, tol, max_iter)
            r = int(np.argmax(vals))
            if vals[r] > best[0]:
                best = (float(vals[r]), k, j, es[r], fs[r])
    lam, k, j, e, f = best
    value = min(float(np.sqrt(lam)), upper.value)
    return NormReport("wbmo", value, exact=False, witness=Witness(DyadicIndex(k, j), e, f), upper=upper.value)


def bmo_mult(B) -> NormReport:
    return NormReport("bmo_mult", operator_norm(lambda_matrix(as_haar(B))))


def bmo_para(B) -> NormReport:
    return NormReport("bmo_para", operator_norm(paraproduct_matrix(as_haar(B))))


def gram_values(B):
    """Eigen-decomposition of (1/|I|) sum_{J in I} B_J* B_J for every interval, bfs order."""
    H = as_haar(B)
    d = H.cfg.depth
    prods = np.conj(np.swapaxes(H.coeffs, -1, -2)) @ H.coeffs
    inside = strict_containment(d) | np.eye(H.cfg.n_intervals, dtype=bool)
    G = np.einsum("ij,jpq->ipq", inside.astype(float), prods) / measures(d)[:, None, None]
    return np.linalg.eigh(G)


def gram_sbmo(B) -> NormReport:
    """sup_I (1/|I|) ||sum_{J in I} B_J* B_J||; the square of the strong norm."""
    H = as_haar(B)
    _require_operator(H)
    w, V = gram_values(H)
    i = int(np.argmax(w[:, -1]))
    return NormReport("gram_sbmo", float(max(w[i, -1], 0.0)),
                      witness=Witness(DyadicIndex.from_bfs(i), V[i, :, -1]))


def all_norms(B) -> dict[str, NormReport]:
    S = as_step(B)
    return {
        "bmo_norm": bmo_norm(S),
        "sbmo": sbmo(S),
        "bmo_so": bmo_so(S),
        "wbmo": wbmo(S),
        "bmo_mult": bmo_mult(S),
        "bmo_para": bmo_para(S),
        "gram_sbmo": gram_sbmo(S),
    }
