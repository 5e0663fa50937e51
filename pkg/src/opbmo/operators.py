"""Dense matrices of the dyadic operators on the discretized L^2(T, C^n).

Coordinates are block-major: block 0 is the constant chi_T, block ``1 + I.bfs``
is h_I, and each block holds the ``n`` vector components, so the coordinate
of ``h_I (x) e_k`` is ``(1 + I.bfs) * n + k``. Operators are returned as plain
complex ndarrays in these coordinates.

Operators built from a symbol use only its Haar coefficients (the mean is
ignored), except the multiplication operator which uses the full values.
Vector or scalar symbols are treated as ``n x 1`` or ``1 x 1`` matrices, which
gives the scalar-input paraproduct of a vector symbol.

The constant mode behaves like a Haar function of a virtual parent of T:
``m_I chi_T = 1`` feeds the paraproduct, and Haar multiplier families may
carry a ``root`` function acting on it.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dyadic import (
    DyadicIndex,
    TreeConfig,
    basis_matrix,
    check_same,
    indicator_matrix,
    measures,
    strict_containment,
)
from .symbol import (
    HaarSymbol,
    adjoint_symbol,
    as_haar,
    as_step,
    interval_means,
    project,
    to_step,
)

DENSE_LIMIT = 4096


class NumericError(ArithmeticError):
    pass


class InvalidFamilyError(ValueError):
    pass


def _blocks(B) -> np.ndarray:
    """Haar coefficients reshaped to ``(m, p, q)`` matrix blocks."""
    B = as_haar(B)
    c = B.coeffs
    if B.kind == "scalar":
        return c[:, None, None]
    if B.kind == "vector":
        return c[:, :, None]
    return c


def _assemble(M4: np.ndarray) -> np.ndarray:
    N, p, N2, q = M4.shape
    return M4.reshape(N * p, N2 * q)


@lru_cache(maxsize=None)
def _avg_table(depth: int) -> np.ndarray:
    """``A[i, b] = m_I(phi_b)`` from the tree structure alone.

    m_I chi_T = 1; m_I h_J = +-|J|^-1/2 when J strictly contains I (sign by the
    half of J holding I); zero otherwise.
    """
    m = 2**depth - 1
    A = np.zeros((m, m + 1))
    A[:, 0] = 1.0
    for i in range(m):
        I = DyadicIndex.from_bfs(i)
        J = I
        while J.level > 0:
            J = J.parent()
            sign = 1.0 if J.plus.contains(I) else -1.0
            A[i, 1 + J.bfs] = sign * 2.0 ** (J.level / 2)
    A.setflags(write=False)
    return A


@lru_cache(maxsize=None)
def _chi_expansion(depth: int) -> np.ndarray:
    """``X[b, i]``: basis coefficients of chi_I/|I|, computed by cell sums."""
    H = basis_matrix(depth)
    chi = indicator_matrix(depth) / measures(depth)[:, None]
    X = (H @ chi.T) * 2.0 ** (-depth)
    X.setflags(write=False)
    return X


def paraproduct_matrix(B) -> np.ndarray:
    """pi_B f = sum_I B_I (m_I f) h_I, with m_I f seeing the mean of f."""
    B = as_haar(B)
    C = _blocks(B)
    N = B.cfg.n_cells
    _, p, q = C.shape
    M = np.zeros((N, p, N, q), dtype=complex)
    M[1:] = np.einsum("ib,ipq->ipbq", _avg_table(B.cfg.depth), C)
    return _assemble(M)


def delta_matrix(B) -> np.ndarray:
    """Delta_B f = sum_I B_I f_I chi_I/|I|."""
    B = as_haar(B)
    C = _blocks(B)
    N = B.cfg.n_cells
    _, p, q = C.shape
    M = np.zeros((N, p, N, q), dtype=complex)
    M[:, :, 1:, :] = np.einsum("bi,ipq->bpiq", _chi_expansion(B.cfg.depth), C)
    return _assemble(M)


def gamma_matrix(B) -> np.ndarray:
    """gamma_B f = sum_I (m_I B) f_I h_I; zero on the constant mode."""
    S = as_step(B)
    if S.kind != "operator":
        raise ValueError("gamma needs an operator-valued symbol")
    N, n = S.cfg.n_cells, S.cfg.dim
    M = np.zeros((N, n, N, n), dtype=complex)
    mI = interval_means(S)
    idx = np.arange(1, N)
    M[idx, :, idx, :] = mI
    return _assemble(M)


def lambda_matrix(B) -> np.ndarray:
    """Lambda_B = pi_B + Delta_B."""
    return paraproduct_matrix(B) + delta_matrix(B)


def multiplication_matrix(B) -> np.ndarray:
    """Pointwise multiplication by the step values of B (mean included)."""
    S = as_step(B)
    cells = S.cells
    if S.kind == "scalar":
        cells = cells[:, None, None]
    elif S.kind == "vector":
        cells = cells[:, :, None]
    U = basis_matrix(S.cfg.depth) * np.sqrt(S.cfg.cell_weight)
    return _assemble(np.einsum("ac,bc,cpq->apbq", U, U, cells))


def dbf_matrix(B, F=None) -> np.ndarray:
    """D_{B,F}: block-diagonal, block at h_I equal to (1/|I|) sum_{J strictly in I} B_J* F_J."""
    B = as_haar(B)
    F = B if F is None else as_haar(F)
    cfg = check_same(B.cfg, F.cfg)
    CB, CF = _blocks(B), _blocks(F)
    prods = np.conj(np.swapaxes(CB, -1, -2)) @ CF
    K = np.einsum("ij,jpq->ipq", strict_containment(cfg.depth).astype(float), prods)
    K /= measures(cfg.depth)[:, None, None]
    N = cfg.n_cells
    p, q = K.shape[1:]
    M = np.zeros((N, p, N, q), dtype=complex)
    idx = np.arange(1, N)
    M[idx, :, idx, :] = K
    return _assemble(M)


@dataclass(frozen=True, eq=False)
class MultiplierFamily:
    """Functions Phi_I (cell values, bfs order) with supp Phi_I inside I.

    ``root``, when given, is applied to the constant mode (the virtual parent
    of T); otherwise the constant mode maps to zero.
    """

    cfg: TreeConfig
    phis: np.ndarray
    root: np.ndarray | None = None

    def __post_init__(self):
        phis = np.asarray(self.phis, dtype=complex)
        if phis.shape[:2] != (self.cfg.n_intervals, self.cfg.n_cells):
            raise InvalidFamilyError(f"family array has shape {phis.shape}")
        outside = 1.0 - indicator_matrix(self.cfg.depth)
        leak = np.abs(phis).reshape(phis.shape[:2] + (-1,)).max(axis=-1) * outside
        if np.any(leak > 0):
            i, _ = np.argwhere(leak > 0)[0]
            raise InvalidFamilyError(f"Phi at {DyadicIndex.from_bfs(int(i))} is not supported in the interval")
        object.__setattr__(self, "phis", phis)
        if self.root is not None:
            object.__setattr__(self, "root", np.asarray(self.root, dtype=complex))

    @classmethod
    def from_symbols(cls, cfg: TreeConfig, phis, root=None) -> "MultiplierFamily":
        arr = np.stack([as_step(P).cells for P in phis])
        return cls(cfg, arr, None if root is None else as_step(root).cells)


def multiplier_matrix(fam: MultiplierFamily) -> np.ndarray:
    """f = sum f_I h_I  ->  sum_I Phi_I(f_I) h_I (+ root(f_0) chi_T)."""
    cfg = fam.cfg
    H = basis_matrix(cfg.depth)
    w = cfg.cell_weight
    phis = fam.phis
    if phis.ndim == 2:
        phis = phis[..., None, None]
    N = cfg.n_cells
    p, q = phis.shape[2:]
    M = np.zeros((N, p, N, q), dtype=complex)
    M[:, :, 1:, :] = w * np.einsum("bc,ic,icpq->bpiq", H, H[1:], phis)
    if fam.root is not None:
        root = fam.root if fam.root.ndim == 3 else fam.root[..., None, None]
        M[:, :, 0, :] = w * np.einsum("bc,cpq->bpq", H, root)
    return _assemble(M)


def lambda_multiplier_matrix(B) -> np.ndarray:
    """Lambda_B as the Haar multiplier (P_I B)_I, root P_T B."""
    B = as_haar(B)
    cfg = B.cfg
    fam = MultiplierFamily.from_symbols(
        cfg, [project(B, I) for I, _ in B.items()], root=project(B, DyadicIndex(0, 0)))
    return multiplier_matrix(fam)


def equipara_families(B) -> tuple[MultiplierFamily, MultiplierFamily, MultiplierFamily]:
    """Three multiplier families whose norms reproduce ||pi_B|| (the last one squared).

    (B_I* h_I), (P_{I+}B + P_{I-}B) with root P_T B, and
    (sum_{J strictly in I} B_J* B_J chi_J/|J|) with root S_B.
    """
    B = as_haar(B)
    cfg = B.cfg
    d = cfg.depth
    H = basis_matrix(d)
    C = _blocks(B)
    Ch = np.conj(np.swapaxes(C, -1, -2))

    fam1 = MultiplierFamily(cfg, np.einsum("ic,ipq->icpq", H[1:], Ch))

    zero = HaarSymbol(cfg, np.zeros_like(B.mean), np.zeros_like(B.coeffs))
    halves = []
    for I, _ in B.items():
        if I.level + 1 < d:
            halves.append(to_step(project(B, I.plus) + project(B, I.minus)))
        else:
            halves.append(to_step(zero))
    root2 = to_step(project(B, DyadicIndex(0, 0)))
    fam2 = MultiplierFamily.from_symbols(cfg, halves, root=root2)

    prods = Ch @ C
    chi = indicator_matrix(d) / measures(d)[:, None]
    terms = np.einsum("jc,jpq->jcpq", chi, prods)
    contain = strict_containment(d).astype(float)
    phis3 = np.einsum("ij,jcpq->icpq", contain, terms)
    fam3 = MultiplierFamily(cfg, phis3, root=terms.sum(axis=0))
    return fam1, fam2, fam3


def martingale_matrix(sigma) -> np.ndarray:
    """T_sigma: identity on the constant, sigma_I on the block of h_I."""
    signs = np.concatenate([[1.0], np.asarray(sigma.signs, dtype=float)])
    return np.kron(np.diag(signs), np.eye(sigma.cfg.dim)).astype(complex)


def mean_zero_projector(cfg: TreeConfig, dim: int | None = None) -> np.ndarray:
    """Orthogonal projection killing the constant block."""
    n = cfg.dim if dim is None else dim
    Q = np.eye(cfg.n_cells * n, dtype=complex)
    Q[:n, :n] = 0
    return Q


def _check_finite(M: np.ndarray):
    if not np.all(np.isfinite(M)):
        raise NumericError("operator matrix has non-finite entries")


def norm_bracket(M: np.ndarray, tol: float = 1e-8, seed: int = 0, max_iter: int = 10_000) -> tuple[float, float]:
    """Largest singular value by randomized power iteration on M*M.

    Returns ``(lower, upper)``: the lower value is attained by an explicit unit
    vector; the upper one is the cheaper of the Frobenius and sqrt(||M||_1 ||M||_inf)
    bounds, and collapses to the lower one only when those are tight.
    """
    M = np.asarray(M)
    _check_finite(M)
    upper = min(np.linalg.norm(M), np.sqrt(np.abs(M).sum(axis=0).max() * np.abs(M).sum(axis=1).max()))
    if upper == 0:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.shape[1]) + 1j * rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = M.conj().T @ (M @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            break
        v = w / nw
        new = np.linalg.norm(M @ v)
        if abs(new - est) <= tol * new:
            est = new
            break
        est = new
    return float(est), float(max(upper, est))


def operator_norm(M: np.ndarray) -> float:
    """Largest singular value; dense SVD up to DENSE_LIMIT rows/cols."""
    M = np.asarray(M)
    _check_finite(M)
    if M.size == 0:
        return 0.0
    if max(M.shape) <= DENSE_LIMIT:
        return float(np.linalg.norm(M, 2))
    return norm_bracket(M)[0]


MATRIX_MAGIC = b"OPBMOMAT"
MATRIX_VERSION = 1


def dump_matrix(M: np.ndarray, path) -> None:
    """Column-major little-endian float64 (re, im) pairs after a 32-byte header."""
    M = np.asarray(M, dtype=complex)
    rows, cols = M.shape
    header = MATRIX_MAGIC + struct.pack("<III", MATRIX_VERSION, rows, cols)
    header += b"\0" * (32 - len(header))
    body = np.asfortranarray(M).ravel(order="F").astype("<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(header + body)


def load_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:8] != MATRIX_MAGIC:
        raise ValueError(f"{path}: not an operator matrix dump")
    version, rows, cols = struct.unpack("<III", raw[8:20])
    if version != MATRIX_VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    data = np.frombuffer(raw[32:], dtype="<c16")
    if data.size != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} entries, found {data.size}")
    return data.reshape((rows, cols), order="F").astype(complex)


def delta_via_adjoint(B) -> np.ndarray:
    """(pi_{B*})*, the second route to Delta_B."""
    return paraproduct_matrix(adjoint_symbol(as_haar(B))).conj().T


__all__ = [
    "paraproduct_matrix", "delta_matrix", "gamma_matrix", "lambda_matrix",
    "lambda_multiplier_matrix", "multiplication_matrix", "dbf_matrix",
    "MultiplierFamily", "multiplier_matrix", "equipara_families",
    "martingale_matrix", "mean_zero_projector", "operator_norm", "norm_bracket",
    "dump_matrix", "load_matrix", "delta_via_adjoint", "NumericError", "InvalidFamilyError",
]
