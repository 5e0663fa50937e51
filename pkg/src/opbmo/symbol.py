"""Step-function and Haar-expansion forms of symbols, and the maps between them.

A symbol takes scalar, vector (shape ``(n,)``) or matrix (shape ``(n, n)``)
values. The trailing "value shape" is carried by the arrays; the Haar form
stores the mean separately from the coefficients, which are kept in
breadth-first interval order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyadic import (
    DyadicIndex,
    InvalidIndexError,
    TreeConfig,
    basis_matrix,
    check_same,
    indicator_matrix,
)

__all__ = [
    "StepSymbol", "HaarSymbol", "to_haar", "to_step", "as_haar", "as_step",
    "mean_on", "project", "truncate", "adjoint_symbol", "column_embed",
    "gaussian_symbol", "conjugate", "make_rng",
]


def _value_kind(shape: tuple) -> str:
    return {0: "scalar", 1: "vector", 2: "operator"}[len(shape)]


@dataclass(frozen=True, eq=False)
class StepSymbol:
    """Values on the 2^d cells of length 2^-d."""

    cfg: TreeConfig
    cells: np.ndarray

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=complex)
        if cells.shape[0] != self.cfg.n_cells:
            raise ValueError(f"expected {self.cfg.n_cells} cells, got {cells.shape[0]}")
        if cells.ndim > 3:
            raise ValueError(f"bad value shape {cells.shape[1:]}")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def kind(self) -> str:
        return _value_kind(self.cells.shape[1:])

    @property
    def value_shape(self) -> tuple:
        return self.cells.shape[1:]

    def l2_norm_sq(self) -> float:
        """Frobenius L^2 norm squared, exact cell sum."""
        return float(self.cfg.cell_weight * np.sum(np.abs(self.cells) ** 2))


@dataclass(frozen=True, eq=False)
class HaarSymbol:
    """``mean + sum_I coeffs[I.bfs] h_I``."""

    cfg: TreeConfig
    mean: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=complex)
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.cfg.n_intervals,) + mean.shape:
            raise ValueError(f"coeff array shape {coeffs.shape} does not match "
                             f"{self.cfg.n_intervals} intervals of value shape {mean.shape}")
        mean.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def kind(self) -> str:
        return _value_kind(self.mean.shape)

    @property
    def value_shape(self) -> tuple:
        return self.mean.shape

    def coeff(self, I: DyadicIndex) -> np.ndarray:
        if I.level >= self.cfg.depth:
            raise InvalidIndexError(f"no coefficient at {I} for depth {self.cfg.depth}")
        return self.coeffs[I.bfs]

    def items(self):
        for k, c in enumerate(self.coeffs):
            yield DyadicIndex.from_bfs(k), c

    def with_coeffs(self, coeffs, mean=None) -> "HaarSymbol":
        return HaarSymbol(self.cfg, self.mean if mean is None else mean, coeffs)

    def zero_mean(self) -> "HaarSymbol":
        return HaarSymbol(self.cfg, np.zeros_like(self.mean), self.coeffs)

    def __add__(self, other: "HaarSymbol") -> "HaarSymbol":
        check_same(self.cfg, other.cfg)
        return HaarSymbol(self.cfg, self.mean + other.mean, self.coeffs + other.coeffs)

    def __mul__(self, lam) -> "HaarSymbol":
        return HaarSymbol(self.cfg, lam * self.mean, lam * self.coeffs)

    __rmul__ = __mul__

    def l2_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.mean) ** 2) + np.sum(np.abs(self.coeffs) ** 2))


def to_haar(B: StepSymbol) -> HaarSymbol:
    H = basis_matrix(B.cfg.depth)
    c = np.tensordot(H, B.cells, axes=(1, 0)) * B.cfg.cell_weight
    return HaarSymbol(B.cfg, c[0], c[1:])


def to_step(B: HaarSymbol) -> StepSymbol:
    H = basis_matrix(B.cfg.depth)
    full = np.concatenate([B.mean[None], B.coeffs])
    return StepSymbol(B.cfg, np.tensordot(H.T, full, axes=(1, 0)))


def as_haar(B) -> HaarSymbol:
    return B if isinstance(B, HaarSymbol) else to_haar(B)


def as_step(B) -> StepSymbol:
    return B if isinstance(B, StepSymbol) else to_step(B)


def mean_on(B, I: DyadicIndex) -> np.ndarray:
    """Average of B over I, exact cell average."""
    B = as_step(B)
    return B.cells[I.cell_slice(B.cfg.depth)].mean(axis=0)


def _keep(B: HaarSymbol, mask: np.ndarray) -> HaarSymbol:
    shape = (-1,) + (1,) * len(B.value_shape)
    return HaarSymbol(B.cfg, np.zeros_like(B.mean), B.coeffs * mask.reshape(shape))


def project(B, I: DyadicIndex) -> HaarSymbol:
    """P_I B: the Haar coefficients at intervals J contained in I."""
    B = as_haar(B)
    if I.level >= B.cfg.depth:
        raise InvalidIndexError(f"P_I needs level < {B.cfg.depth}, got {I}")
    mask = np.array([I.contains(J) for J, _ in B.items()], dtype=float)
    return _keep(B, mask)


def truncate(B, k: int) -> HaarSymbol:
    """E_k B: coefficients at levels < k."""
    B = as_haar(B)
    if not 0 <= k <= B.cfg.depth:
        raise ValueError(f"truncation level {k} outside 0..{B.cfg.depth}")
    mask = np.zeros(B.cfg.n_intervals)
    mask[: 2**k - 1] = 1.0
    return _keep(B, mask)


def adjoint_symbol(B):
    """Pointwise conjugate transpose; keeps the representation of the input."""
    if B.kind != "operator":
        raise ValueError("adjoint needs an operator-valued symbol")
    if isinstance(B, StepSymbol):
        return StepSymbol(B.cfg, np.conj(np.swapaxes(B.cells, -1, -2)))
    return HaarSymbol(B.cfg, B.mean.conj().T, np.conj(np.swapaxes(B.coeffs, -1, -2)))


def column_embed(b):
    """Operator symbol whose first column is the vector symbol ``b``, other columns zero."""
    if b.kind != "vector":
        raise ValueError("column_embed needs a vector-valued symbol")
    if isinstance(b, StepSymbol):
        out = np.zeros(b.cells.shape + (b.cells.shape[-1],), dtype=complex)
        out[..., 0] = b.cells
        return StepSymbol(b.cfg, out)
    n = b.mean.shape[0]
    mean = np.zeros((n, n), dtype=complex)
    mean[:, 0] = b.mean
    coeffs = np.zeros(b.coeffs.shape + (n,), dtype=complex)
    coeffs[..., 0] = b.coeffs
    return HaarSymbol(b.cfg, mean, coeffs)


def conjugate(B, U: np.ndarray):
    """``U* B U`` for a constant matrix U."""
    Uh = U.conj().T
    if isinstance(B, StepSymbol):
        return StepSymbol(B.cfg, Uh @ B.cells @ U)
    return HaarSymbol(B.cfg, Uh @ B.mean @ U, Uh @ B.coeffs @ U)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 seeded through ``SeedSequence([seed, *stream])``."""
    if seed < 0:
        raise ValueError("seeds must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


def gaussian_symbol(cfg: TreeConfig, seed: int, kind: str = "operator", stream: int = 0) -> HaarSymbol:
    """Mean-zero symbol with i.i.d. standard complex Gaussian Haar coefficients.

    Entries are ``(x + iy)/sqrt(2)`` with ``x, y`` read from one
    ``standard_normal`` draw of shape ``(2^d - 1, *value_shape, 2)`` from
    :func:`make_rng` ``(seed, stream)``, so ``E|entry|^2 = 1``.
    """
    shape = {"scalar": (), "vector": (cfg.dim,), "operator": (cfg.dim, cfg.dim)}[kind]
    raw = make_rng(seed, stream).standard_normal((cfg.n_intervals,) + shape + (2,))
    coeffs = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
    return HaarSymbol(cfg, np.zeros(shape, dtype=complex), coeffs)


def interval_means(B: StepSymbol) -> np.ndarray:
    """m_I B for every coefficient-carrying interval, bfs order."""
    chi = indicator_matrix(B.cfg.depth)
    counts = chi.sum(axis=1)
    return np.tensordot(chi, B.cells, axes=(1, 0)) / counts.reshape((-1,) + (1,) * (B.cells.ndim - 1))
