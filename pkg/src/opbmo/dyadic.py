"""Truncated dyadic tree on the circle T = [0, 1).

Intervals are addressed by ``(level, position)`` and ordered breadth-first.
The discretized L^2(T) has one coordinate per basis function of the list
``[chi_T, h_(0,0), h_(1,0), h_(1,1), ...]``; this ordering is shared by every
operator builder in the package.

Convention: the Haar function of I is positive on the LEFT half of I.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class InvalidIndexError(ValueError):
    """Dyadic index outside the truncated tree."""


class ConfigMismatchError(ValueError):
    """Objects built on different tree configurations were combined."""


@dataclass(frozen=True, order=True)
class DyadicIndex:
    level: int
    position: int

    def __post_init__(self):
        if self.level < 0 or not 0 <= self.position < 2**self.level:
            raise InvalidIndexError(f"no dyadic interval ({self.level}, {self.position})")

    @property
    def measure(self) -> float:
        return 2.0 ** (-self.level)

    @property
    def left(self) -> float:
        return self.position * 2.0 ** (-self.level)

    @property
    def right(self) -> float:
        return (self.position + 1) * 2.0 ** (-self.level)

    @property
    def bfs(self) -> int:
        """Position in breadth-first order, root = 0."""
        return 2**self.level - 1 + self.position

    @classmethod
    def from_bfs(cls, k: int) -> "DyadicIndex":
        level = (k + 1).bit_length() - 1
        return cls(level, k + 1 - 2**level)

    def children(self) -> tuple["DyadicIndex", "DyadicIndex"]:
        """(left, right) halves; the left one is I+."""
        return (DyadicIndex(self.level + 1, 2 * self.position),
                DyadicIndex(self.level + 1, 2 * self.position + 1))

    @property
    def plus(self) -> "DyadicIndex":
        return self.children()[0]

    @property
    def minus(self) -> "DyadicIndex":
        return self.children()[1]

    def parent(self) -> "DyadicIndex":
        if self.level == 0:
            raise InvalidIndexError("the root has no parent")
        return DyadicIndex(self.level - 1, self.position // 2)

    def contains(self, other: "DyadicIndex") -> bool:
        """True when ``other`` is a subset of ``self`` (equality included)."""
        shift = other.level - self.level
        return shift >= 0 and other.position >> shift == self.position

    def cell_slice(self, depth: int) -> slice:
        """Cells of resolution 2^-depth covered by this interval."""
        if self.level > depth:
            raise InvalidIndexError(f"{self} is finer than depth {depth}")
        width = 2 ** (depth - self.level)
        return slice(self.position * width, (self.position + 1) * width)

    def __repr__(self):
        return f"I({self.level},{self.position})"


ROOT = DyadicIndex(0, 0)


@dataclass(frozen=True)
class TreeConfig:
    """Depth ``d`` (cells of length 2^-d) and dimension ``n`` of the Hilbert space."""

    depth: int
    dim: int = 1

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")

    @property
    def n_cells(self) -> int:
        return 2**self.depth

    @property
    def n_intervals(self) -> int:
        """Intervals carrying Haar coefficients (levels 0..d-1)."""
        return 2**self.depth - 1

    @property
    def space_dim(self) -> int:
        return self.dim * 2**self.depth

    @property
    def cell_weight(self) -> float:
        return 2.0 ** (-self.depth)


def check_same(*cfgs: TreeConfig) -> TreeConfig:
    first = cfgs[0]
    for other in cfgs[1:]:
        if other != first:
            raise ConfigMismatchError(f"{first} != {other}")
    return first


def enumerate_intervals(cfg: TreeConfig, max_level: int | None = None) -> list[DyadicIndex]:
    """Intervals of levels ``< max_level`` (default ``cfg.depth``) in breadth-first order."""
    top = cfg.depth if max_level is None else max_level
    return [DyadicIndex(k, j) for k in range(top) for j in range(2**k)]


def haar_values(I: DyadicIndex, depth: int) -> np.ndarray:
    """Cell values of h_I at resolution 2^-depth."""
    if I.level >= depth:
        raise InvalidIndexError(f"h_{I} is not a step function at depth {depth}")
    vals = np.zeros(2**depth)
    sl = I.cell_slice(depth)
    half = (sl.stop - sl.start) // 2
    amp = 2.0 ** (I.level / 2)
    vals[sl.start:sl.start + half] = amp
    vals[sl.start + half:sl.stop] = -amp
    return vals


def haar_step(I: DyadicIndex, cfg: TreeConfig):
    """h_I as a scalar StepSymbol."""
    from .symbol import StepSymbol

    return StepSymbol(cfg, haar_values(I, cfg.depth).astype(complex))


@lru_cache(maxsize=None)
def basis_matrix(depth: int) -> np.ndarray:
    """Rows are the basis functions [chi_T, h_I (bfs)] evaluated on the cells.

    Orthonormal w.r.t. the cell weight: ``2^-d * H @ H.T == eye``.
    """
    n = 2**depth
    H = np.empty((n, n))
    H[0] = 1.0
    for k in range(n - 1):
        H[k + 1] = haar_values(DyadicIndex.from_bfs(k), depth)
    H.setflags(write=False)
    return H


@lru_cache(maxsize=None)
def indicator_matrix(depth: int, max_level: int | None = None) -> np.ndarray:
    """``chi[i, c] = 1`` when cell c lies in the i-th interval (bfs, levels < max_level)."""
    top = depth if max_level is None else max_level
    m = 2**top - 1
    chi = np.zeros((m, 2**depth))
    for k in range(m):
        chi[k, DyadicIndex.from_bfs(k).cell_slice(depth)] = 1.0
    chi.setflags(write=False)
    return chi


@lru_cache(maxsize=None)
def measures(depth: int) -> np.ndarray:
    """|I| for every interval carrying a coefficient, bfs order."""
    out = np.array([DyadicIndex.from_bfs(k).measure for k in range(2**depth - 1)])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def strict_containment(depth: int) -> np.ndarray:
    """``C[i, j] = True`` iff interval j is a proper subset of interval i."""
    m = 2**depth - 1
    ivs = [DyadicIndex.from_bfs(k) for k in range(m)]
    C = np.array([[a != b and a.contains(b) for b in ivs] for a in ivs])
    C.setflags(write=False)
    return C


def basis_index(I: DyadicIndex | None, component: int, dim: int) -> int:
    """Coordinate of ``h_I (x) e_component``; ``I=None`` addresses the constant mode."""
    block = 0 if I is None else I.bfs + 1
    return block * dim + component
