"""Discrete Caputo derivative on a uniform grid, plain and with starting-weight corrections."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .weights import check_order, row_weights

if TYPE_CHECKING:
    from .corrections import StartingWeights

__all__ = ["Grid", "discrete_caputo", "corrected_discrete_caputo", "GridMismatchError"]


class GridMismatchError(ValueError):
    """Starting weights were built for a different order, grid or exponent list."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid x_j = j*dx, j = 0..2N, with dx = T / (2N)."""

    T: float
    N: int

    def __post_init__(self):
        if not self.T > 0.0:
            raise ValueError(f"final time must be positive, got {self.T!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"half step count must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def from_step(cls, T: float, dx: float) -> "Grid":
        n2 = round(T / dx)
        if n2 < 2 or n2 % 2 or abs(n2 * dx - T) > 1e-12 * T:
            raise ValueError(f"T / dx must be an even integer, got T={T}, dx={dx}")
        return cls(T, n2 // 2)

    @property
    def dx(self) -> float:
        return self.T / (2 * self.N)

    @property
    def size(self) -> int:
        return 2 * self.N + 1

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.size) * self.dx


def _prefix(samples, j: int) -> np.ndarray:
    if j < 1:
        raise IndexError(f"discrete Caputo derivative is defined for j >= 1, got {j}")
    need = max(j, 2) + 1
    y = np.asarray(samples, dtype=float)
    if y.ndim != 1 or y.size < need:
        raise ValueError(f"step {j} needs at least {need} samples, got {y.size}")
    return y[:need]


def discrete_caputo(nu: float, grid: Grid, samples, j: int) -> float:
    """dx**-nu * (row_j . y) at grid index ``j``.

    The step-1 formula reads y_2, so ``samples`` must hold max(j, 2) + 1 values.
    """
    nu = check_order(nu)
    j = int(j)
    y = _prefix(samples, j)
    return float(row_weights(nu, j) @ y) * grid.dx**-nu


def corrected_discrete_caputo(nu: float, grid: Grid, samples, j: int, weights: "StartingWeights") -> float:
    """Plain operator plus dx**-nu * sum_i W[j, i] (y_i - y_0)."""
    nu = check_order(nu)
    j = int(j)
    if weights.nu != nu or weights.grid != grid:
        raise GridMismatchError("starting weights were built for another order or grid")
    y = _prefix(samples, j)
    value = discrete_caputo(nu, grid, y, j)
    m = weights.m
    if m == 0:
        return value
    ys = np.asarray(samples, dtype=float)
    if ys.size < m + 1:
        raise ValueError(f"correction needs y_0..y_{m}, got {ys.size} samples")
    return value + grid.dx**-nu * float(weights.row(j) @ (ys[1 : m + 1] - ys[0]))
