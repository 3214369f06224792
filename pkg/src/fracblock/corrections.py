"""Starting weights that make the discrete Caputo derivative exact on x**sigma_k."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .caputo import Grid
from .special import gamma_fn
from .weights import check_order, row_weights

__all__ = ["StartingWeights", "starting_weights", "IllConditionedError", "MAX_CORRECTION_TERMS"]

MAX_CORRECTION_TERMS = 8
COND_LIMIT = 1e12


class IllConditionedError(np.linalg.LinAlgError):
    """The starting-weight system is singular or its condition estimate exceeds 1e12."""


def check_sigma(sigma) -> tuple[float, ...]:
    sigma = tuple(float(s) for s in sigma)
    if len(sigma) > MAX_CORRECTION_TERMS:
        raise ValueError(f"at most {MAX_CORRECTION_TERMS} correction exponents, got {len(sigma)}")
    if any(s <= 0.0 for s in sigma):
        raise ValueError(f"correction exponents must be positive, got {sigma}")
    if any(b <= a for a, b in zip(sigma, sigma[1:])):
        raise ValueError(f"correction exponents must be strictly increasing, got {sigma}")
    return sigma


@dataclass(frozen=True)
class StartingWeights:
    """W[n, i-1] = W_{n,i} for n = 0..2N (row 0 unused, zero) and i = 1..m."""

    nu: float
    grid: Grid
    sigma: tuple[float, ...]
    W: np.ndarray

    @property
    def m(self) -> int:
        return len(self.sigma)

    def row(self, n: int) -> np.ndarray:
        return self.W[n]


def starting_weights(nu: float, grid: Grid, sigma) -> StartingWeights:
    """Solve, for every n = 1..2N, the m x m system

        sum_i W_{n,i} x_i**s_k = dx**nu * (Caputo(x**s_k)(x_n) - D_dx x**s_k at x_n),

    k = 1..m. Equation k is scaled by x_m**s_k before elimination; the system
    matrix is the same for every n, so all right-hand sides are solved at once.
    """
    nu = check_order(nu)
    sigma = check_sigma(sigma)
    m = len(sigma)
    n_pts = grid.size
    if m == 0:
        return StartingWeights(nu, grid, sigma, np.zeros((n_pts, 0)))
    if m > n_pts - 1:
        raise ValueError(f"{m} correction terms need at least {m} grid steps, grid has {n_pts - 1}")

    x = grid.points
    dx = grid.dx
    s = np.asarray(sigma)
    Q = x[:, None] ** s[None, :]  # Q[j, k] = q_k(x_j)
    exact_coef = np.array([gamma_fn(1.0 + sk) / gamma_fn(1.0 - nu + sk) for sk in sigma])

    rhs = np.empty((m, n_pts - 1))
    for n in range(1, n_pts):
        w = row_weights(nu, n)
        rhs[:, n - 1] = dx**nu * exact_coef * x[n] ** (s - nu) - w @ Q[: w.size]

    scale = x[m] ** s
    A = Q[1 : m + 1].T / scale[:, None]
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditionedError(f"starting-weight system condition estimate {cond:.3e} exceeds {COND_LIMIT:.0e}")
    sol = np.linalg.solve(A, rhs / scale[:, None])

    W = np.zeros((n_pts, m))
    W[1:] = sol.T
    W.setflags(write=False)
    return StartingWeights(nu, grid, sigma, W)
