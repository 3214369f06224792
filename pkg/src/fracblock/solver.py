"""Implicit time stepping for D^nu y = f(x, y), y(0) = y0, on a uniform grid.

Steps 1 and 2 are coupled through the step-1 formula and are solved together
by a 2x2 Newton iteration. Every later step is a scalar equation in y_j. With
starting-weight corrections on m exponents the first max(m, 2) unknowns are
solved as one coupled system instead.

``start="exact"`` seeds y_1 and y_2 from the exact solution and skips their
equations; the rest of the start block is still solved jointly. This is how
reference error tables are usually produced and isolates the marching error.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .caputo import Grid
from .corrections import StartingWeights, starting_weights
from .weights import check_order, row_weights

__all__ = [
    "Problem",
    "NewtonConfig",
    "Trajectory",
    "NonConvergenceError",
    "SingularJacobianError",
    "StepSizeWarning",
    "solve_initial_pair",
    "advance_step",
    "solve",
    "solve_corrected",
    "START_MODES",
]

PI_B = 9.0


class NonConvergenceError(RuntimeError):
    """Newton iteration hit its cap (after backtracking) without meeting the tolerance."""

    def __init__(self, message: str, index: int, residual: float):
        super().__init__(f"step {index}: {message} (last residual {residual:.3e})")
        self.index = index
        self.residual = residual


class SingularJacobianError(np.linalg.LinAlgError):
    def __init__(self, message: str, index: int):
        super().__init__(f"step {index}: {message}")
        self.index = index


class StepSizeWarning(UserWarning):
    """dx**nu exceeds the 1/(24 pi_B L) bound used by the convergence theory."""


@dataclass(frozen=True)
class Problem:
    nu: float
    y0: float
    rhs: Callable[[float, float], float]
    rhs_dy: Optional[Callable[[float, float], float]] = None
    exact: Optional[Callable[[float], float]] = None
    lipschitz_hint: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "nu", check_order(self.nu))
        object.__setattr__(self, "y0", float(self.y0))
        if self.lipschitz_hint is not None and not self.lipschitz_hint > 0:
            raise ValueError("lipschitz_hint must be positive")


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-13
    max_iter: int = 50
    fd_eps: float = 1e-7
    max_halvings: int = 30

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.fd_eps > 0:
            raise ValueError("fd_eps must be positive")


@dataclass(frozen=True)
class Trajectory:
    grid: Grid
    values: np.ndarray
    newton_iters: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    def max_error(self, exact: Callable[[float], float]) -> float:
        """max_{k >= 1} |exact(x_k) - y_k|."""
        x = self.grid.points
        ref = np.array([exact(xk) for xk in x[1:]])
        return float(np.max(np.abs(ref - self.values[1:])))


def _dfdy(problem: Problem, cfg: NewtonConfig, x: float, y: float) -> float:
    if problem.rhs_dy is not None:
        return float(problem.rhs_dy(x, y))
    h = max(cfg.fd_eps, cfg.fd_eps * abs(y))
    return (problem.rhs(x, y + h) - problem.rhs(x, y - h)) / (2.0 * h)


def _warn_step_size(problem: Problem, grid: Grid) -> None:
    L = problem.lipschitz_hint
    if L is not None and grid.dx**problem.nu > 1.0 / (24.0 * PI_B * L):
        warnings.warn(
            f"dx**nu = {grid.dx ** problem.nu:.3e} exceeds 1/(24*9*L) = {1.0 / (24.0 * PI_B * L):.3e}",
            StepSizeWarning,
            stacklevel=3,
        )


def _scalar_newton(problem, cfg, x, j, s, a, known, known_abs, guess):
    """Solve s*(known + a*y) - f(x, y) = 0 for y."""
    f = problem.rhs

    def residual(y):
        fy = f(x, y)
        return s * (known + a * y) - fy, fy

    y = guess
    g, fy = residual(y)
    for it in range(1, cfg.max_iter + 1):
        if abs(g) <= cfg.tol * (1.0 + s * (known_abs + a * abs(y)) + abs(fy)):
            return y, it - 1
        slope = s * a - _dfdy(problem, cfg, x, y)
        if slope == 0.0 or not math.isfinite(slope):
            raise SingularJacobianError(f"Newton derivative is {slope}", j)
        step = g / slope
        lam = 1.0
        y_new = y - step
        g_new, fy_new = residual(y_new)
        halvings = 0
        while not abs(g_new) <= abs(g) and halvings < cfg.max_halvings:
            lam *= 0.5
            halvings += 1
            y_new = y - lam * step
            g_new, fy_new = residual(y_new)
        y, g, fy = y_new, g_new, fy_new
        if abs(lam * step) <= cfg.tol * (1.0 + abs(y)):
            return y, it
    raise NonConvergenceError(f"damped Newton did not converge in {cfg.max_iter} iterations", j, abs(g))


def _coupled_newton(problem, grid, cfg, weights: Optional[StartingWeights], size: int, seeded=()):
    """Solve equations n = len(seeded)+1..size jointly for the matching unknowns.

    ``seeded`` holds fixed values of y_1..y_s. Returns all of y_1..y_size.
    """
    nu = problem.nu
    y0 = problem.y0
    s = grid.dx**-nu
    x = grid.points
    L = np.zeros((size, size))
    c = np.zeros(size)
    for n in range(1, size + 1):
        w = row_weights(nu, n)
        L[n - 1, : w.size - 1] = s * w[1:]
        c[n - 1] = s * w[0] * y0
        if weights is not None and weights.m:
            Wn = weights.row(n)
            L[n - 1, : weights.m] += s * Wn
            c[n - 1] -= s * Wn.sum() * y0
    seeded = np.asarray(seeded, dtype=float)
    ns = seeded.size
    if ns:
        c = c[ns:] + L[ns:, :ns] @ seeded
        L = L[ns:, ns:]
    if not L.size:
        return seeded.copy(), 0
    L_abs = np.abs(L)
    xs = x[ns + 1 : size + 1]

    def residual(u):
        fu = np.array([problem.rhs(xi, ui) for xi, ui in zip(xs, u)])
        return L @ u + c - fu, fu

    u = np.full(size - ns, seeded[-1] if ns else y0)
    r, fu = residual(u)
    for it in range(1, cfg.max_iter + 1):
        scale = 1.0 + L_abs @ np.abs(u) + np.abs(c) + np.abs(fu)
        if np.all(np.abs(r) <= cfg.tol * scale):
            return np.concatenate([seeded, u]), it - 1
        J = L - np.diag([_dfdy(problem, cfg, xi, ui) for xi, ui in zip(xs, u)])
        try:
            cond = np.linalg.cond(J)
            if not np.isfinite(cond) or cond > 1e14:
                raise np.linalg.LinAlgError(f"condition estimate {cond:.3e}")
            step = np.linalg.solve(J, r)
        except np.linalg.LinAlgError as exc:
            k = size - ns
            raise SingularJacobianError(f"coupled {k}x{k} Newton matrix is singular ({exc})", ns + 1) from exc
        lam = 1.0
        u_new = u - step
        r_new, fu_new = residual(u_new)
        halvings = 0
        norm = np.max(np.abs(r))
        while not np.max(np.abs(r_new)) <= norm and halvings < cfg.max_halvings:
            lam *= 0.5
            halvings += 1
            u_new = u - lam * step
            r_new, fu_new = residual(u_new)
        u, r, fu = u_new, r_new, fu_new
        if np.max(np.abs(lam * step)) <= cfg.tol * (1.0 + np.max(np.abs(u))):
            return np.concatenate([seeded, u]), it
    raise NonConvergenceError(
        f"coupled Newton for steps {ns + 1}..{size} did not converge in {cfg.max_iter} iterations",
        ns + 1,
        float(np.max(np.abs(r))),
    )


def solve_initial_pair(problem: Problem, grid: Grid, cfg: NewtonConfig = NewtonConfig()):
    """Solve the coupled equations for (y_1, y_2). Returns (y1, y2, iterations)."""
    u, iters = _coupled_newton(problem, grid, cfg, None, 2)
    return float(u[0]), float(u[1]), iters


def advance_step(
    problem: Problem,
    grid: Grid,
    values_so_far,
    j: int,
    cfg: NewtonConfig = NewtonConfig(),
    weights: Optional[StartingWeights] = None,
):
    """Solve the scalar equation of step ``j >= 3`` given y_0..y_{j-1}. Returns (y_j, iterations)."""
    j = int(j)
    if j < 3:
        raise IndexError(f"scalar steps start at j = 3, got {j}")
    y = np.asarray(values_so_far, dtype=float)
    if y.size < j:
        raise ValueError(f"step {j} needs y_0..y_{j - 1}, got {y.size} values")
    nu = problem.nu
    w = row_weights(nu, j)
    hist = y[:j]
    known = float(w[:-1] @ hist)
    known_abs = float(np.abs(w[:-1]) @ np.abs(hist))
    if weights is not None and weights.m:
        if weights.m >= j:
            raise ValueError(f"step {j} is inside the coupled start block of {weights.m} corrected steps")
        Wj = weights.row(j)
        diff = hist[1 : weights.m + 1] - hist[0]
        known += float(Wj @ diff)
        known_abs += float(np.abs(Wj) @ np.abs(diff))
    s = grid.dx**-nu
    x = float(grid.dx * j)
    return _scalar_newton(problem, cfg, x, j, s, float(w[-1]), known, known_abs, float(hist[-1]))


START_MODES = ("coupled", "exact")


def _seed(problem: Problem, grid: Grid, start: str) -> np.ndarray:
    if start not in START_MODES:
        raise ValueError(f"start must be one of {START_MODES}, got {start!r}")
    if start == "coupled":
        return np.empty(0)
    if problem.exact is None:
        raise ValueError("start='exact' needs a problem with an exact solution")
    return np.array([problem.exact(x) for x in grid.points[1:3]], dtype=float)


def _march(problem: Problem, grid: Grid, cfg: NewtonConfig, weights: Optional[StartingWeights], start: str) -> Trajectory:
    seeded = _seed(problem, grid, start)
    _warn_step_size(problem, grid)
    n_pts = grid.size
    values = np.empty(n_pts)
    iters = np.zeros(n_pts, dtype=int)
    values[0] = problem.y0
    m = 0 if weights is None else weights.m
    start = min(max(m, 2), n_pts - 1)
    u, it = _coupled_newton(problem, grid, cfg, weights, start, seeded[:start])
    values[1 : start + 1] = u
    iters[1 : start + 1] = it
    for j in range(start + 1, n_pts):
        try:
            values[j], iters[j] = advance_step(problem, grid, values, j, cfg, weights)
        except (NonConvergenceError, SingularJacobianError) as exc:
            exc.index = j
            raise
    values.setflags(write=False)
    iters.setflags(write=False)
    return Trajectory(grid, values, iters)


def solve(problem: Problem, grid: Grid, cfg: NewtonConfig = NewtonConfig(), start: str = "coupled") -> Trajectory:
    """Numerical solution y_0..y_{2N} of the uncorrected scheme."""
    return _march(problem, grid, cfg, None, start)


def solve_corrected(
    problem: Problem, grid: Grid, cfg: NewtonConfig = NewtonConfig(), sigma=(), start: str = "coupled"
) -> Trajectory:
    """Numerical solution with starting-weight corrections on exponents ``sigma``.

    The first max(len(sigma), 2) steps are solved as one coupled Newton system.
    An empty ``sigma`` gives exactly the trajectory of :func:`solve`.
    """
    sigma = tuple(sigma)
    if not sigma:
        return solve(problem, grid, cfg, start)
    weights = starting_weights(problem.nu, grid, sigma)
    return _march(problem, grid, cfg, weights, start)
