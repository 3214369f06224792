"""Built-in test problems with known exact solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .solver import Problem
from .special import gamma_fn, mittag_leffler

__all__ = ["ProblemSpec", "registry", "make_problem", "PROBLEM_IDS"]


@dataclass(frozen=True)
class ProblemSpec:
    id: str
    description: str
    build: Callable[..., Problem]
    smooth: bool  # exact solution is C^3 on [0, T]


def _example1(nu: float) -> Problem:
    c = gamma_fn(4.0 + nu) / 6.0
    return Problem(
        nu,
        0.0,
        rhs=lambda x, y: c * x**3,
        rhs_dy=lambda x, y: 0.0,
        exact=lambda x: x ** (3.0 + nu),
        lipschitz_hint=None,
    )


def _example2_linear(nu: float) -> Problem:
    c = gamma_fn(4.0 + nu) / 6.0
    return Problem(
        nu,
        0.0,
        rhs=lambda x, y: c * x**3 + x ** (3.0 + nu) - y,
        rhs_dy=lambda x, y: -1.0,
        exact=lambda x: x ** (3.0 + nu),
        lipschitz_hint=1.0,
    )


def _example2_nonlinear(nu: float) -> Problem:
    c = gamma_fn(4.0 + nu) / 6.0
    return Problem(
        nu,
        0.0,
        rhs=lambda x, y: c * x**3 + x ** (6.0 + 2.0 * nu) - y * y,
        rhs_dy=lambda x, y: -2.0 * y,
        exact=lambda x: x ** (3.0 + nu),
    )


def _example3(nu: float, lam: float = -1.0, y0: float = 1.0) -> Problem:
    if nu == 1.0:
        exact = lambda x: y0 * math.exp(lam * x)  # noqa: E731
    else:
        exact = lambda x: y0 * mittag_leffler(nu, lam * x**nu)  # noqa: E731
    return Problem(
        nu,
        y0,
        rhs=lambda x, y: lam * y,
        rhs_dy=lambda x, y: lam,
        exact=exact,
        lipschitz_hint=abs(lam) if lam else None,
    )


def _example3_nu1(nu: float = 1.0, lam: float = -1.0, y0: float = 1.0) -> Problem:
    if nu != 1.0:
        raise ValueError("example3-nu1 is the nu = 1 case; use example3 for other orders")
    return _example3(1.0, lam, y0)


_REGISTRY = {
    spec.id: spec
    for spec in (
        ProblemSpec("example1", "f = Gamma(4+nu)/6 x^3, y0 = 0, y = x^(3+nu)", _example1, True),
        ProblemSpec(
            "example2-linear", "f = Gamma(4+nu)/6 x^3 + x^(3+nu) - y, y = x^(3+nu)", _example2_linear, True
        ),
        ProblemSpec(
            "example2-nonlinear",
            "f = Gamma(4+nu)/6 x^3 + x^(6+2nu) - y^2, y = x^(3+nu)",
            _example2_nonlinear,
            True,
        ),
        ProblemSpec("example3", "f = lambda y, y = y0 E_nu(lambda x^nu) (lambda = -1, y0 = 1)", _example3, False),
        ProblemSpec("example3-nu1", "f = lambda y at nu = 1, y = y0 exp(lambda x)", _example3_nu1, True),
    )
}

PROBLEM_IDS = tuple(_REGISTRY)


def registry() -> list[ProblemSpec]:
    return list(_REGISTRY.values())


def make_problem(problem_id: str, nu: float, **params) -> Problem:
    try:
        spec = _REGISTRY[problem_id]
    except KeyError:
        raise KeyError(f"unknown problem {problem_id!r}; known: {', '.join(PROBLEM_IDS)}") from None
    return spec.build(nu, **params)
