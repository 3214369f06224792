"""Convergence studies over dyadic step sizes and their CSV / Markdown output."""

from __future__ import annotations

import csv
import io
import math
import re
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .caputo import Grid
from .problems import PROBLEM_IDS, make_problem
from .solver import START_MODES, NewtonConfig, StepSizeWarning, solve_corrected

__all__ = [
    "StudySpec",
    "ConvergenceRow",
    "ConvergenceReport",
    "StudyCellError",
    "parse_sigma_rule",
    "run_cell",
    "run_study",
    "emit_report",
    "parse_csv",
    "PRESETS",
    "preset",
    "FORMATS",
]

FORMATS = ("csv", "markdown")
_SIGMA_RULE = re.compile(r"^\s*k\s*\*\s*nu\s*:\s*(\d+(?:\s*,\s*\d+)*)\s*$")


def parse_sigma_rule(rule: str, nus) -> dict[float, tuple[float, ...]]:
    """``k*nu:m`` -> sigma = (nu, 2 nu, ..., m nu) for each order.

    ``k*nu:m1,m2,...`` gives one term count per order, in the order of ``nus``.
    """
    match = _SIGMA_RULE.match(rule)
    if not match:
        raise ValueError(f"sigma rule must look like 'k*nu:m' or 'k*nu:m1,m2,...', got {rule!r}")
    counts = [int(c) for c in match.group(1).split(",")]
    nus = list(nus)
    if len(counts) == 1:
        counts = counts * len(nus)
    if len(counts) != len(nus):
        raise ValueError(f"sigma rule lists {len(counts)} term counts for {len(nus)} orders")
    return {nu: tuple(k * nu for k in range(1, m + 1)) for nu, m in zip(nus, counts)}


@dataclass(frozen=True)
class StudySpec:
    problem: str
    nus: tuple
    levels: tuple = tuple(range(3, 11))
    T: float = 1.0
    corrected: bool = False
    sigma_rule: str = "k*nu:3"
    start: str = "exact"
    format: str = "csv"
    newton: NewtonConfig = field(default_factory=NewtonConfig)

    def __post_init__(self):
        if self.problem not in PROBLEM_IDS:
            raise ValueError(f"unknown problem {self.problem!r}; known: {', '.join(PROBLEM_IDS)}")
        nus = tuple(float(v) for v in self.nus)
        if not nus:
            raise ValueError("at least one order is required")
        levels = tuple(int(v) for v in self.levels)
        if not levels or any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"levels must be non-empty and strictly increasing, got {self.levels}")
        if levels[0] < 1:
            raise ValueError("levels must be >= 1")
        for l in levels:
            Grid.from_step(self.T, 2.0**-l)  # T / dx must be an even integer
        if self.start not in START_MODES:
            raise ValueError(f"start must be one of {START_MODES}, got {self.start!r}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.corrected:
            parse_sigma_rule(self.sigma_rule, nus)
        object.__setattr__(self, "nus", nus)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "T", float(self.T))

    def sigma_for(self, nu: float) -> tuple:
        return parse_sigma_rule(self.sigma_rule, self.nus)[nu] if self.corrected else ()


@dataclass(frozen=True)
class ConvergenceRow:
    dx: float
    max_error: float
    order: float | None


@dataclass(frozen=True)
class ConvergenceReport:
    """One column of (dx, max_error, order) rows per order ``nu``."""

    problem: str
    columns: dict = field(default_factory=dict)  # nu -> tuple[ConvergenceRow, ...]

    @property
    def nus(self) -> tuple:
        return tuple(self.columns)


class StudyCellError(RuntimeError):
    def __init__(self, nu: float, level: int, cause: Exception):
        super().__init__(f"solver failed at nu={nu}, level={level}: {cause}")
        self.nu = nu
        self.level = level
        self.cause = cause


def run_cell(spec: StudySpec, nu: float, level: int) -> float:
    """Max error over x_1..x_2N for one (nu, level) cell."""
    problem = make_problem(spec.problem, nu)
    if problem.exact is None:
        raise ValueError(f"problem {spec.problem!r} has no exact solution")
    grid = Grid.from_step(spec.T, 2.0**-level)
    with warnings.catch_warnings():
        # the reference grids are coarser than the step bound of the theory
        warnings.simplefilter("ignore", StepSizeWarning)
        try:
            traj = solve_corrected(problem, grid, spec.newton, spec.sigma_for(nu), start=spec.start)
        except (ArithmeticError, RuntimeError, ValueError) as exc:
            raise StudyCellError(nu, level, exc) from exc
    return traj.max_error(problem.exact)


def _cell(args):
    spec, nu, level = args
    return run_cell(spec, nu, level)


def _orders(dxs, errs):
    out = [None]
    for i in range(1, len(errs)):
        e0, e1 = errs[i - 1], errs[i]
        if e0 > 0.0 and e1 > 0.0:
            out.append(math.log(e0 / e1) / math.log(dxs[i - 1] / dxs[i]))
        else:
            out.append(None)
    return out


def run_study(spec: StudySpec, workers: int = 1) -> ConvergenceReport:
    """Solve every (nu, level) cell and tabulate errors and observed orders.

    Cells are independent and may run in ``workers`` processes; the report is
    assembled in (nu, level) order either way.
    """
    cells = [(spec, nu, l) for nu in spec.nus for l in spec.levels]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(_cell, cells))
    else:
        errors = [_cell(c) for c in cells]
    columns = {}
    n = len(spec.levels)
    dxs = [spec.T / (2 * Grid.from_step(spec.T, 2.0**-l).N) for l in spec.levels]
    for i, nu in enumerate(spec.nus):
        errs = errors[i * n : (i + 1) * n]
        orders = _orders(dxs, errs)
        columns[nu] = tuple(ConvergenceRow(dx, e, o) for dx, e, o in zip(dxs, errs, orders))
    return ConvergenceReport(spec.problem, columns)


def _fmt_err(e: float) -> str:
    return f"{e:.4e}"


def _fmt_order(o) -> str:
    return "" if o is None else f"{o:.4f}"


def _fmt_dx(dx: float) -> str:
    return repr(float(dx))


def _fmt_dx_fraction(dx: float) -> str:
    f = Fraction(dx).limit_denominator(1 << 30)
    return f"1/{f.denominator}" if f.numerator == 1 else str(f)


def emit_report(report: ConvergenceReport, fmt: str = "csv") -> str:
    """Render as CSV (errors to 5 significant digits) or a Markdown table.

    A single-order report has CSV columns ``dx,max_error,order``; with several
    orders a leading ``nu`` column is added and the columns are stacked.
    """
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        multi = len(report.columns) > 1
        w.writerow((["nu"] if multi else []) + ["dx", "max_error", "order"])
        for nu, rows in report.columns.items():
            for r in rows:
                w.writerow(([repr(nu)] if multi else []) + [_fmt_dx(r.dx), _fmt_err(r.max_error), _fmt_order(r.order)])
        return buf.getvalue()
    if fmt == "markdown":
        nus = list(report.columns)
        head = ["dx"]
        for nu in nus:
            head += [f"nu={nu:g}", "order"]
        lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        if nus:
            for i, r0 in enumerate(report.columns[nus[0]]):
                cells = [_fmt_dx_fraction(r0.dx)]
                for nu in nus:
                    r = report.columns[nu][i]
                    cells += [_fmt_err(r.max_error), _fmt_order(r.order) or "-"]
                lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def parse_csv(text: str, problem: str = "") -> ConvergenceReport:
    """Inverse of the CSV form of :func:`emit_report` (values at print precision)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty CSV")
    header = rows[0]
    multi = header[:1] == ["nu"]
    if header[int(multi) :] != ["dx", "max_error", "order"]:
        raise ValueError(f"unexpected CSV header {header}")
    columns: dict = {}
    for row in rows[1:]:
        nu = float(row[0]) if multi else 0.0
        dx, err, order = row[int(multi) :]
        columns.setdefault(nu, []).append(ConvergenceRow(float(dx), float(err), float(order) if order else None))
    return ConvergenceReport(problem, {nu: tuple(r) for nu, r in columns.items()})


# Reference studies. The corrected study uses per-order term counts.
PRESETS = {
    "table1": StudySpec("example1", (0.3, 0.5, 0.8, 0.99)),
    "table2": StudySpec("example2-linear", (0.3, 0.5, 0.8, 0.99)),
    "table3": StudySpec("example2-nonlinear", (0.3, 0.5, 0.8, 0.99)),
    "table4": StudySpec("example3", (0.3, 0.6, 0.9, 1.0)),
    "table5": StudySpec("example3", (0.3, 0.6, 0.9), corrected=True, sigma_rule="k*nu:6,4,4"),
}


def preset(name: str, **overrides) -> StudySpec:
    try:
        spec = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
    return replace(spec, **overrides) if overrides else spec
