"""Command-line entry point: ``fracblock solve|study|verify``.

Exit codes: 0 success, 2 solver non-convergence, 3 verification failure,
4 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import replace
from pathlib import Path


from .caputo import Grid
from .corrections import IllConditionedError
from .problems import PROBLEM_IDS, make_problem
from .solver import START_MODES, NonConvergenceError, SingularJacobianError, StepSizeWarning, solve_corrected
from .study import FORMATS, PRESETS, StudyCellError, StudySpec, emit_report, parse_sigma_rule, run_study
from .verification import (
    VerificationConfig,
    empirical_truncation_order,
    reports_to_json,
    run_suite,
    stability_experiment,
)

EXIT_OK = 0
EXIT_NONCONVERGENCE = 2
EXIT_VERIFY_FAILED = 3
EXIT_BAD_CONFIG = 4


class ConfigError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _levels(text: str) -> list[int]:
    try:
        if "-" in text and "," not in text:
            lo, hi = (int(v) for v in text.split("-"))
            return list(range(lo, hi + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"levels must look like '3-10' or '3,4,5', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracblock", description="Block-by-block solver for Caputo fractional ODEs.")
    parser.add_argument("--config", type=Path, help="JSON file with settings; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="JSON settings file")
        p.add_argument("--out", type=Path, help="write output here instead of stdout")

    def problem_flags(p):
        p.add_argument("--problem", choices=PROBLEM_IDS)
        p.add_argument("--nu", help="order(s), comma separated")
        p.add_argument("--levels", help="dyadic levels l (dx = 2**-l), e.g. 3-10")
        p.add_argument("--T", type=float, help="final time (default 1)")
        p.add_argument("--corrected", action="store_true", default=None, help="use starting-weight corrections")
        p.add_argument("--sigma-rule", help="correction exponents, 'k*nu:m' or 'k*nu:m1,m2,...'")
        p.add_argument("--start", choices=START_MODES, help="how y_1, y_2 are obtained")

    p = sub.add_parser("solve", help="solve one problem on one grid and print the trajectory")
    common(p)
    problem_flags(p)
    p = sub.add_parser("study", help="convergence study over dyadic step sizes")
    common(p)
    problem_flags(p)
    p.add_argument("--preset", choices=sorted(PRESETS), help="reference study to start from")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--workers", type=int, default=1)
    p = sub.add_parser("verify", help="run the coefficient and kernel checks")
    common(p)
    p.add_argument("--checks", help="comma-separated subset of checks")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--experiments", action="store_true", help="also run truncation-order and stability experiments")
    return parser


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


_FIELD_FLAGS = ("problem", "nu", "levels", "T", "corrected", "sigma_rule", "start", "format", "preset")


def _merged(args, config: dict) -> dict:
    known = set(_FIELD_FLAGS) | {"verification", "checks"}
    unknown = set(config) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = dict(config)
    for key in _FIELD_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value
    if isinstance(out.get("nu"), str):
        out["nu"] = _floats(out["nu"])
    elif isinstance(out.get("nu"), (int, float)):
        out["nu"] = [float(out["nu"])]
    if isinstance(out.get("levels"), str):
        out["levels"] = _levels(out["levels"])
    elif isinstance(out.get("levels"), int):
        out["levels"] = [out["levels"]]
    return out


def _study_spec(opts: dict) -> StudySpec:
    fields = {
        "problem": opts.get("problem"),
        "nus": opts.get("nu"),
        "levels": opts.get("levels"),
        "T": opts.get("T"),
        "corrected": opts.get("corrected"),
        "sigma_rule": opts.get("sigma_rule"),
        "start": opts.get("start"),
        "format": opts.get("format"),
    }
    fields = {k: v for k, v in fields.items() if v is not None}
    try:
        if opts.get("preset"):
            return replace(PRESETS[opts["preset"]], **fields)
        if "problem" not in fields or "nus" not in fields:
            raise ConfigError("study needs --problem and --nu (or --preset)")
        return StudySpec(**fields)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _write(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_study(args, opts) -> int:
    spec = _study_spec(opts)
    report = run_study(spec, workers=max(1, args.workers))
    _write(emit_report(report, spec.format), args.out)
    return EXIT_OK


def _cmd_solve(args, opts) -> int:
    if not opts.get("problem") or not opts.get("nu"):
        raise ConfigError("solve needs --problem and --nu")
    if len(opts["nu"]) != 1:
        raise ConfigError("solve takes a single order")
    nu = opts["nu"][0]
    level = (opts.get("levels") or [6])[0]
    T = float(opts.get("T") or 1.0)
    try:
        problem = make_problem(opts["problem"], nu)
        grid = Grid.from_step(T, 2.0**-level)
        sigma = parse_sigma_rule(opts.get("sigma_rule") or "k*nu:3", [nu])[nu] if opts.get("corrected") else ()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    start = opts.get("start") or "coupled"
    if start == "exact" and problem.exact is None:
        raise ConfigError("--start exact needs a problem with an exact solution")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", StepSizeWarning)
        traj = solve_corrected(problem, grid, sigma=sigma, start=start)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    has_exact = problem.exact is not None
    wr.writerow(["x", "y"] + (["exact", "error"] if has_exact else []) + ["newton_iters"])
    for x, y, it in zip(traj.points, traj.values, traj.newton_iters):
        row = [repr(float(x)), repr(float(y))]
        if has_exact:
            ex = float(problem.exact(x))
            row += [repr(ex), f"{abs(ex - y):.4e}"]
        wr.writerow(row + [int(it)])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def _experiments(cfg: VerificationConfig):
    reports = []
    for nu in (0.3, 0.5, 0.8):
        r = empirical_truncation_order(make_problem("example1", nu))
        reports.append(replace(r, name=f"truncation_order_nu{nu:g}"))
    for nu in (0.1, 0.5, 0.9):
        for scaled in (1e-3, 1e-1, 1e1, 1e3):
            dx = 1.0 / 64
            r = stability_experiment(nu, scaled / dx**nu, dx, 64)
            reports.append(replace(r, name=f"stability_nu{nu:g}_{scaled:g}"))
    return reports


def _cmd_verify(args, opts) -> int:
    try:
        cfg = VerificationConfig.from_dict(opts.get("verification", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    names = args.checks.split(",") if args.checks else opts.get("checks")
    try:
        reports = run_suite(cfg, names, workers=max(1, args.workers))
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    if args.experiments:
        reports += _experiments(cfg)
    for r in sorted(reports, key=lambda r: r.name):
        print(r.summary())
    if args.out is not None:
        Path(args.out).write_text(reports_to_json(reports) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_CONFIG if exc.code else EXIT_OK
    try:
        opts = _merged(args, _load_config(getattr(args, "config", None)))
        handler = {"solve": _cmd_solve, "study": _cmd_study, "verify": _cmd_verify}[args.command]
        return handler(args, opts)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except StudyCellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (NonConvergenceError, SingularJacobianError, IllConditionedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
