"""Command-line front end.

Every command writes CSV (to ``--out`` or stdout).  With ``--out`` a manifest
``<out stem>.manifest.json`` describing the resolved run is written next to it.
Exit codes: 0 success, 2 usage or expression error, 3 numerical/domain error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    MonotoneMap,
    error_study,
    expected_value,
    extreme_value,
    fht_curve,
)
from .errors import ExpressionError, FracAdamsError
from .expr import parse_expression
from .problems import BUILTINS
from .solver import SolverConfig, TimeGrid, solve
from .uncertain import AlphaGrid, UncertainProblem, alpha_path_problem, sweep

DETERMINISM = ("no random numbers are used; output depends only on the arguments "
               "and is independent of worker scheduling")


def fmt(v: float) -> str:
    return repr(float(v))


def parse_range(text: str) -> tuple[float, float, float]:
    try:
        lo, step, hi = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:step:hi, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return lo, step, hi


def range_values(lo: float, step: float, hi: float) -> np.ndarray:
    count = int(math.floor((hi - lo) / step + 1e-9))
    return np.round(lo + step * np.arange(count + 1), 12)


def parse_param(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    try:
        if not sep:
            raise ValueError
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}") from None


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--builtin", choices=sorted(BUILTINS), help="worked example")
    src.add_argument("--drift", help="drift f(t, x) expression")
    p.add_argument("--diffusion", default="0", help="diffusion g(t, x) expression")
    p.add_argument("--param", action="append", type=parse_param, default=[],
                   metavar="NAME=VALUE", help="bind an expression/builtin parameter")
    p.add_argument("--nu", type=float, help="fractional order in (0, 1]")
    p.add_argument("--x0", type=float, help="initial value")
    p.add_argument("--x-min", type=float, help="lower domain bound used by --clamp")
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.01, help="time step")
    p.add_argument("--n", type=int, default=3, help="interpolation nodes per window")
    p.add_argument("--memory", choices=("full", "increment"), default="full")
    p.add_argument("--corrector-iters", type=int, default=1)
    p.add_argument("--bootstrap-refine", type=int, default=10)
    p.add_argument("--clamp", action="store_true",
                   help="clamp x into the problem domain instead of failing")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, help="CSV output path (default stdout)")


def _add_alpha_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha-grid", type=parse_range, default=(0.01, 0.01, 0.99),
                   metavar="LO:STEP:HI")


def _add_j(p: argparse.ArgumentParser) -> None:
    p.add_argument("--j", default="x", help="monotone map J(x) as an expression in x")
    p.add_argument("--j-direction", choices=("increasing", "decreasing"), default="increasing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracadams", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="single alpha path")
    _add_problem_args(p)
    p.add_argument("--alpha", type=float, default=0.5)

    p = sub.add_parser("surface", help="inverse distribution over alpha and t")
    _add_problem_args(p)
    _add_alpha_grid(p)

    p = sub.add_parser("extreme", help="inverse distribution of the extreme value")
    _add_problem_args(p)
    _add_alpha_grid(p)
    _add_j(p)
    p.add_argument("--mode", choices=("infimum", "supremum"), default="infimum")

    p = sub.add_parser("fht", help="first hitting time distribution")
    _add_problem_args(p)
    _add_alpha_grid(p)
    _add_j(p)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--s-grid", type=parse_range, default=None, metavar="LO:STEP:HI")

    p = sub.add_parser("expected", help="expected value of J(X_t) for every grid time")
    _add_problem_args(p)
    _add_alpha_grid(p)
    _add_j(p)

    p = sub.add_parser("error-study", help="error of the linear example against its closed form")
    _add_problem_args(p)
    _add_alpha_grid(p)
    p.add_argument("--vary", choices=("n", "nu", "upsilon"), required=True)
    p.add_argument("--values", required=True, help="comma separated values")
    return parser


def resolve_problem(args) -> tuple[UncertainProblem, dict]:
    params = dict(args.param)
    if args.drift is None:
        name = args.builtin or "eg1"
        kwargs = dict(params)
        if args.nu is not None:
            kwargs["nu"] = args.nu
        if args.x0 is not None:
            kwargs["x0"] = args.x0
        kwargs["t_end"] = args.t_end
        try:
            case = BUILTINS[name](**kwargs)
        except TypeError as exc:
            raise ExpressionError(f"bad parameter for {name}: {exc}") from None
        summary = dict(source="builtin", builtin=name, params=case.params,
                    drift=case.drift_text, diffusion=case.diffusion_text)
        problem = case.problem
        if args.x_min is not None:
            problem = UncertainProblem(problem.nu, problem.drift, problem.diffusion,
                                       problem.x0, problem.t_start, problem.t_end,
                                       (args.x_min, None))
        return problem, summary
    if args.x0 is None:
        raise ExpressionError("--x0 is required with --drift")
    nu = 0.8 if args.nu is None else args.nu
    drift = parse_expression(args.drift, params)
    diffusion = parse_expression(args.diffusion, params)
    problem = UncertainProblem(nu, drift, diffusion, args.x0, 0.0, args.t_end,
                               (args.x_min, None))
    summary = dict(source="expression", drift=drift.canonical(), diffusion=diffusion.canonical(),
                params=params, nu=nu, x0=args.x0)
    return problem, summary


def resolve_config(args) -> SolverConfig:
    return SolverConfig(order=args.n, memory_mode=args.memory,
                        corrector_iterations=args.corrector_iters,
                        bootstrap_refine=args.bootstrap_refine,
                        on_domain_error="clamp" if args.clamp else "raise")


def _grid_info(lo: float, step: float, hi: float, count: int) -> dict:
    return dict(start=lo, step=step, end=hi, count=count)


def _monotone(args) -> MonotoneMap:
    expr = parse_expression(args.j)
    return MonotoneMap(lambda x: expr(0.0, x), args.j_direction)


def run(argv: Sequence[str]) -> tuple[str, dict, Path | None]:
    """Execute a command; returns the CSV text, the manifest body and ``--out``."""
    args = build_parser().parse_args(argv)
    problem, summary = resolve_problem(args)
    config = resolve_config(args)
    grid = TimeGrid.uniform(0.0, args.t_end, args.h)
    manifest = dict(
        tool="fracadams", version=__version__, command=list(argv), problem=summary,
        config=dict(order=config.order, memory_mode=config.memory_mode,
                    corrector_iterations=config.corrector_iterations,
                    bootstrap_refine=config.bootstrap_refine,
                    on_domain_error=config.on_domain_error),
        grids=dict(time=_grid_info(0.0, args.h, args.t_end, len(grid))),
        determinism=DETERMINISM,
    )
    buf = io.StringIO()

    def alpha_grid():
        lo, step, hi = args.alpha_grid
        ag = AlphaGrid(range_values(lo, step, hi))
        manifest["grids"]["alpha"] = _grid_info(lo, step, hi, len(ag))
        return ag

    if args.command == "solve":
        manifest["alpha"] = args.alpha
        traj = solve(alpha_path_problem(problem, args.alpha), grid, config)
        manifest["clamped"] = traj.clamped
        buf.write("t,x\n")
        for t, x in zip(traj.t, traj.values):
            buf.write(f"{fmt(t)},{fmt(x)}\n")

    elif args.command == "surface":
        surface = sweep(problem, alpha_grid(), grid, config, workers=args.workers)
        buf.write("t," + ",".join(f"alpha_{fmt(a)}" for a in surface.alphas) + "\n")
        for j, t in enumerate(surface.t):
            buf.write(fmt(t) + "," + ",".join(fmt(v) for v in surface.values[:, j]) + "\n")

    elif args.command in ("extreme", "fht", "expected"):
        J = _monotone(args)
        manifest["J"] = dict(expression=args.j, direction=args.j_direction)
        surface = sweep(problem, alpha_grid(), grid, config, workers=args.workers)
        if args.command == "extreme":
            manifest["mode"] = args.mode
            curve = extreme_value(surface, J, args.mode)
            rows = curve.rows()
            buf.write("abscissa,value\n")
        elif args.command == "fht":
            lo, step, hi = args.s_grid or (args.h, args.h, args.t_end)
            manifest["z"] = args.z
            s_values = range_values(lo, step, hi)
            manifest["grids"]["s"] = _grid_info(lo, step, hi, s_values.size)
            curve = fht_curve(surface, J, args.z, s_values)
            rows = curve.rows()
            buf.write("abscissa,value\n")
        else:
            rows = ((t, expected_value(surface, J, j)) for j, t in enumerate(surface.t))
            buf.write("t,value\n")
        for a, v in rows:
            buf.write(f"{fmt(a)},{fmt(v)}\n")

    elif args.command == "error-study":
        if args.drift is not None or (args.builtin or "eg1") != "eg1":
            raise ExpressionError("error-study needs the linear builtin eg1")
        params = summary["params"]
        values = [float(v) for v in args.values.split(",") if v.strip()]
        rows = error_study(args.vary, values, a=params["a"], b=params["b"],
                           upsilon=params["upsilon"], nu=params["nu"], order=args.n,
                           h=args.h, x0=params["x0"], memory_mode=args.memory,
                           bootstrap_refine=args.bootstrap_refine, alphas=alpha_grid())
        manifest["study"] = dict(vary=args.vary, values=values)
        buf.write("value,mae,log10_mae,max_error\n")
        for r in rows:
            buf.write(f"{fmt(r.value)},{fmt(r.mae)},{fmt(r.log10_mae)},{fmt(r.max_error)}\n")

    return buf.getvalue(), manifest, args.out


def _fail(exc: Exception, code: int) -> int:
    payload = dict(error=type(exc).__name__, message=str(exc), exit_code=code)
    for attr in ("t", "x", "alpha", "pos"):
        val = getattr(exc, attr, None)
        if isinstance(val, (int, float)) and math.isfinite(val):
            payload[attr] = val
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        text, manifest, out = run(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except ExpressionError as exc:
        return _fail(exc, 2)
    except FracAdamsError as exc:
        return _fail(exc, 3)

    if out is None:
        sys.stdout.write(text)
        return 0
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    manifest["outputs"] = [out.name]
    out.with_suffix(".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
