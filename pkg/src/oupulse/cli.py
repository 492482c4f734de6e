"""Command-line front end.

Thin shell over the library: every subcommand maps onto one library call
(simulate, run_scenario/run_group, sweep, run_validation) and adds only flag
parsing, output-directory resolution, and exit-code mapping.

Exit codes: 0 success, 1 runtime failure (solver error, failing check or
assertion), 2 usage error (bad flag value or combination, unknown name).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .experiments import (
    SWEEP_PARAMETERS,
    load_catalog,
    run_group,
    run_scenario,
    sweep,
)
from .model import (
    METHOD_ANALYTIC,
    METHOD_ODE,
    METHOD_QUADRATURE,
    BathKernel,
    NoiseSpec,
    PulseProgram,
    RectangularPulse,
    SimulationConfig,
    SinePulse,
    ValidationError,
    ZeroEnergyPulse,
)
from .solver import SolverError, check_resolution, default_dt, simulate
from .validation import check_names, run_validation
from ._backend import backend_name

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
OUT_ENV_VAR = "OUPULSE_OUT"

_METHOD_ALIASES = {
    "ode": METHOD_ODE,
    "quadrature": METHOD_QUADRATURE,
    METHOD_ODE: METHOD_ODE,
    METHOD_QUADRATURE: METHOD_QUADRATURE,
    METHOD_ANALYTIC: METHOD_ANALYTIC,
}


class UsageError(Exception):
    """Bad flag value or combination; rendered as 'error: <flag>: <why>'."""

    def __init__(self, flag: str, why: str):
        super().__init__(f"{flag}: {why}")
        self.flag = flag


def _require(condition: bool, flag: str, why: str) -> None:
    if not condition:
        raise UsageError(flag, why)


def _resolve_out(out_flag: str | None) -> Path:
    # the environment default applies only when --out is absent
    if out_flag is not None:
        return Path(out_flag)
    env = os.environ.get(OUT_ENV_VAR)
    return Path(env) if env else Path(".")


def _complex_flag(text: str) -> complex:
    try:
        return complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oupulse",
        description="Pulse-controlled oscillator mode damped by an "
        "Ornstein-Uhlenbeck bath: simulate, reproduce catalog scenarios, "
        "sweep parameters, cross-validate solution methods.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="integrate one parameter set and write the trajectory")
    sim.add_argument("--alpha0", type=_complex_flag, default=5 + 0j, help="initial amplitude (complex accepted)")
    sim.add_argument("--omega0", type=float, default=1.0, help="bare mode frequency")
    sim.add_argument("--gamma0", type=float, default=1.0, help="bath inverse memory time")
    sim.add_argument("--Gamma", type=float, default=5.0, help="damping strength")
    sim.add_argument("--pulse", choices=("none", "rect", "sine", "zero-energy"), default="none")
    sim.add_argument("--omega1", type=float, default=None, help="rect pulse strength")
    sim.add_argument("--omega2", type=float, default=None, help="sine pulse strength")
    sim.add_argument("--omega3", type=float, default=None, help="zero-energy pulse strength")
    sim.add_argument("--T", type=float, default=None, help="pulse period")
    sim.add_argument("--Delta-over-T", dest="delta_over_T", type=float, default=None,
                     help="on-window fraction of the period (rect/sine; default 0.5)")
    sim.add_argument("--W", type=float, default=0.0, help="multiplicative noise strength")
    sim.add_argument("--seed", type=int, default=0, help="noise stream seed")
    sim.add_argument("--t-max", dest="t_max", type=float, default=10.0)
    sim.add_argument("--dt", type=float, default=None, help="time step (default: resolved from the pulse)")
    sim.add_argument("--method", choices=sorted(_METHOD_ALIASES), default=METHOD_ODE)
    sim.add_argument("--label", default="alpha", help="curve label; also the output file stem")
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("--out", default=None, help=f"output directory (default: ${OUT_ENV_VAR} or .)")

    fig = sub.add_parser("figure", help="run catalog scenarios or figure groups")
    fig.add_argument("names", nargs="+", help="scenario or group names (see `oupulse list`)")
    fig.add_argument("--out", default=None)

    swp = sub.add_parser("sweep", help="rerun one scenario's template curve across parameter values")
    swp.add_argument("--base", required=True, help="catalog scenario supplying the template curve")
    swp.add_argument("--parameter", required=True, choices=SWEEP_PARAMETERS)
    swp.add_argument("--values", required=True, nargs="+", type=float)
    swp.add_argument("--out", default=None)

    val = sub.add_parser("validate", help="run the cross-method check suite")
    val.add_argument("--only", default=None, help="run only checks whose name contains this substring")
    val.add_argument("--out", default=None)

    sub.add_parser("list", help="list catalog scenarios, groups, and validation checks")
    return parser


# -- simulate -----------------------------------------------------------------


def _build_shape(args):
    strengths = {
        "rect": ("--omega1", args.omega1),
        "sine": ("--omega2", args.omega2),
        "zero-energy": ("--omega3", args.omega3),
    }
    if args.pulse == "none":
        for flag, value in (*strengths.values(), ("--T", args.T), ("--Delta-over-T", args.delta_over_T)):
            _require(value is None, flag, "only applies with an active --pulse family")
        _require(args.W == 0.0, "--W", "noise requires an active pulse")
        return None
    for family, (flag, value) in strengths.items():
        if family == args.pulse:
            _require(value is not None, flag, f"required with --pulse {args.pulse}")
            _require(math.isfinite(value) and value >= 0, flag, "must be >= 0 and finite")
        else:
            _require(value is None, flag, f"does not apply to --pulse {args.pulse}")
    _require(args.T is not None, "--T", f"required with --pulse {args.pulse}")
    _require(math.isfinite(args.T) and args.T > 0, "--T", "must be positive and finite")
    if args.pulse == "zero-energy":
        _require(args.delta_over_T is None, "--Delta-over-T", "does not apply to --pulse zero-energy")
        return ZeroEnergyPulse(args.omega3, args.T)
    ratio = 0.5 if args.delta_over_T is None else args.delta_over_T
    _require(0.0 < ratio <= 1.0, "--Delta-over-T", "must lie in (0, 1]")
    width = ratio * args.T
    if args.pulse == "rect":
        return RectangularPulse(args.omega1, args.T, width)
    return SinePulse(args.omega2, args.T, width)


def _build_simulation(args) -> tuple[SimulationConfig, BathKernel, PulseProgram]:
    _require(math.isfinite(args.gamma0) and args.gamma0 > 0, "--gamma0", "must be positive and finite")
    _require(math.isfinite(args.Gamma) and args.Gamma >= 0, "--Gamma", "must be >= 0 and finite")
    _require(math.isfinite(args.omega0), "--omega0", "must be finite")
    _require(math.isfinite(args.t_max) and args.t_max > 0, "--t-max", "must be positive and finite")
    _require(math.isfinite(args.W) and args.W >= 0, "--W", "must be >= 0 and finite")
    shape = _build_shape(args)
    noise = NoiseSpec(strength=args.W, seed=args.seed) if args.W > 0 else None
    program = PulseProgram(shape=shape, noise=noise)
    method = _METHOD_ALIASES[args.method]
    if method == METHOD_ANALYTIC:
        _require(not program.is_noisy, "--method", "no closed form for a noisy program")
        _require(
            shape is None or isinstance(shape, RectangularPulse),
            "--method",
            "closed form exists only for rectangular or absent control",
        )
    dt = args.dt
    if dt is None:
        dt = default_dt(program)
    else:
        _require(math.isfinite(dt) and dt > 0, "--dt", "must be positive and finite")
        _require(dt <= args.t_max, "--dt", "must not exceed --t-max")
        try:
            check_resolution(program, dt)
        except ValidationError as exc:
            raise UsageError("--dt", str(exc)) from exc
    kernel = BathKernel(gamma0=args.gamma0, big_gamma=args.Gamma)
    config = SimulationConfig(
        alpha0=args.alpha0, omega0=args.omega0, t_max=args.t_max, dt=dt, method=method
    )
    return config, kernel, program


def _write_trajectory_json(label, traj, path: Path) -> None:
    payload = {
        "label": label,
        "t": [float(x) for x in traj.times],
        "re": [float(x) for x in traj.values.real],
        "im": [float(x) for x in traj.values.imag],
        "abs": [float(x) for x in traj.magnitude],
    }
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _cmd_simulate(args) -> int:
    config, kernel, program = _build_simulation(args)
    try:
        traj = simulate(config, kernel, program)
    except ValidationError as exc:
        # post-parse rejections (e.g. the quadrature pair budget) trace back to
        # the step/horizon flags
        raise UsageError("--dt", str(exc)) from exc
    out = _resolve_out(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{args.label}.{args.format}"
    if args.format == "csv":
        from .experiments import export_csv

        export_csv([(args.label, traj)], path)
    else:
        _write_trajectory_json(args.label, traj, path)
    print(f"wrote {path} ({len(traj)} samples, final |alpha| = {traj.final_magnitude:.6g})")
    return EXIT_OK


# -- figure -------------------------------------------------------------------


def _cmd_figure(args) -> int:
    catalog = load_catalog()
    valid = catalog.names() + catalog.group_names()
    for name in args.names:
        if name not in valid:
            print(
                f"error: unknown figure {name!r}; valid names: {', '.join(valid)}",
                file=sys.stderr,
            )
            return EXIT_USAGE
    out = _resolve_out(args.out)
    failed: list[str] = []
    for name in args.names:
        if name in catalog.groups:
            report = run_group(catalog, name, out_dir=out)
            outcomes = [(f"{name}/{r.scenario}", a) for r in report.reports for a in r.assertions]
            outcomes += [(name, a) for a in report.assertions]
        else:
            _, rep = run_scenario(catalog.scenarios[name], out_dir=out)
            outcomes = [(name, a) for a in rep.assertions]
        for where, a in outcomes:
            status = "PASS" if a.passed else "FAIL"
            print(f"[{status}] {where}: {a.name}: {a.detail}")
            if not a.passed:
                failed.append(f"{where}/{a.name}")
    if failed:
        print(f"error: failing assertions: {', '.join(failed)}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


# -- sweep --------------------------------------------------------------------


def _cmd_sweep(args) -> int:
    catalog = load_catalog()
    if args.base not in catalog.scenarios:
        print(
            f"error: --base: unknown scenario {args.base!r}; valid: {', '.join(catalog.names())}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    if len(args.values) < 2:
        raise UsageError("--values", "needs at least two values")
    try:
        report = sweep(catalog.scenarios[args.base], args.parameter, args.values)
    except ValidationError as exc:
        raise UsageError("--parameter", str(exc)) from exc
    out = _resolve_out(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{report.scenario}.report.json"
    path.write_text(json.dumps(report.to_payload(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    for label, final in report.finals.items():
        print(f"{label}: final |alpha| = {final:.6g}")
    for a in report.assertions:
        print(f"[{'holds' if a.passed else 'fails'}] {a.name}: {a.detail}")
    print(f"wrote {path}")
    return EXIT_OK


# -- validate -----------------------------------------------------------------


def _cmd_validate(args) -> int:
    out = _resolve_out(args.out)
    try:
        report = run_validation(only=args.only, out_dir=out)
    except ValueError as exc:
        raise UsageError("--only", str(exc)) from exc
    for r in report.results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail}")
    if not report.all_passed:
        first = report.first_failure()
        print(f"error: check failed: {first.name}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


# -- list ---------------------------------------------------------------------


def _cmd_list(args) -> int:
    catalog = load_catalog()
    print("scenarios:")
    for name in catalog.names():
        print(f"  {name:8s} {catalog.scenarios[name].title}")
    print("groups:")
    for name in catalog.group_names():
        print(f"  {name:8s} {' '.join(catalog.groups[name].scenarios)}")
    print("validation checks:")
    for name in check_names():
        print(f"  {name}")
    print(f"backend: {backend_name()}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "figure": _cmd_figure,
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
    "list": _cmd_list,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.subcommand](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entry() -> None:
    sys.exit(main())
