"""Scenario catalog, sweep engine, comparison metrics, and CSV/JSON emission.

The catalog ships as package data (``data/catalog.json``) so new derived
scenarios can be added without touching code. Parameters carry a provenance
tag: "reference" values are pinned by the reproduced figure's stated setup,
"derived" values are choices made here (sweep fill-ins, seeds, thresholds).
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .model import (
    BathKernel,
    NoiseSpec,
    PulseProgram,
    PulseShape,
    RectangularPulse,
    SimulationConfig,
    SinePulse,
    Trajectory,
    ValidationError,
    ZeroEnergyPulse,
)
from .solver import SolverError, build_grid, default_dt, markovian_trajectory, simulate_ode

PROVENANCE_TAGS = ("reference", "derived")
SWEEP_PARAMETERS = ("omega1", "omega3", "delta_over_T", "T", "gamma0", "W")

# CSV cells carry full float64 precision so rereading is lossless.
CSV_DIGITS = 17


@dataclass(frozen=True)
class CurveSpec:
    """One curve of a scenario panel."""

    label: str
    kernel: BathKernel
    program: PulseProgram
    markov: bool = False
    provenance: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Assertion:
    """Declarative check evaluated by run_scenario / run_group."""

    kind: str
    args: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    name: str
    title: str
    alpha0: complex
    omega0: float
    t_max: float
    dt: float | None  # None: resolved from the curves' pulse programs
    curves: tuple[CurveSpec, ...]
    assertions: tuple[Assertion, ...] = ()
    note: str = ""

    def resolved_dt(self) -> float:
        if self.dt is not None:
            return self.dt
        return min(default_dt(c.program) for c in self.curves)


@dataclass(frozen=True)
class FigureGroup:
    name: str
    scenarios: tuple[str, ...]
    assertions: tuple[Assertion, ...] = ()


@dataclass(frozen=True)
class AssertionOutcome:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ComparisonReport:
    """Per-scenario metrics; everything except runtime_s is deterministic."""

    scenario: str
    finals: Mapping[str, float]
    pairwise: Mapping[str, float]
    assertions: tuple[AssertionOutcome, ...]
    runtime_s: float

    @property
    def all_passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_payload(self) -> dict:
        return {
            "scenario": self.scenario,
            "finals": dict(self.finals),
            "pairwise": dict(self.pairwise),
            "assertions": [
                {"name": a.name, "passed": a.passed, "detail": a.detail}
                for a in self.assertions
            ],
        }


@dataclass(frozen=True)
class GroupReport:
    group: str
    reports: tuple[ComparisonReport, ...]
    assertions: tuple[AssertionOutcome, ...]
    runtime_s: float

    @property
    def all_passed(self) -> bool:
        return all(r.all_passed for r in self.reports) and all(
            a.passed for a in self.assertions
        )

    def to_payload(self) -> dict:
        return {
            "group": self.group,
            "scenarios": [r.to_payload() for r in self.reports],
            "assertions": [
                {"name": a.name, "passed": a.passed, "detail": a.detail}
                for a in self.assertions
            ],
        }


@dataclass(frozen=True)
class Catalog:
    scenarios: Mapping[str, Scenario]
    groups: Mapping[str, FigureGroup]

    def names(self) -> list[str]:
        return sorted(self.scenarios)

    def group_names(self) -> list[str]:
        return sorted(self.groups)


# -- catalog loading ---------------------------------------------------------


def _parse_pulse(obj: Mapping[str, Any] | None) -> PulseShape | None:
    if obj is None:
        return None
    family = obj.get("family")
    if family == "rect":
        return RectangularPulse(obj["strength"], obj["period"], obj["width"])
    if family == "sine":
        return SinePulse(obj["strength"], obj["period"], obj["width"])
    if family == "zero-energy":
        return ZeroEnergyPulse(obj["strength"], obj["period"])
    raise ValidationError(f"unknown pulse family {family!r}")


def _parse_noise(obj: Mapping[str, Any] | None) -> NoiseSpec | None:
    if obj is None:
        return None
    return NoiseSpec(
        strength=obj["strength"],
        mu=obj.get("mu", 0.0),
        sigma=obj.get("sigma", 1.0),
        seed=obj.get("seed", 0),
    )


def _check_provenance(tags: Mapping[str, str], where: str) -> None:
    for key, tag in tags.items():
        if tag not in PROVENANCE_TAGS:
            raise ValidationError(
                f"{where}: provenance for {key!r} must be one of {PROVENANCE_TAGS}, got {tag!r}"
            )


def _parse_scenario(obj: Mapping[str, Any]) -> Scenario:
    name = obj["name"]
    curves = []
    for c in obj["curves"]:
        provenance = dict(c.get("provenance", {}))
        _check_provenance(provenance, f"scenario {name}, curve {c['label']}")
        shape = _parse_pulse(c.get("pulse"))
        noise = _parse_noise(c.get("noise"))
        curves.append(
            CurveSpec(
                label=c["label"],
                kernel=BathKernel(gamma0=c["gamma0"], big_gamma=obj["big_gamma"]),
                program=PulseProgram(shape=shape, noise=noise),
                markov=bool(c.get("markov", False)),
                provenance=provenance,
            )
        )
    labels = [c.label for c in curves]
    if len(set(labels)) != len(labels):
        raise ValidationError(f"scenario {name}: duplicate curve labels")
    provenance = dict(obj.get("provenance", {}))
    _check_provenance(provenance, f"scenario {name}")
    assertions = tuple(
        Assertion(kind=a["kind"], args={k: v for k, v in a.items() if k != "kind"})
        for a in obj.get("assertions", [])
    )
    return Scenario(
        name=name,
        title=obj.get("title", name),
        alpha0=complex(obj["alpha0"][0], obj["alpha0"][1]),
        omega0=obj["omega0"],
        t_max=obj["t_max"],
        dt=obj.get("dt"),
        curves=tuple(curves),
        assertions=assertions,
        note=obj.get("note", ""),
    )


def load_catalog(path: str | Path | None = None) -> Catalog:
    """Load the scenario catalog from ``path`` or the packaged default."""
    if path is None:
        text = resources.files("oupulse").joinpath("data/catalog.json").read_text()
    else:
        text = Path(path).read_text()
    doc = json.loads(text)
    scenarios = {}
    for obj in doc["scenarios"]:
        s = _parse_scenario(obj)
        if s.name in scenarios:
            raise ValidationError(f"duplicate scenario name {s.name!r}")
        scenarios[s.name] = s
    groups = {}
    for obj in doc.get("groups", []):
        g = FigureGroup(
            name=obj["name"],
            scenarios=tuple(obj["scenarios"]),
            assertions=tuple(
                Assertion(kind=a["kind"], args={k: v for k, v in a.items() if k != "kind"})
                for a in obj.get("assertions", [])
            ),
        )
        for member in g.scenarios:
            if member not in scenarios:
                raise ValidationError(f"group {g.name!r} references unknown scenario {member!r}")
        groups[g.name] = g
    return Catalog(scenarios=scenarios, groups=groups)


# -- metrics -----------------------------------------------------------------


def sup_distance(t1: Trajectory, t2: Trajectory) -> float:
    """max over the shared grid of |alpha_1(t) - alpha_2(t)|."""
    if len(t1.times) != len(t2.times) or not np.array_equal(t1.times, t2.times):
        raise ValidationError("sup_distance requires identical time grids")
    return float(np.max(np.abs(t1.values - t2.values)))


def _pair_key(a: str, b: str) -> str:
    return f"{a}|{b}"


# -- assertion evaluation ----------------------------------------------------


class _ScenarioContext:
    def __init__(self, scenario: Scenario, trajs: Mapping[str, Trajectory]):
        self.scenario = scenario
        self.trajs = trajs
        self.finals = {lbl: tr.final_magnitude for lbl, tr in trajs.items()}
        self.alpha0_abs = abs(scenario.alpha0)

    def traj(self, label: str) -> Trajectory:
        try:
            return self.trajs[label]
        except KeyError:
            raise ValidationError(
                f"scenario {self.scenario.name}: no curve labeled {label!r}"
            ) from None


def _fmt(values: Sequence[float]) -> str:
    return ", ".join(f"{v:.6g}" for v in values)


def _eval_final_order(ctx: _ScenarioContext, args: Mapping, increasing: bool) -> tuple[bool, str]:
    labels = args["curves"]
    finals = [ctx.finals[lbl] for lbl in labels]
    pairs = zip(finals, finals[1:])
    ok = all(a < b for a, b in pairs) if increasing else all(a > b for a, b in pairs)
    word = "increasing" if increasing else "decreasing"
    return ok, f"final |alpha| over ({', '.join(labels)}) = ({_fmt(finals)}), expected strictly {word}"


def _eval_final_floor(ctx: _ScenarioContext, args: Mapping) -> tuple[bool, str]:
    label, fraction = args["curve"], args["fraction"]
    floor = fraction * ctx.alpha0_abs
    value = ctx.finals[label]
    return value >= floor, f"final |alpha| of {label} = {value:.6g}, floor {floor:.6g}"


def _eval_min_floor(ctx: _ScenarioContext, args: Mapping) -> tuple[bool, str]:
    label, fraction = args["curve"], args["fraction"]
    floor = fraction * ctx.alpha0_abs
    value = float(np.min(ctx.traj(label).magnitude))
    return value >= floor, f"min_t |alpha| of {label} = {value:.6g}, floor {floor:.6g}"


def _eval_pairwise_close(ctx: _ScenarioContext, args: Mapping) -> tuple[bool, str]:
    labels, fraction = args["curves"], args["fraction"]
    bound = fraction * ctx.alpha0_abs
    worst = 0.0
    for i, a in enumerate(labels):
        for b in labels[i + 1 :]:
            worst = max(worst, sup_distance(ctx.traj(a), ctx.traj(b)))
    return worst <= bound, f"worst pairwise sup distance {worst:.6g}, bound {bound:.6g}"


def _eval_matches_markov(ctx: _ScenarioContext, args: Mapping) -> tuple[bool, str]:
    label = args["curve"]
    tol = args.get("tol", 1e-12)
    tr = ctx.traj(label)
    kernel = next(c.kernel for c in ctx.scenario.curves if c.label == label)
    closed = markovian_trajectory(ctx.scenario.alpha0, kernel.big_gamma, tr.times)
    dist = sup_distance(tr, closed)
    return dist <= tol, f"sup distance of {label} to the white-noise closed form {dist:.3g}, tol {tol:g}"


_SCENARIO_CHECKS: dict[str, Callable[[_ScenarioContext, Mapping], tuple[bool, str]]] = {
    "final-increasing": lambda ctx, a: _eval_final_order(ctx, a, True),
    "final-decreasing": lambda ctx, a: _eval_final_order(ctx, a, False),
    "final-floor": _eval_final_floor,
    "min-floor": _eval_min_floor,
    "pairwise-close": _eval_pairwise_close,
    "matches-markov-limit": _eval_matches_markov,
}


def _eval_scenario_assertion(ctx: _ScenarioContext, assertion: Assertion) -> AssertionOutcome:
    try:
        check = _SCENARIO_CHECKS[assertion.kind]
    except KeyError:
        raise ValidationError(f"unknown assertion kind {assertion.kind!r}") from None
    passed, detail = check(ctx, assertion.args)
    return AssertionOutcome(name=assertion.kind, passed=passed, detail=detail)


# -- scenario execution ------------------------------------------------------


def run_scenario(
    scenario: Scenario,
    out_dir: str | Path | None = None,
) -> tuple[list[tuple[str, Trajectory]], ComparisonReport]:
    """Integrate every curve on one shared grid, evaluate the scenario's
    assertions, and (when out_dir is given) write <name>.csv and
    <name>.report.json.

    All curves share the grid so per-step noise draws pair across curves and
    sup distances are defined; markov-tagged curves use the white-noise
    closed form on the same grid.
    """
    started = time.perf_counter()
    dt = scenario.resolved_dt()
    grid = build_grid([c.program for c in scenario.curves], scenario.t_max, dt)
    trajs: dict[str, Trajectory] = {}
    for curve in scenario.curves:
        config = SimulationConfig(
            alpha0=scenario.alpha0, omega0=scenario.omega0, t_max=scenario.t_max, dt=dt
        )
        try:
            if curve.markov:
                tr = markovian_trajectory(scenario.alpha0, curve.kernel.big_gamma, grid.times)
            else:
                tr = simulate_ode(config, curve.kernel, curve.program, grid=grid)
        except SolverError as exc:
            raise SolverError(f"scenario {scenario.name}, curve {curve.label}: {exc}") from exc
        trajs[curve.label] = tr

    ctx = _ScenarioContext(scenario, trajs)
    labels = [c.label for c in scenario.curves]
    pairwise = {
        _pair_key(a, b): sup_distance(trajs[a], trajs[b])
        for i, a in enumerate(labels)
        for b in labels[i + 1 :]
    }
    outcomes = tuple(_eval_scenario_assertion(ctx, a) for a in scenario.assertions)
    report = ComparisonReport(
        scenario=scenario.name,
        finals=ctx.finals,
        pairwise=pairwise,
        assertions=outcomes,
        runtime_s=time.perf_counter() - started,
    )
    ordered = [(c.label, trajs[c.label]) for c in scenario.curves]
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        export_csv(ordered, out / f"{scenario.name}.csv")
        _write_json(report.to_payload(), out / f"{scenario.name}.report.json")
    return ordered, report


# -- group execution ---------------------------------------------------------


def _eval_group_assertion(
    assertion: Assertion,
    contexts: Mapping[str, _ScenarioContext],
) -> AssertionOutcome:
    args = assertion.args
    if assertion.kind == "finals-dominate":
        upper, lower = contexts[args["upper"]], contexts[args["lower"]]
        rows = [(lbl, upper.finals[lbl], lower.finals[lbl]) for lbl in args["curves"]]
        ok = all(u > l for _, u, l in rows)
        detail = "; ".join(f"{lbl}: {u:.6g} vs {l:.6g}" for lbl, u, l in rows)
        return AssertionOutcome("finals-dominate", ok, detail)
    if assertion.kind == "noise-ordering":
        fast, slow = contexts[args["fast"]], contexts[args["slow"]]
        clean = args["clean"]
        parts, ok = [], True
        for lbl in args["noisy"]:
            d_fast = sup_distance(fast.traj(lbl), fast.traj(clean))
            d_slow = sup_distance(slow.traj(lbl), slow.traj(clean))
            ok = ok and d_fast < d_slow
            parts.append(f"{lbl}: {d_fast:.6g} (fast) vs {d_slow:.6g} (slow)")
        return AssertionOutcome("noise-ordering", ok, "; ".join(parts))
    if assertion.kind == "distance-ratio":
        num, den = args["numerator"], args["denominator"]
        d_num = sup_distance(
            contexts[num["scenario"]].traj(num["a"]), contexts[num["scenario"]].traj(num["b"])
        )
        d_den = sup_distance(
            contexts[den["scenario"]].traj(den["a"]), contexts[den["scenario"]].traj(den["b"])
        )
        ratio = d_num / d_den if d_den > 0 else math.inf
        ok = ratio <= args["max_ratio"]
        return AssertionOutcome(
            "distance-ratio",
            ok,
            f"{d_num:.6g} / {d_den:.6g} = {ratio:.4g}, max {args['max_ratio']:g}",
        )
    raise ValidationError(f"unknown group assertion kind {assertion.kind!r}")


def run_group(
    catalog: Catalog,
    name: str,
    out_dir: str | Path | None = None,
) -> GroupReport:
    """Run every scenario of a figure group, then its cross-panel assertions."""
    started = time.perf_counter()
    group = catalog.groups.get(name)
    if group is None:
        raise ValidationError(f"unknown figure group {name!r}")
    contexts: dict[str, _ScenarioContext] = {}
    reports = []
    for member in group.scenarios:
        scenario = catalog.scenarios[member]
        ordered, report = run_scenario(scenario, out_dir=out_dir)
        contexts[member] = _ScenarioContext(scenario, dict(ordered))
        reports.append(report)
    outcomes = tuple(_eval_group_assertion(a, contexts) for a in group.assertions)
    report = GroupReport(
        group=name,
        reports=tuple(reports),
        assertions=outcomes,
        runtime_s=time.perf_counter() - started,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(report.to_payload(), out / f"{name}.report.json")
    return report


# -- sweeps ------------------------------------------------------------------


def _template_curve(base: Scenario) -> CurveSpec:
    for c in base.curves:
        if not c.markov:
            return c
    raise ValidationError(f"scenario {base.name} has no sweepable curve")


def _with_period(shape: PulseShape, period: float) -> PulseShape:
    if isinstance(shape, (RectangularPulse, SinePulse)):
        ratio = shape.width / shape.period
        return type(shape)(shape.strength, period, ratio * period)
    return ZeroEnergyPulse(shape.strength, period)


def _sweep_variant(template: CurveSpec, parameter: str, value: float) -> CurveSpec:
    shape, noise, kernel = template.program.shape, template.program.noise, template.kernel
    if parameter == "gamma0":
        kernel = BathKernel(gamma0=value, big_gamma=kernel.big_gamma)
    elif parameter == "W":
        base = noise or NoiseSpec(strength=0.0)
        noise = NoiseSpec(strength=value, mu=base.mu, sigma=base.sigma, seed=base.seed)
    elif parameter == "omega1":
        if not isinstance(shape, RectangularPulse):
            raise ValidationError("omega1 sweep requires a rectangular-pulse template")
        shape = RectangularPulse(value, shape.period, shape.width)
    elif parameter == "omega3":
        if not isinstance(shape, ZeroEnergyPulse):
            raise ValidationError("omega3 sweep requires a zero-energy-pulse template")
        shape = ZeroEnergyPulse(value, shape.period)
    elif parameter == "delta_over_T":
        if not isinstance(shape, (RectangularPulse, SinePulse)):
            raise ValidationError("delta_over_T sweep requires a windowed-pulse template")
        shape = type(shape)(shape.strength, shape.period, value * shape.period)
    elif parameter == "T":
        if shape is None:
            raise ValidationError("T sweep requires a pulsed template")
        shape = _with_period(shape, value)
    else:
        raise ValidationError(f"sweep parameter must be one of {SWEEP_PARAMETERS}, got {parameter!r}")
    return CurveSpec(
        label=f"{parameter}={value:g}",
        kernel=kernel,
        program=PulseProgram(shape=shape, noise=noise),
        provenance={parameter: "derived"},
    )


def sweep(base: Scenario, parameter: str, values: Sequence[float]) -> ComparisonReport:
    """Rerun the base scenario's template curve across ``values`` and report
    final-|alpha| orderings (both directions evaluated; callers assert the one
    they expect)."""
    if parameter not in SWEEP_PARAMETERS:
        raise ValidationError(f"sweep parameter must be one of {SWEEP_PARAMETERS}, got {parameter!r}")
    if len(values) < 2:
        raise ValidationError("sweep needs at least two values")
    template = _template_curve(base)
    curves = tuple(_sweep_variant(template, parameter, v) for v in values)
    labels = [c.label for c in curves]
    swept = Scenario(
        name=f"{base.name}-sweep-{parameter}",
        title=f"{base.title} ({parameter} sweep)",
        alpha0=base.alpha0,
        omega0=base.omega0,
        t_max=base.t_max,
        dt=base.dt,
        curves=curves,
        assertions=(
            Assertion("final-increasing", {"curves": labels}),
            Assertion("final-decreasing", {"curves": labels}),
        ),
    )
    _, report = run_scenario(swept)
    return report


# -- emission ----------------------------------------------------------------


def export_csv(trajs: Sequence[tuple[str, Trajectory]], path: str | Path) -> Path:
    """Write curves as columns: t, then re/im/abs per curve, 17 significant
    digits. An empty curve list still writes the header row."""
    path = Path(path)
    header = ["t"]
    columns: list[np.ndarray] = []
    times: np.ndarray | None = None
    for label, tr in trajs:
        if times is None:
            times = tr.times
        elif not np.array_equal(times, tr.times):
            raise ValidationError("export_csv requires a common time grid")
        header += [f"{label}_re", f"{label}_im", f"{label}_abs"]
        columns += [tr.values.real, tr.values.imag, tr.magnitude]
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            if times is not None:
                for i in range(len(times)):
                    row = [f"{times[i]:.{CSV_DIGITS}g}"]
                    row += [f"{col[i]:.{CSV_DIGITS}g}" for col in columns]
                    fh.write(",".join(row) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc
    return path


def _write_json(payload: dict, path: Path) -> Path:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path
