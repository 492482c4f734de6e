"""Cross-method validation suite.

Named checks compare the three solution paths (reduced-ODE RK4, direct
memory-integral quadrature, closed forms) over every parameter set in the
scenario catalog, plus structural identities (roots, weights, conservation,
noise determinism, convergence orders).

Two checks have a documented discrepancy arm. The quadrature oracle's plain
trapezoidal memory sum carries a systematic endpoint term that, for unipolar
rectangular control at high pulse strength, exceeds the headline tolerance at
the standard comparison step; the check then requires the deviation to shrink
second-order under step halving and records it in the discrepancy artifact.
The boundary-matching recursion in its "carryover" slope frame disagrees with
both numerical methods by a per-boundary slope rotation; the "continuous"
frame agrees to near machine precision. Both findings are emitted to
``discrepancy.json`` with everything needed to reproduce them.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from . import _backend
from .analytic import (
    SLOPE_FRAMES,
    analytic_no_control,
    analytic_trajectory,
    mixing_weights,
    quadratic_roots,
)
from .experiments import Catalog, CurveSpec, Scenario, load_catalog, sup_distance
from .model import (
    BathKernel,
    NoiseSpec,
    PulseProgram,
    RectangularPulse,
    SimulationConfig,
    SinePulse,
    ZeroEnergyPulse,
    pulse_integral,
)
from .solver import (
    build_grid,
    default_dt,
    markovian_limit,
    simulate_ode,
    simulate_quadrature,
)

AGREEMENT_TOL_FRACTION = 1e-4  # of |alpha0|, at the standard comparison step
COMPARISON_DT = 1e-3
RATIO_BAND = (3.2, 4.8)  # second-order signature under step halving
NOISY_RATIO_BAND = (2.5, 5.5)  # realization changes with the step count
RK4_ORDER_BAND = (12.0, 20.0)
CONSERVATION_TOL = 1e-10
NO_CONTROL_TOL = 1e-6
MARKOV_TOL = 0.01
ROOT_TOL = 1e-12
ARTIFACT_NAME = "discrepancy.json"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    data: Mapping = field(default_factory=dict)


@dataclass
class ValidationReport:
    results: list[CheckResult]
    artifact_path: Path | None = None

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def first_failure(self) -> CheckResult | None:
        return next((r for r in self.results if not r.passed), None)

    def to_payload(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "checks": [
                {"name": r.name, "passed": r.passed, "detail": r.detail, "data": dict(r.data)}
                for r in self.results
            ],
            "artifact": self.artifact_path.name if self.artifact_path else None,
        }


class _Context:
    """Shared state for one validation run."""

    def __init__(self, catalog: Catalog):
        self.catalog = catalog
        self.artifact_sections: dict[str, dict] = {}


def _catalog_sets(catalog: Catalog) -> list[tuple[str, Scenario, CurveSpec]]:
    """Every (scenario, curve) parameter set, closed-form markov rows excluded."""
    sets = []
    for name in catalog.names():
        scenario = catalog.scenarios[name]
        for curve in scenario.curves:
            if not curve.markov:
                sets.append((f"{name}/{curve.label}", scenario, curve))
    return sets


def _config(scenario: Scenario, dt: float) -> SimulationConfig:
    return SimulationConfig(
        alpha0=scenario.alpha0, omega0=scenario.omega0, t_max=scenario.t_max, dt=dt
    )


def _comparison_dt(program: PulseProgram) -> float:
    # never coarser than the standard step; finer where the width rule demands
    return min(COMPARISON_DT, default_dt(program))


def _segment_frequencies(scenario: Scenario, curve: CurveSpec) -> set[float]:
    shape = curve.program.shape
    if shape is None:
        return {scenario.omega0}
    if isinstance(shape, RectangularPulse):
        return {scenario.omega0, scenario.omega0 + shape.strength}
    if isinstance(shape, ZeroEnergyPulse):
        return {
            scenario.omega0,
            scenario.omega0 + shape.strength,
            scenario.omega0 - shape.strength,
        }
    return {scenario.omega0}  # sine sweeps a continuum; endpoints carry no closed form


# -- structural identities ----------------------------------------------------


def _check_quadratic_roots(ctx: _Context) -> CheckResult:
    """Root residuals and Vieta identities on every catalog parameter set."""
    worst = 0.0
    worst_at = ""
    count = 0
    for label, scenario, curve in _catalog_sets(ctx.catalog):
        for c in sorted(_segment_frequencies(scenario, curve)):
            a1, a2 = quadratic_roots(curve.kernel.gamma0, c, curve.kernel.big_gamma)
            b = complex(curve.kernel.gamma0, -c)
            k = 0.5 * curve.kernel.big_gamma * curve.kernel.gamma0
            scale = max(1.0, abs(a1) ** 2, abs(a2) ** 2)
            res = max(
                abs(a1 * a1 - b * a1 + k),
                abs(a2 * a2 - b * a2 + k),
                abs((a1 + a2) - b),
                abs(a1 * a2 - k),
            ) / scale
            count += 1
            if res > worst:
                worst, worst_at = res, f"{label} (c={c:g})"
    passed = worst < ROOT_TOL
    return CheckResult(
        "quadratic-roots",
        passed,
        f"{count} root pairs, worst scaled residual {worst:.3g} at {worst_at}, tol {ROOT_TOL:g}",
        {"worst": worst, "count": count},
    )


def _check_mixing_weights(ctx: _Context) -> CheckResult:
    """A3 + A4 = 1 for every root pair in the catalog."""
    worst = 0.0
    count = 0
    for label, scenario, curve in _catalog_sets(ctx.catalog):
        for c in sorted(_segment_frequencies(scenario, curve)):
            a1, a2 = quadratic_roots(curve.kernel.gamma0, c, curve.kernel.big_gamma)
            w3, w4 = mixing_weights(a1, a2)
            worst = max(worst, abs(w3 + w4 - 1.0))
            count += 1
    passed = worst < 1e-14
    return CheckResult(
        "mixing-weights",
        passed,
        f"{count} weight pairs, worst |A3+A4-1| = {worst:.3g}, tol 1e-14",
        {"worst": worst, "count": count},
    )


def _check_conservation(ctx: _Context) -> CheckResult:
    """big_gamma = 0 decouples the bath: |alpha| conserved by the ODE path."""
    shapes = [
        None,
        RectangularPulse(15.0, 0.05, 0.035),
        SinePulse(23.5, 0.05, 0.025),
        ZeroEnergyPulse(25.0, 0.5),
    ]
    worst = 0.0
    for shape in shapes:
        program = PulseProgram(shape=shape)
        config = SimulationConfig(alpha0=5.0 + 0j, omega0=1.0, t_max=10.0, dt=1e-3)
        tr = simulate_ode(config, BathKernel(gamma0=1.0, big_gamma=0.0), program)
        worst = max(worst, float(np.max(np.abs(tr.magnitude - abs(config.alpha0)))))
    rel = worst / 5.0
    return CheckResult(
        "conservation-gamma-zero",
        rel < CONSERVATION_TOL,
        f"worst relative |alpha| drift {rel:.3g} over 4 pulse families, tol {CONSERVATION_TOL:g}",
        {"worst_rel": rel},
    )


def _check_no_control(ctx: _Context) -> CheckResult:
    """ODE vs the two-exponential closed form without control."""
    worst = 0.0
    for gamma0 in (0.1, 1.0, 5.0):
        config = SimulationConfig(alpha0=5.0 + 0j, omega0=1.0, t_max=10.0, dt=1e-3)
        kernel = BathKernel(gamma0=gamma0, big_gamma=5.0)
        tr = simulate_ode(config, kernel)
        exact = analytic_no_control(config.alpha0, config.omega0, kernel, tr.times)
        worst = max(worst, float(np.max(np.abs(tr.values - exact))) / abs(config.alpha0))
    return CheckResult(
        "no-control-analytic-vs-ode",
        worst < NO_CONTROL_TOL,
        f"worst sup relative error {worst:.3g} over gamma0 in {{0.1, 1, 5}}, tol {NO_CONTROL_TOL:g}",
        {"worst_rel": worst},
    )


def _check_markov_limit(ctx: _Context) -> CheckResult:
    """Integrated gamma0=500 run against alpha0*exp(-Gamma t/2)."""
    config = SimulationConfig(alpha0=5.0 + 0j, omega0=1.0, t_max=10.0, dt=1e-4)
    tr = simulate_ode(config, BathKernel(gamma0=500.0, big_gamma=5.0))
    limit = markovian_limit(config.alpha0, 5.0, tr.times)
    rel = float(np.max(np.abs(tr.values - limit))) / abs(config.alpha0)
    return CheckResult(
        "markov-limit",
        rel < MARKOV_TOL,
        f"sup relative distance to the white-noise closed form {rel:.3g}, tol {MARKOV_TOL:g}",
        {"rel": rel},
    )


# -- cross-method comparisons -------------------------------------------------


def _check_ode_vs_quadrature(ctx: _Context) -> CheckResult:
    """Reduced ODE against the direct memory-integral quadrature, all sets.

    Within tolerance at the comparison step, or the excess must shrink
    second-order under step halving (trapezoid endpoint drift); characterized
    excesses go to the discrepancy artifact, anything else fails the check.
    """
    tol = None
    rows = []
    drift_rows = []
    failures = []
    for label, scenario, curve in _catalog_sets(ctx.catalog):
        dt = _comparison_dt(curve.program)
        tol = AGREEMENT_TOL_FRACTION * abs(scenario.alpha0)
        grid = build_grid([curve.program], scenario.t_max, dt)
        config = _config(scenario, dt)
        tr_ode = simulate_ode(config, curve.kernel, curve.program, grid=grid)
        tr_quad = simulate_quadrature(config, curve.kernel, curve.program, grid=grid)
        dist = sup_distance(tr_ode, tr_quad)
        rows.append({"set": label, "dt": dt, "distance": dist, "tolerance": tol})
        if dist <= tol:
            continue
        half = dt / 2.0
        grid2 = build_grid([curve.program], scenario.t_max, half)
        config2 = _config(scenario, half)
        tr_ode2 = simulate_ode(config2, curve.kernel, curve.program, grid=grid2)
        tr_quad2 = simulate_quadrature(config2, curve.kernel, curve.program, grid=grid2)
        dist2 = sup_distance(tr_ode2, tr_quad2)
        ratio = dist / dist2 if dist2 > 0 else math.inf
        band = NOISY_RATIO_BAND if curve.program.is_noisy else RATIO_BAND
        characterized = band[0] <= ratio <= band[1]
        drift_rows.append(
            {
                "set": label,
                "dt": dt,
                "distance": dist,
                "half_step_distance": dist2,
                "halving_ratio": ratio,
                "expected_ratio_band": list(band),
                "characterized": characterized,
            }
        )
        if not characterized:
            failures.append(f"{label}: distance {dist:.3g} over tol, halving ratio {ratio:.2f} outside {band}")
    ctx.artifact_sections["quadrature-endpoint-drift"] = {
        "summary": (
            "plain trapezoidal memory weights carry a moving-endpoint error term "
            "~ (dt^2/12)*(gamma0 + i*omega_eff)*coupling*alpha; for unipolar "
            "rectangular control it accumulates coherently, so these sets exceed "
            "the headline tolerance at the comparison step while converging at "
            "second order"
        ),
        "tolerance_fraction": AGREEMENT_TOL_FRACTION,
        "comparison_step": COMPARISON_DT,
        "over_tolerance_sets": drift_rows,
        "reproduce": "oupulse validate --only quadrature",
    }
    n_over = len(drift_rows)
    if failures:
        return CheckResult(
            "ode-vs-quadrature",
            False,
            "; ".join(failures),
            {"rows": rows, "drift": drift_rows},
        )
    worst_within = max((r["distance"] for r in rows if r["distance"] <= r["tolerance"]), default=0.0)
    return CheckResult(
        "ode-vs-quadrature",
        True,
        f"{len(rows)} sets; {len(rows) - n_over} within {tol:g} (worst {worst_within:.3g}); "
        f"{n_over} second-order-characterized endpoint-drift excesses recorded in the artifact",
        {"rows": rows, "drift": drift_rows},
    )


def _check_rectangular_analytic(ctx: _Context) -> CheckResult:
    """ODE against the boundary-matching chain, both slope frames, all
    noiseless rectangular sets. The continuous frame must meet the headline
    tolerance; the carryover frame's deviation is recorded per set in the
    discrepancy artifact (it must be reproducible, not small)."""
    rows = []
    failures = []
    tol = None
    for label, scenario, curve in _catalog_sets(ctx.catalog):
        if curve.program.is_noisy or not isinstance(curve.program.shape, RectangularPulse):
            continue
        dt = _comparison_dt(curve.program)
        tol = AGREEMENT_TOL_FRACTION * abs(scenario.alpha0)
        config = _config(scenario, dt)
        tr_ode = simulate_ode(config, curve.kernel, curve.program)
        frames = {}
        carry = None
        for frame in SLOPE_FRAMES:
            tr_an = analytic_trajectory(
                config, curve.kernel, curve.program, tr_ode.times, slope_frame=frame
            )
            frames[frame] = sup_distance(tr_ode, tr_an)
            if frame == "carryover":
                carry = tr_an
        rerun = analytic_trajectory(
            config, curve.kernel, curve.program, tr_ode.times, slope_frame="carryover"
        )
        reproducible = bool(np.array_equal(carry.values, rerun.values)) and math.isfinite(
            frames["carryover"]
        )
        shape = curve.program.shape
        rows.append(
            {
                "set": label,
                "dt": dt,
                "continuous_distance": frames["continuous"],
                "carryover_distance": frames["carryover"],
                "first_edge_rotation_rad": shape.strength * shape.width,
                "tolerance": tol,
            }
        )
        if frames["continuous"] > tol:
            failures.append(f"{label}: continuous frame off by {frames['continuous']:.3g} (tol {tol:g})")
        if not reproducible:
            failures.append(f"{label}: carryover deviation not reproducible")
    ctx.artifact_sections["analytic-boundary-frame"] = {
        "summary": (
            "the boundary system's slope row, stated with the previous segment's "
            "effective frequency in its exponential prefactor (carryover frame), "
            "rotates the matched slope by exp(i*(c_new - c_old)*t_boundary) at "
            "every edge; enforcing continuity of alpha' instead (continuous "
            "frame) matches the two numerical methods to near machine precision"
        ),
        "per_set": rows,
        "reproduce": "oupulse validate --only rectangular",
    }
    if failures:
        return CheckResult("rectangular-analytic-vs-ode", False, "; ".join(failures), {"rows": rows})
    worst_cont = max(r["continuous_distance"] for r in rows)
    worst_carry = max(r["carryover_distance"] for r in rows)
    return CheckResult(
        "rectangular-analytic-vs-ode",
        True,
        f"{len(rows)} rectangular sets: continuous frame within {worst_cont:.3g} of the ODE "
        f"(tol {tol:g}); carryover frame deviates by up to {worst_carry:.3g}, recorded in the artifact",
        {"rows": rows},
    )


def _check_convergence_order(ctx: _Context) -> CheckResult:
    """Empirical orders: RK4 (sine control) ~4, quadrature (rect control) ~2."""
    kernel = BathKernel(gamma0=1.0, big_gamma=5.0)
    sine = PulseProgram(SinePulse(math.pi * 7.5, 0.05, 0.025))
    ref_cfg = SimulationConfig(alpha0=5.0 + 0j, omega0=1.0, t_max=2.0, dt=6.25e-5)
    ref = simulate_ode(ref_cfg, kernel, sine)
    errors = []
    for dt in (1e-3, 5e-4):
        cfg = SimulationConfig(alpha0=5.0 + 0j, omega0=1.0, t_max=2.0, dt=dt)
        tr = simulate_ode(cfg, kernel, sine)
        stride = round(dt / ref_cfg.dt)
        errors.append(float(np.max(np.abs(tr.values - ref.values[::stride]))))
    rk4_ratio = errors[0] / errors[1]

    rect = PulseProgram(RectangularPulse(15.0, 0.05, 0.035))
    dists = []
    for dt in (1e-3, 5e-4):
        cfg = SimulationConfig(alpha0=5.0 + 0j, omega0=1.0, t_max=10.0, dt=dt)
        grid = build_grid([rect], cfg.t_max, dt)
        tr_o = simulate_ode(cfg, kernel, rect, grid=grid)
        tr_q = simulate_quadrature(cfg, kernel, rect, grid=grid)
        dists.append(sup_distance(tr_o, tr_q))
    quad_ratio = dists[0] / dists[1]

    ok = RK4_ORDER_BAND[0] <= rk4_ratio <= RK4_ORDER_BAND[1] and RATIO_BAND[0] <= quad_ratio <= RATIO_BAND[1]
    return CheckResult(
        "convergence-order",
        ok,
        f"RK4 halving ratio {rk4_ratio:.1f} (expected {RK4_ORDER_BAND}), "
        f"quadrature halving ratio {quad_ratio:.2f} (expected {RATIO_BAND})",
        {"rk4_ratio": rk4_ratio, "quadrature_ratio": quad_ratio},
    )


def _check_noise_determinism(ctx: _Context) -> CheckResult:
    """Same seed reproduces bit-identical runs; W=0 equals the noiseless path."""
    kernel = BathKernel(gamma0=1.0, big_gamma=5.0)
    config = SimulationConfig(alpha0=5.0 + 0j, omega0=1.0, t_max=10.0, dt=1e-3)
    shape = RectangularPulse(15.0, 0.05, 0.025)
    noisy = lambda seed, w: PulseProgram(shape, noise=NoiseSpec(strength=w, seed=seed))
    a = simulate_ode(config, kernel, noisy(1234, 2.0))
    b = simulate_ode(config, kernel, noisy(1234, 2.0))
    c = simulate_ode(config, kernel, noisy(1235, 2.0))
    zero_w = simulate_ode(config, kernel, noisy(1234, 0.0))
    clean = simulate_ode(config, kernel, PulseProgram(shape))
    same_seed = bool(np.array_equal(a.values, b.values))
    diff_seed = not np.array_equal(a.values, c.values)
    w0 = bool(np.array_equal(zero_w.values, clean.values))
    ok = same_seed and diff_seed and w0
    return CheckResult(
        "noise-determinism",
        ok,
        f"same-seed identical: {same_seed}; different-seed distinct: {diff_seed}; "
        f"W=0 equals noiseless: {w0}",
        {},
    )


def _check_pulse_integrals(ctx: _Context) -> CheckResult:
    """Equal-integral identities: rect vs sine at omega2 = pi*omega1/2 and
    Delta/T = 1/2 match at window edges; zero-energy nets zero per period."""
    rect = PulseProgram(RectangularPulse(15.0, 0.05, 0.025))
    sine = PulseProgram(SinePulse(math.pi * 7.5, 0.05, 0.025))
    worst = 0.0
    for n in range(10):
        for t in (n * 0.05 + 0.025, (n + 1) * 0.05):
            worst = max(worst, abs(pulse_integral(rect, 0.0, t) - pulse_integral(sine, 0.0, t)))
    zero = PulseProgram(ZeroEnergyPulse(25.0, 0.5))
    worst_zero = max(abs(pulse_integral(zero, n * 0.5, (n + 1) * 0.5)) for n in range(10))
    ok = worst < 1e-12 and worst_zero < 1e-12
    return CheckResult(
        "pulse-integral-identities",
        ok,
        f"rect-vs-sine window-edge mismatch {worst:.3g}; zero-energy per-period residue "
        f"{worst_zero:.3g}; tol 1e-12",
        {"rect_vs_sine": worst, "zero_energy": worst_zero},
    )


def _check_backend_equality(ctx: _Context) -> CheckResult:
    """Compiled and pure kernels produce the same trajectories."""
    if _backend.BACKEND == "pure-python":
        return CheckResult(
            "backend-equality",
            True,
            "compiled kernels not built; pure-python backend is the only implementation",
            {"backend": _backend.BACKEND},
        )
    from . import _kernels_py
    from .solver import _noise_factors, phase_on_grid, segment_profile

    kernel = BathKernel(gamma0=1.0, big_gamma=5.0)
    config = SimulationConfig(alpha0=5.0 + 0j, omega0=1.0, t_max=10.0, dt=1e-3)
    program = PulseProgram(RectangularPulse(50.0, 0.05, 0.035))
    grid = build_grid([program], config.t_max, config.dt)
    tr_ode = simulate_ode(config, kernel, program, grid=grid)
    tr_quad = simulate_quadrature(config, kernel, program, grid=grid)

    kind, amp, freq = segment_profile(program, grid)
    factors = _noise_factors(program, grid.n_steps)
    out = np.empty(len(grid.times), dtype=complex)
    _kernels_py.rk4_ode(
        complex(config.alpha0), grid.seg_t0, grid.seg_dt, grid.seg_nsteps,
        kind, amp, freq, config.omega0, kernel.coupling, kernel.gamma0, factors, out,
    )
    d_rk4 = float(np.max(np.abs(tr_ode.values - out)))
    phi = phase_on_grid(config, program, grid)
    _kernels_py.volterra_pc(
        complex(config.alpha0), grid.times, phi, kernel.coupling, kernel.gamma0, out
    )
    d_quad = float(np.max(np.abs(tr_quad.values - out)))
    ok = d_rk4 < 1e-12 and d_quad < 1e-9
    return CheckResult(
        "backend-equality",
        ok,
        f"compiled vs pure: RK4 within {d_rk4:.3g} (tol 1e-12), quadrature within "
        f"{d_quad:.3g} (tol 1e-9)",
        {"rk4": d_rk4, "quadrature": d_quad},
    )


CHECKS: tuple[tuple[str, Callable[[_Context], CheckResult]], ...] = (
    ("quadratic-roots", _check_quadratic_roots),
    ("mixing-weights", _check_mixing_weights),
    ("conservation-gamma-zero", _check_conservation),
    ("no-control-analytic-vs-ode", _check_no_control),
    ("markov-limit", _check_markov_limit),
    ("ode-vs-quadrature", _check_ode_vs_quadrature),
    ("rectangular-analytic-vs-ode", _check_rectangular_analytic),
    ("convergence-order", _check_convergence_order),
    ("noise-determinism", _check_noise_determinism),
    ("pulse-integral-identities", _check_pulse_integrals),
    ("backend-equality", _check_backend_equality),
)


def check_names() -> list[str]:
    return [name for name, _ in CHECKS]


def run_validation(
    only: str | None = None,
    out_dir: str | Path | None = None,
    catalog: Catalog | None = None,
) -> ValidationReport:
    """Run the named checks (all, or those whose name contains ``only``).

    With ``out_dir``: writes ``validation.json`` (the machine-readable summary)
    and ``discrepancy.json`` (the documented-deviation artifact) there.
    """
    catalog = catalog or load_catalog()
    selected = [(n, f) for n, f in CHECKS if only is None or only in n]
    if not selected:
        raise ValueError(f"no validation check matches {only!r}; known: {check_names()}")
    ctx = _Context(catalog)
    # no timings in the results: the summary must be byte-identical across reruns
    results = [fn(ctx) for _, fn in selected]
    report = ValidationReport(results=results)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if ctx.artifact_sections:
            artifact = out / ARTIFACT_NAME
            artifact.write_text(
                json.dumps(ctx.artifact_sections, sort_keys=True, indent=2) + "\n",
                encoding="utf-8",
            )
            report.artifact_path = artifact
        (out / "validation.json").write_text(
            json.dumps(report.to_payload(), sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
    return report
