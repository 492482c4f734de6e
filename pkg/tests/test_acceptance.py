"""End-to-end acceptance gate.

One test per headline requirement; each prints a single PASS/FAIL line with
the measured numbers (run with -s to see them on success). Requirement 3
accepts either full three-way agreement at the standard step or a reproducible
characterized-discrepancy artifact; the full per-set table is printed either
way so nothing is hidden behind the disjunction.
"""
from __future__ import annotations

import math
import time

import numpy as np
import pytest

from oupulse.analytic import analytic_no_control, mixing_weights, quadratic_roots
from oupulse.experiments import load_catalog, run_group, run_scenario
from oupulse.model import (
    BathKernel,
    NoiseSpec,
    PulseProgram,
    RectangularPulse,
    SimulationConfig,
    SinePulse,
    ZeroEnergyPulse,
    pulse_integral,
)
from oupulse.solver import markovian_limit, simulate_ode
from oupulse.validation import run_validation

ALPHA0 = 5 + 0j


def _config(dt=1e-3, t_max=10.0):
    return SimulationConfig(alpha0=ALPHA0, omega0=1.0, t_max=t_max, dt=dt)


def _report_line(index: int, passed: bool, detail: str) -> None:
    print(f"[{'PASS' if passed else 'FAIL'}] requirement {index}: {detail}")


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


def test_requirement_1_analytic_numeric_agreement_no_control():
    worst = 0.0
    slowest = 0.0
    for gamma0 in (0.1, 1.0, 5.0):
        kernel = BathKernel(gamma0=gamma0, big_gamma=5.0)
        started = time.perf_counter()
        tr = simulate_ode(_config(), kernel)
        slowest = max(slowest, time.perf_counter() - started)
        exact = analytic_no_control(ALPHA0, 1.0, kernel, tr.times)
        worst = max(worst, float(np.max(np.abs(tr.values - exact))) / abs(ALPHA0))
    passed = worst < 1e-6 and slowest < 1.0
    _report_line(1, passed, f"free-decay sup relative error {worst:.3g} (tol 1e-6), "
                            f"slowest curve {slowest:.3f}s (limit 1s)")
    assert passed


def test_requirement_2_markov_limit():
    tr = simulate_ode(_config(dt=1e-4), BathKernel(gamma0=500.0, big_gamma=5.0))
    limit = markovian_limit(ALPHA0, 5.0, tr.times)
    rel = float(np.max(np.abs(tr.values - limit))) / abs(ALPHA0)
    passed = rel < 0.01
    _report_line(2, passed, f"gamma0=500 vs alpha0*exp(-Gamma*t/2): sup relative "
                            f"distance {rel:.4g} (tol 0.01)")
    assert passed


def test_requirement_3_three_way_oracle_equivalence(tmp_path):
    tol = 1e-4 * abs(ALPHA0)
    report = run_validation(only="vs", out_dir=tmp_path)
    by_name = {r.name: r for r in report.results}
    quad = by_name["ode-vs-quadrature"]
    rect = by_name["rectangular-analytic-vs-ode"]

    frame_rows = {row["set"]: row for row in rect.data["rows"]}
    print(f"  three-way table at the standard comparison step (tol {tol:g}):")
    print(f"  {'set':14s} {'ode-vs-quad':>12s} {'analytic(cont)':>14s} {'analytic(carry)':>15s}")
    for row in quad.data["rows"]:
        fr = frame_rows.get(row["set"])
        cont = f"{fr['continuous_distance']:.3g}" if fr else "-"
        carry = f"{fr['carryover_distance']:.3g}" if fr else "-"
        marker = "" if row["distance"] <= tol else "  <- over tol, see artifact"
        print(f"  {row['set']:14s} {row['distance']:12.3g} {cont:>14s} {carry:>15s}{marker}")

    all_within = all(row["distance"] <= tol for row in quad.data["rows"]) and all(
        row["continuous_distance"] <= tol for row in rect.data["rows"]
    )
    artifact = tmp_path / "discrepancy.json"
    artifact_arm = (
        quad.passed
        and rect.passed
        and artifact.exists()
        and all(row["characterized"] for row in quad.data["drift"])
    )
    passed = all_within or artifact_arm
    n_over = len(quad.data["drift"])
    detail = (
        f"{len(quad.data['rows'])} sets compared; "
        + ("all within tolerance" if all_within else
           f"{n_over} characterized second-order excesses; reproducible artifact at {artifact.name}")
    )
    _report_line(3, passed, detail)
    assert passed


def test_requirement_4_controlled_decay_across_memory_times(catalog):
    report = run_group(catalog, "fig1")
    outcomes = {a.name: a for r in report.reports for a in r.assertions}
    group = {a.name: a for a in report.assertions}
    passed = (
        outcomes["min-floor"].passed  # g0.1 stays above 0.95*|alpha0| throughout
        and outcomes["final-decreasing"].passed
        and group["finals-dominate"].passed
    )
    _report_line(4, passed, f"rect control: g0.1 min floor ({outcomes['min-floor'].detail}); "
                            f"finals decreasing in gamma0; controlled beats free decay per gamma0")
    assert passed


def test_requirement_5_strength_duty_and_period(catalog):
    _, fig2a = run_scenario(catalog.scenarios["fig2a"])
    _, fig2c = run_scenario(catalog.scenarios["fig2c"])
    _, fig2d = run_scenario(catalog.scenarios["fig2d"])
    a = {x.name: x for x in fig2a.assertions}
    passed = (
        fig2a.all_passed  # increasing in omega1; w50 >= 0.95*|alpha0|
        and fig2c.all_passed  # increasing in duty ratio
        and fig2d.all_passed  # period curves pairwise within 0.05*|alpha0|
    )
    worst_pair = max(fig2d.pairwise.values())
    _report_line(5, passed, f"final |alpha| increasing in strength ({a['final-floor'].detail}); "
                            f"increasing in duty ratio; period spread {worst_pair:.3g} <= 0.25")
    assert passed


def test_requirement_6_shape_equivalence_and_noise(catalog):
    report = run_group(catalog, "fig3")
    group = {a.name: a for a in report.assertions}
    passed = group["distance-ratio"].passed and group["noise-ordering"].passed
    _report_line(6, passed, f"rect-vs-sine: {group['distance-ratio'].detail}; "
                            f"noisy-vs-clean ordering: {group['noise-ordering'].detail}")
    assert passed


def test_requirement_7_zero_energy_pulses(catalog):
    _, fig4a = run_scenario(catalog.scenarios["fig4a"])
    _, fig4b = run_scenario(catalog.scenarios["fig4b"])
    a4a = {x.name: x for x in fig4a.assertions}
    a4b = {x.name: x for x in fig4b.assertions}
    passed = fig4a.all_passed and fig4b.all_passed
    _report_line(7, passed, f"zero-energy: g0.1 within 5% throughout ({a4a['min-floor'].detail}); "
                            f"increasing in strength with w250 within 5% ({a4b['final-floor'].detail})")
    assert passed


def test_requirement_8_property_suite():
    results = {}

    # conservation at big_gamma = 0
    tr = simulate_ode(_config(), BathKernel(gamma0=1.0, big_gamma=0.0),
                      PulseProgram(RectangularPulse(15.0, 0.05, 0.035)))
    results["conservation"] = float(np.max(np.abs(tr.magnitude - 5.0))) / 5.0 < 1e-10

    # exact start: alpha(0) = alpha0 and z(0) = 0 (flat first step)
    tr = simulate_ode(_config(), BathKernel(gamma0=1.0, big_gamma=5.0))
    results["initial-conditions"] = tr.values[0] == ALPHA0 and abs(tr.values[1] - ALPHA0) < 7e-6

    # root residuals and weight identity
    worst_res, worst_w = 0.0, 0.0
    for gamma0, c in ((0.1, 1.0), (1.0, 9.0), (5.0, 51.0), (1.0, -24.0)):
        a1, a2 = quadratic_roots(gamma0, c, 5.0)
        b, k = complex(gamma0, -c), 2.5 * gamma0
        scale = max(1.0, abs(a1) ** 2, abs(a2) ** 2)
        worst_res = max(worst_res, abs(a1 * a1 - b * a1 + k) / scale,
                        abs(a2 * a2 - b * a2 + k) / scale)
        w3, w4 = mixing_weights(a1, a2)
        worst_w = max(worst_w, abs(w3 + w4 - 1.0))
    results["root-residuals"] = worst_res < 1e-12
    results["weight-identity"] = worst_w < 1e-12

    # zero-energy pulses integrate to zero on every period
    zero = PulseProgram(ZeroEnergyPulse(25.0, 0.5))
    results["zero-energy-integral"] = all(
        abs(pulse_integral(zero, n * 0.5, (n + 1) * 0.5)) < 1e-12 for n in range(20)
    )

    # W=0 equals noiseless bitwise; same seed reproduces
    shape = RectangularPulse(15.0, 0.05, 0.025)
    kernel = BathKernel(gamma0=1.0, big_gamma=5.0)
    w0 = simulate_ode(_config(), kernel, PulseProgram(shape, NoiseSpec(strength=0.0)))
    clean = simulate_ode(_config(), kernel, PulseProgram(shape))
    noisy_a = simulate_ode(_config(), kernel, PulseProgram(shape, NoiseSpec(strength=2.0, seed=5)))
    noisy_b = simulate_ode(_config(), kernel, PulseProgram(shape, NoiseSpec(strength=2.0, seed=5)))
    results["zero-noise-identity"] = bool(np.array_equal(w0.values, clean.values))
    results["seed-determinism"] = bool(np.array_equal(noisy_a.values, noisy_b.values))

    # fourth-order convergence on a sine pulse
    program = PulseProgram(SinePulse(math.pi * 7.5, 0.05, 0.025))
    ref = simulate_ode(_config(dt=6.25e-5, t_max=2.0), kernel, program)
    errs = []
    for dt in (1e-3, 5e-4):
        t = simulate_ode(_config(dt=dt, t_max=2.0), kernel, program)
        errs.append(float(np.max(np.abs(t.values - ref.values[::round(dt / 6.25e-5)]))))
    ratio = errs[0] / errs[1]
    results["fourth-order"] = 12.0 < ratio < 20.0

    passed = all(results.values())
    detail = ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in results.items())
    _report_line(8, passed, detail)
    assert passed
