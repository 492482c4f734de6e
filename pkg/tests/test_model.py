from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oupulse.model import (
    BathKernel,
    NoiseSpec,
    PulseProgram,
    RectangularPulse,
    SimulationConfig,
    SinePulse,
    Trajectory,
    ValidationError,
    ZeroEnergyPulse,
    kernel_eval,
    phase_integral,
    pulse_integral,
    pulse_value,
)


# -- bath kernel ---------------------------------------------------------------


def test_kernel_zero_lag_is_half_product():
    k = BathKernel(gamma0=2.0, big_gamma=3.0)
    assert k.coupling == 3.0
    assert kernel_eval(k, 0.0) == 3.0


def test_kernel_exponential_decay_value():
    # big_gamma*gamma0/2 * exp(-gamma0*|tau|) at (1, 1, tau=1): 0.5/e
    assert kernel_eval(BathKernel(gamma0=1.0, big_gamma=1.0), 1.0) == pytest.approx(
        0.18393972058572117, rel=1e-15
    )


def test_kernel_even_in_lag():
    k = BathKernel(gamma0=0.7, big_gamma=2.0)
    taus = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(kernel_eval(k, taus), kernel_eval(k, -taus))


@pytest.mark.parametrize("gamma0,big_gamma", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.5), (math.inf, 1.0)])
def test_kernel_rejects_bad_parameters(gamma0, big_gamma):
    with pytest.raises(ValidationError):
        BathKernel(gamma0=gamma0, big_gamma=big_gamma)


# -- pulse shapes ---------------------------------------------------------------


def test_rectangular_window_values():
    shape = RectangularPulse(8.0, 0.05, 0.035)
    program = PulseProgram(shape)
    assert pulse_value(program, 0.01) == 8.0
    assert pulse_value(program, 0.04) == 0.0
    assert pulse_value(program, 0.06) == 8.0  # second period


def test_sine_window_values():
    shape = SinePulse(2.0, 1.0, 0.5)
    program = PulseProgram(shape)
    assert pulse_value(program, 0.25) == pytest.approx(2.0)
    assert pulse_value(program, 0.75) == 0.0


def test_zero_energy_signs():
    program = PulseProgram(ZeroEnergyPulse(25.0, 0.5))
    assert pulse_value(program, 0.1) == 25.0
    assert pulse_value(program, 0.4) == -25.0


def test_pulse_rejects_bad_window():
    with pytest.raises(ValidationError):
        RectangularPulse(8.0, 0.05, 0.06)  # width > period
    with pytest.raises(ValidationError):
        SinePulse(8.0, -0.05, 0.01)
    with pytest.raises(ValidationError):
        ZeroEnergyPulse(-1.0, 0.5)


def test_rectangular_integral_per_period():
    # strength * width = 8 * 0.035
    program = PulseProgram(RectangularPulse(8.0, 0.05, 0.035))
    assert pulse_integral(program, 0.0, 0.05) == pytest.approx(0.28, rel=1e-12)


def test_sine_integral_over_window():
    # half-period sine window: strength * T/pi; (pi*7.5) * 0.05/pi = 0.375
    program = PulseProgram(SinePulse(math.pi * 7.5, 0.05, 0.025))
    assert pulse_integral(program, 0.0, 0.025) == pytest.approx(0.375, rel=1e-12)
    assert pulse_integral(program, 0.0, 0.05) == pytest.approx(0.375, rel=1e-12)


def test_equal_integral_pairing_rect_vs_sine():
    # omega2 = pi*omega1/2 at Delta/T = 1/2 matches integrals at window edges
    rect = PulseProgram(RectangularPulse(15.0, 0.05, 0.025))
    sine = PulseProgram(SinePulse(math.pi * 7.5, 0.05, 0.025))
    for n in range(8):
        for t in (n * 0.05 + 0.025, (n + 1) * 0.05):
            assert pulse_integral(rect, 0.0, t) == pytest.approx(
                pulse_integral(sine, 0.0, t), abs=1e-13
            )


def test_phase_integral_includes_base_frequency():
    program = PulseProgram(RectangularPulse(8.0, 0.05, 0.035))
    t = 0.4
    assert phase_integral(2.0, program, t) == pytest.approx(
        2.0 * t + pulse_integral(program, 0.0, t), rel=1e-12
    )


@settings(max_examples=60, deadline=None)
@given(
    strength=st.floats(0.1, 100.0),
    period=st.floats(0.01, 2.0),
    ratio=st.floats(0.05, 1.0),
    t=st.floats(0.0, 5.0),
)
def test_windowed_pulses_are_periodic(strength, period, ratio, t):
    width = ratio * period
    # stay away from the window edges, where rounding of t +/- period can
    # flip which side of the discontinuity a sample lands on
    pos = math.fmod(t, period)
    assume(min(abs(pos - x) for x in (0.0, width, period)) > 1e-6 * period)
    for shape in (RectangularPulse(strength, period, width), SinePulse(strength, period, width)):
        program = PulseProgram(shape)
        assert pulse_value(program, t) == pytest.approx(
            pulse_value(program, t + period), abs=1e-6 * strength
        )


@settings(max_examples=60, deadline=None)
@given(strength=st.floats(0.1, 300.0), period=st.floats(0.01, 2.0), n=st.integers(0, 20))
def test_zero_energy_integral_vanishes_each_period(strength, period, n):
    program = PulseProgram(ZeroEnergyPulse(strength, period))
    res = pulse_integral(program, n * period, (n + 1) * period)
    assert abs(res) < 1e-9 * strength * period


# -- noise ----------------------------------------------------------------------


def test_noise_same_seed_same_draws():
    spec = NoiseSpec(strength=2.0, seed=42)
    np.testing.assert_array_equal(spec.sample_factors(100), spec.sample_factors(100))


def test_noise_zero_strength_is_identity():
    factors = NoiseSpec(strength=0.0, seed=7).sample_factors(50)
    np.testing.assert_array_equal(factors, np.ones(50))


def test_noise_rejects_negative_strength():
    with pytest.raises(ValidationError):
        NoiseSpec(strength=-1.0)


def test_program_without_pulse_rejects_noise():
    with pytest.raises(ValidationError):
        PulseProgram(shape=None, noise=NoiseSpec(strength=1.0))


def test_is_noisy_needs_positive_strength():
    shape = RectangularPulse(8.0, 0.05, 0.035)
    assert not PulseProgram(shape).is_noisy
    assert not PulseProgram(shape, NoiseSpec(strength=0.0)).is_noisy
    assert PulseProgram(shape, NoiseSpec(strength=1.0)).is_noisy


# -- configuration and trajectories ----------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [
        {"t_max": -1.0},
        {"dt": 0.0},
        {"dt": 20.0},  # exceeds t_max
        {"omega0": math.nan},
        {"method": "bogus"},
    ],
)
def test_config_rejects_bad_values(kwargs):
    base = dict(alpha0=5 + 0j, omega0=1.0, t_max=10.0, dt=1e-3)
    base.update(kwargs)
    with pytest.raises(ValidationError):
        SimulationConfig(**base)


def test_trajectory_locks_and_copies_inputs():
    times = np.array([0.0, 1.0, 2.0])
    values = np.array([1 + 0j, 0.5j, -0.25])
    tr = Trajectory.from_values(times, values)
    times[1] = 99.0  # caller's array stays writable and detached
    assert tr.times[1] == 1.0
    with pytest.raises(ValueError):
        tr.values[0] = 0
    np.testing.assert_array_equal(tr.magnitude, [1.0, 0.5, 0.25])
    assert len(tr) == 3
    assert tr.final_magnitude == 0.25


def test_trajectory_rejects_unsorted_times():
    with pytest.raises(ValidationError):
        Trajectory.from_values(np.array([0.0, 2.0, 1.0]), np.zeros(3, dtype=complex))
    with pytest.raises(ValidationError):
        Trajectory.from_values(np.array([]), np.array([]))
