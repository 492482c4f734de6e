"""Domain types for a pulse-controlled oscillator mode damped by a memory bath.

All quantities are dimensionless: frequencies in units of the bare mode
frequency, times in its inverse. The bath correlation is a single decaying
exponential (Ornstein-Uhlenbeck form), which is what makes the reduced
dynamics exactly solvable elsewhere in this package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

METHOD_ODE = "ode-reduction"
METHOD_QUADRATURE = "quadrature-oracle"
METHOD_ANALYTIC = "analytic"
METHODS = (METHOD_ODE, METHOD_QUADRATURE, METHOD_ANALYTIC)

SEGMENT_CONST = 0
SEGMENT_SINE = 1


class ValidationError(ValueError):
    """A domain object was constructed with inconsistent parameters."""


@dataclass(frozen=True)
class BathKernel:
    """Ornstein-Uhlenbeck bath memory kernel.

    Parameters
    ----------
    gamma0 : float
        Inverse memory time of the bath; larger values mean a shorter memory.
        The white-noise (memoryless) limit is gamma0 -> infinity.
    big_gamma : float
        Overall damping strength. big_gamma = 0 decouples the mode.
    """

    gamma0: float
    big_gamma: float

    def __post_init__(self):
        if not (self.gamma0 > 0 and math.isfinite(self.gamma0)):
            raise ValidationError(f"gamma0 must be positive and finite, got {self.gamma0}")
        if not (self.big_gamma >= 0 and math.isfinite(self.big_gamma)):
            raise ValidationError(f"big_gamma must be >= 0 and finite, got {self.big_gamma}")

    @property
    def coupling(self) -> float:
        """Kernel value at zero lag, big_gamma*gamma0/2."""
        return 0.5 * self.big_gamma * self.gamma0


def kernel_eval(kernel: BathKernel, tau: float | np.ndarray):
    """Memory kernel big_gamma*gamma0/2 * exp(-gamma0*|tau|) at lag tau."""
    return kernel.coupling * np.exp(-kernel.gamma0 * np.abs(tau))


@dataclass(frozen=True)
class RectangularPulse:
    """Periodic rectangular frequency shift.

    The shift equals `strength` on (n*period, n*period + width] for every
    integer n >= 0 and is zero otherwise.
    """

    strength: float
    period: float
    width: float

    def __post_init__(self):
        _check_periodic(self.strength, self.period)
        if not 0 < self.width <= self.period:
            raise ValidationError(f"width must satisfy 0 < width <= period, got {self.width}")


@dataclass(frozen=True)
class SinePulse:
    """Periodic sine-shaped frequency shift.

    The shift equals strength*sin(2*pi*t/period) on (n*period, n*period + width]
    and is zero otherwise.
    """

    strength: float
    period: float
    width: float

    def __post_init__(self):
        _check_periodic(self.strength, self.period)
        if not 0 < self.width <= self.period:
            raise ValidationError(f"width must satisfy 0 < width <= period, got {self.width}")


@dataclass(frozen=True)
class ZeroEnergyPulse:
    """Alternating-sign rectangular shift with zero integral per period.

    +strength on the first half-period, -strength on the second half.
    """

    strength: float
    period: float

    def __post_init__(self):
        _check_periodic(self.strength, self.period)

    @property
    def width(self) -> float:
        """Width of one constant-sign lobe (half the period)."""
        return 0.5 * self.period


def _check_periodic(strength: float, period: float) -> None:
    if not (strength >= 0 and math.isfinite(strength)):
        raise ValidationError(f"strength must be >= 0 and finite, got {strength}")
    if not (period > 0 and math.isfinite(period)):
        raise ValidationError(f"period must be positive and finite, got {period}")


PulseShape = RectangularPulse | SinePulse | ZeroEnergyPulse


@dataclass(frozen=True)
class NoiseSpec:
    """Multiplicative Gaussian noise on the pulse amplitude.

    Each integration step draws one sample n ~ Normal(mu, sigma) and the pulse
    value is scaled by (1 + strength*n) for the whole step. Streams are owned
    per run: the same seed always reproduces the same samples.
    """

    strength: float
    mu: float = 0.0
    sigma: float = 1.0
    seed: int = 0
    sampling: str = "per-step"

    def __post_init__(self):
        if not (self.strength >= 0 and math.isfinite(self.strength)):
            raise ValidationError(f"noise strength must be >= 0, got {self.strength}")
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ValidationError(f"sigma must be >= 0, got {self.sigma}")
        if not math.isfinite(self.mu):
            raise ValidationError(f"mu must be finite, got {self.mu}")
        if self.sampling != "per-step":
            raise ValidationError(f"unsupported sampling mode {self.sampling!r}")

    def sample_factors(self, n_steps: int) -> np.ndarray:
        """Per-step multipliers 1 + strength*n_k, one per integration step."""
        rng = np.random.default_rng(self.seed)
        draws = self.mu + self.sigma * rng.standard_normal(n_steps)
        return 1.0 + self.strength * draws


@dataclass(frozen=True)
class PulseProgram:
    """A pulse shape plus optional multiplicative noise. shape=None means no control."""

    shape: PulseShape | None = None
    noise: NoiseSpec | None = None

    def __post_init__(self):
        if self.shape is None and self.noise is not None:
            raise ValidationError("a program without a pulse admits no noise")

    @property
    def is_noisy(self) -> bool:
        return self.noise is not None and self.noise.strength > 0


def pulse_value(program: PulseProgram, t: float, noise_sample: float | None = None) -> float:
    """Pulse shift at time t.

    Interval membership is half-open: the pulse is on for t in
    (n*period, n*period + width], and every shape evaluates to 0 at t = 0.
    For a noisy program the realized Gaussian sample for the current step must
    be supplied; noise with strength 0 is identical to no noise.
    """
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t}")
    base = _shape_value(program.shape, t)
    if program.is_noisy:
        if noise_sample is None:
            raise ValidationError("noisy program needs the realized per-step sample")
        return base * (1.0 + program.noise.strength * noise_sample)
    return base


def _shape_value(shape: PulseShape | None, t: float) -> float:
    if shape is None or t == 0.0:
        return 0.0
    if isinstance(shape, ZeroEnergyPulse):
        tau = math.fmod(t, shape.period)
        if tau == 0.0:
            return -shape.strength  # end of the negative lobe
        return shape.strength if tau <= 0.5 * shape.period else -shape.strength
    tau = math.fmod(t, shape.period)
    if not 0.0 < tau <= shape.width:
        # tau == 0 belongs to the previous period's off span (or t = n*period edge)
        if not (tau == 0.0 and shape.width == shape.period and t > 0):
            return 0.0
    if isinstance(shape, RectangularPulse):
        return shape.strength
    return shape.strength * math.sin(2.0 * math.pi * t / shape.period)


def pulse_integral(program: PulseProgram, t0: float, t1: float) -> float:
    """Integral of the noiseless pulse shift over [t0, t1].

    Noisy programs are rejected: their integral is realization dependent and
    lives in the solver, not here.
    """
    if program.is_noisy:
        raise ValidationError("pulse integral is undefined for a noisy program")
    if t0 < 0 or t1 < t0:
        raise ValidationError(f"need 0 <= t0 <= t1, got [{t0}, {t1}]")
    return _cumulative(program.shape, t1) - _cumulative(program.shape, t0)


def _cumulative(shape: PulseShape | None, t: float) -> float:
    """Integral of the shape over [0, t]; continuous in t."""
    if shape is None or t <= 0.0:
        return 0.0
    n = math.floor(t / shape.period)
    tau = t - n * shape.period
    if isinstance(shape, RectangularPulse):
        per_period = shape.strength * shape.width
        partial = shape.strength * min(tau, shape.width)
    elif isinstance(shape, SinePulse):
        scale = shape.strength * shape.period / (2.0 * math.pi)
        per_period = scale * (1.0 - math.cos(2.0 * math.pi * shape.width / shape.period))
        partial = scale * (1.0 - math.cos(2.0 * math.pi * min(tau, shape.width) / shape.period))
    else:  # zero-energy: lobes cancel over each full period
        per_period = 0.0
        half = 0.5 * shape.period
        partial = shape.strength * (tau if tau <= half else shape.period - tau)
    return n * per_period + partial


def phase_integral(omega0: float, program: PulseProgram, t: float) -> float:
    """Accumulated frequency integral omega0*t + integral of the pulse over [0, t]."""
    return omega0 * t + pulse_integral(program, 0.0, t)


@dataclass(frozen=True)
class PulseSegment:
    """Maximal span on which the pulse shift is a single smooth formula.

    kind SEGMENT_CONST: shift = amp. kind SEGMENT_SINE: shift = amp*sin(freq*t)
    with absolute time t. Endpoints are shared with neighbours.
    """

    t0: float
    t1: float
    kind: int
    amp: float
    freq: float = 0.0


def pulse_segments(program: PulseProgram, t_max: float) -> list[PulseSegment]:
    """Split [0, t_max] at every pulse discontinuity.

    Integrators step each segment separately so the discontinuities always land
    on step boundaries and within-step smoothness is preserved.
    """
    if t_max <= 0:
        raise ValidationError(f"t_max must be positive, got {t_max}")
    shape = program.shape
    if shape is None:
        return [PulseSegment(0.0, t_max, SEGMENT_CONST, 0.0)]

    segments: list[PulseSegment] = []

    def add(t0: float, t1: float, kind: int, amp: float, freq: float = 0.0) -> None:
        t1 = min(t1, t_max)
        if t1 > t0:
            segments.append(PulseSegment(t0, t1, kind, amp, freq))

    n = 0
    while n * shape.period < t_max:
        start = n * shape.period
        if isinstance(shape, ZeroEnergyPulse):
            mid = start + 0.5 * shape.period
            add(start, mid, SEGMENT_CONST, shape.strength)
            add(mid, start + shape.period, SEGMENT_CONST, -shape.strength)
        else:
            on_end = start + shape.width
            if isinstance(shape, RectangularPulse):
                add(start, on_end, SEGMENT_CONST, shape.strength)
            else:
                add(start, on_end, SEGMENT_SINE, shape.strength, 2.0 * math.pi / shape.period)
            add(on_end, start + shape.period, SEGMENT_CONST, 0.0)
        n += 1
    return segments


@dataclass(frozen=True)
class SimulationConfig:
    """Run settings shared by every solution method."""

    alpha0: complex
    omega0: float
    t_max: float
    dt: float
    method: str = METHOD_ODE

    def __post_init__(self):
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise ValidationError(f"t_max must be positive and finite, got {self.t_max}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValidationError(f"dt must be positive and finite, got {self.dt}")
        if self.dt > self.t_max:
            raise ValidationError("dt must not exceed t_max")
        if not math.isfinite(self.omega0):
            raise ValidationError(f"omega0 must be finite, got {self.omega0}")
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {METHODS}, got {self.method!r}")


@dataclass(frozen=True)
class Trajectory:
    """Sampled mode amplitude on a strictly increasing time grid."""

    times: np.ndarray
    values: np.ndarray
    magnitude: np.ndarray = field(repr=False, default=None)

    @classmethod
    def from_values(cls, times: np.ndarray, values: np.ndarray) -> "Trajectory":
        # copies: the arrays are locked below and callers may reuse their grid
        times = np.array(times, dtype=float)
        values = np.array(values, dtype=complex)
        if times.ndim != 1 or times.shape != values.shape:
            raise ValidationError("times and values must be 1-d arrays of equal length")
        if len(times) == 0:
            raise ValidationError("trajectory must hold at least one sample")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValidationError("times must be strictly increasing")
        magnitude = np.abs(values)
        for arr in (times, values, magnitude):
            arr.setflags(write=False)
        return cls(times=times, values=values, magnitude=magnitude)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final_magnitude(self) -> float:
        return float(self.magnitude[-1])
