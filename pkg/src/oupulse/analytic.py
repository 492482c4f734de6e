"""Closed-form solutions for constant and rectangular frequency control.

Inside any span where the effective frequency c is constant, the reduction

    alpha'' + (gamma0 - i*c) alpha' + (big_gamma*gamma0/2) alpha = 0

holds exactly, so alpha is a combination of two exponentials whose rates
derive from the roots of x^2 - (gamma0 - i*c) x + big_gamma*gamma0/2 = 0.
No control gives a single span; rectangular control gives an alternating
chain of spans stitched together by per-segment 2x2 boundary systems.

The chain supports two slope-matching conventions at the segment boundaries
(`slope_frame`): "carryover" keeps the previous segment's effective frequency
in the exponential prefactor of the boundary system's slope row, which is how
the recursion for this model is usually stated; "continuous" instead enforces
plain continuity of alpha' (equivalently of the memory accumulator). The two
differ by a phase rotation of the matched slope at every boundary. Cross-method
validation against the numerical solvers arbitrates; see the validation
suite's discrepancy artifact.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    BathKernel,
    PulseProgram,
    RectangularPulse,
    SimulationConfig,
    Trajectory,
    ValidationError,
    pulse_segments,
)
from .solver import SolverError

ROOT_RESIDUAL_TOL = 1e-12
DEGENERATE_GAP = 1e-8
CONDITION_LIMIT = 1e12
SLOPE_FRAMES = ("carryover", "continuous")
_RESCALE_FLOOR = 1e-280
_RESCALE_STEP = 512  # power-of-two exponent shift, exact in binary floats


class DegenerateRootsError(ArithmeticError):
    """The two characteristic roots (nearly) coincide; no two-mode closed form."""


def quadratic_roots(gamma0: float, effective_freq: float, big_gamma: float) -> tuple[complex, complex]:
    """Roots of x^2 - (gamma0 - i*c) x + big_gamma*gamma0/2, descending real part.

    Solved with the cancellation-safe quadratic formula plus one Newton polish
    per root. Raises DegenerateRootsError when the roots are closer than 1e-8.
    """
    b = complex(gamma0, -effective_freq)
    k = 0.5 * big_gamma * gamma0
    s = cmath.sqrt(b * b - 4.0 * k)
    big = b + s if abs(b + s) >= abs(b - s) else b - s
    r1 = 0.5 * big
    r2 = k / r1 if k != 0.0 else b - r1

    def polish(r: complex) -> complex:
        d = 2.0 * r - b
        if abs(d) < 1e-12:
            return r
        return r - (r * r - b * r + k) / d

    r1, r2 = polish(r1), polish(r2)
    if abs(r1 - r2) < DEGENERATE_GAP:
        raise DegenerateRootsError(
            f"roots {r1} and {r2} are within {DEGENERATE_GAP}; use the numeric solver"
        )
    if r2.real > r1.real or (r2.real == r1.real and r2.imag > r1.imag):
        r1, r2 = r2, r1
    scale = max(1.0, abs(r1) ** 2)
    for r in (r1, r2):
        if abs(r * r - b * r + k) > ROOT_RESIDUAL_TOL * scale:
            raise SolverError(f"root residual above tolerance for ({gamma0}, {effective_freq}, {big_gamma})")
    return r1, r2


def mixing_weights(a1: complex, a2: complex) -> tuple[complex, complex]:
    """Mode weights (A3, A4) with A3+A4 = 1 and A3/a1 + A4/a2 = 0.

    The second identity encodes a flat start (alpha'(0) = 0), which holds
    because the memory integral is empty at t = 0.
    """
    d = a1 - a2
    return a1 / d, -a2 / d


def analytic_no_control(alpha0: complex, omega0: float, kernel: BathKernel, t):
    """Exact amplitude without control; t may be a scalar or an array."""
    a1, a2 = quadratic_roots(kernel.gamma0, omega0, kernel.big_gamma)
    w3, w4 = mixing_weights(a1, a2)
    decay = complex(kernel.gamma0, -omega0)
    tt = np.asarray(t, dtype=float)
    vals = alpha0 * (w3 * np.exp((a1 - decay) * tt) + w4 * np.exp((a2 - decay) * tt))
    if np.ndim(t) == 0:
        return complex(vals)
    return vals


@dataclass(frozen=True)
class SegmentCoefficients:
    """Characteristic roots and mode weights of one constant-frequency span.

    Weights are normalized to the span's entry value, so a3 + a4 = 1 on every
    span; the slope condition distinguishes the first span (flat start) from
    the chained ones.
    """

    a1: complex
    a2: complex
    a3: complex
    a4: complex
    c: float


@dataclass(frozen=True)
class PropagatorChain:
    """Per-span amplitude ratios; cumulative products give boundary values."""

    boundaries: np.ndarray  # span edges, length n+1
    factors: np.ndarray  # alpha(boundary k+1) / alpha(boundary k), length n

    def boundary_values(self, alpha0: complex) -> np.ndarray:
        return alpha0 * np.concatenate(([1.0 + 0j], np.cumprod(self.factors)))


@dataclass(frozen=True)
class _Span:
    t0: float
    t1: float
    c: float
    lam1: complex
    lam2: complex
    b3: complex
    b4: complex
    scale_exp: int
    entry: complex  # alpha at t0, scaled by 2**-scale_exp
    coeffs: SegmentCoefficients


def _rectangular_spans(
    alpha0: complex,
    omega0: float,
    pulse: RectangularPulse,
    kernel: BathKernel,
    t_end: float,
    slope_frame: str,
) -> list[_Span]:
    if slope_frame not in SLOPE_FRAMES:
        raise ValidationError(f"slope_frame must be one of {SLOPE_FRAMES}")
    segments = pulse_segments(PulseProgram(shape=pulse), t_end)
    roots_cache: dict[float, tuple[complex, complex]] = {}
    spans: list[_Span] = []
    p = complex(alpha0)
    q = 0j
    scale_exp = 0
    prev_c: float | None = None
    for index, seg in enumerate(segments):
        c = omega0 + seg.amp
        if prev_c is not None and c != prev_c and slope_frame == "carryover":
            # carryover boundary system: the matched slope keeps the outgoing
            # segment's frequency in its exponential prefactor, which rotates
            # the incoming slope relative to plain continuity
            q *= cmath.exp(1j * (c - prev_c) * seg.t0)
        if c not in roots_cache:
            roots_cache[c] = quadratic_roots(kernel.gamma0, c, kernel.big_gamma)
        a1, a2 = roots_cache[c]
        cond = (1.0 + max(abs(a1), abs(a2))) ** 2 / abs(a1 - a2)
        if cond > CONDITION_LIMIT:
            raise SolverError(f"boundary system ill-conditioned (cond~{cond:.2e}) at segment {index}")
        # 2x2 boundary system: [[1, 1], [a1, a2]] @ [b3, b4] = [p, q + (a1+a2) p]
        rhs2 = q + (a1 + a2) * p
        b3 = (rhs2 - a2 * p) / (a1 - a2)
        b4 = p - b3
        lam1 = a1 - complex(kernel.gamma0, -c)
        lam2 = a2 - complex(kernel.gamma0, -c)
        coeffs = SegmentCoefficients(a1, a2, b3 / p if p != 0 else b3, b4 / p if p != 0 else b4, c)
        spans.append(
            _Span(seg.t0, seg.t1, c, lam1, lam2, b3, b4, scale_exp, p, coeffs)
        )
        w = seg.t1 - seg.t0
        e1 = cmath.exp(lam1 * w)
        e2 = cmath.exp(lam2 * w)
        p = b3 * e1 + b4 * e2
        q = b3 * lam1 * e1 + b4 * lam2 * e2
        m = max(abs(p), abs(q))
        if 0.0 < m < _RESCALE_FLOOR:
            p = math.ldexp(1.0, _RESCALE_STEP) * p
            q = math.ldexp(1.0, _RESCALE_STEP) * q
            scale_exp -= _RESCALE_STEP
        prev_c = c
    return spans


def rectangular_chain(
    alpha0: complex,
    omega0: float,
    pulse: RectangularPulse,
    kernel: BathKernel,
    t_end: float,
    slope_frame: str = "carryover",
) -> tuple[PropagatorChain, list[SegmentCoefficients]]:
    """Per-segment propagators and coefficients of the rectangular-control chain."""
    spans = _rectangular_spans(alpha0, omega0, pulse, kernel, t_end, slope_frame)
    boundaries = np.array([s.t0 for s in spans] + [spans[-1].t1])
    factors = np.empty(len(spans), dtype=complex)
    for i, s in enumerate(spans):
        w = s.t1 - s.t0
        end = s.b3 * cmath.exp(s.lam1 * w) + s.b4 * cmath.exp(s.lam2 * w)
        nxt = spans[i + 1] if i + 1 < len(spans) else None
        shift = (nxt.scale_exp - s.scale_exp) if nxt is not None else 0
        # a rescale between spans is part of the stored entry, not the physics
        factors[i] = end / s.entry * math.ldexp(1.0, -shift) if shift else end / s.entry
    return PropagatorChain(boundaries=boundaries, factors=factors), [s.coeffs for s in spans]


def _eval_spans(spans: list[_Span], times: np.ndarray) -> np.ndarray:
    out = np.empty(len(times), dtype=complex)
    t_end = spans[-1].t1
    pos = 0
    for s in spans:
        hi = np.searchsorted(times, s.t1, side="left")
        if hi > pos:
            tau = times[pos:hi] - s.t0
            out[pos:hi] = math.ldexp(1.0, s.scale_exp) * (
                s.b3 * np.exp(s.lam1 * tau) + s.b4 * np.exp(s.lam2 * tau)
            )
            pos = hi
        if pos == len(times):
            break
    if pos < len(times):  # trailing nodes at exactly t_end
        s = spans[-1]
        tau = times[pos:] - s.t0
        out[pos:] = math.ldexp(1.0, s.scale_exp) * (
            s.b3 * np.exp(s.lam1 * tau) + s.b4 * np.exp(s.lam2 * tau)
        )
    return out


def analytic_rectangular(
    alpha0: complex,
    omega0: float,
    pulse: RectangularPulse,
    kernel: BathKernel,
    t,
    slope_frame: str = "carryover",
):
    """Amplitude under rectangular control via the propagator chain.

    t may be a scalar or a sorted array reaching no further than needed; the
    chain is built once up to max(t).
    """
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(tt < 0):
        raise ValidationError("times must be >= 0")
    if np.any(np.diff(tt) < 0):
        raise ValidationError("times must be sorted")
    t_end = float(tt[-1]) if tt[-1] > 0 else pulse.period
    spans = _rectangular_spans(alpha0, omega0, pulse, kernel, t_end, slope_frame)
    vals = _eval_spans(spans, tt)
    if len(tt) and tt[0] == 0.0:
        vals[0] = alpha0
    if np.ndim(t) == 0:
        return complex(vals[0])
    return vals


def rectangular_log_magnitude(
    alpha0: complex,
    omega0: float,
    pulse: RectangularPulse,
    kernel: BathKernel,
    t: float,
    slope_frame: str = "carryover",
) -> tuple[float, float]:
    """(log|alpha(t)|, arg alpha(t)) in a form safe far below float underflow."""
    spans = _rectangular_spans(alpha0, omega0, pulse, kernel, float(t), slope_frame)
    s = spans[-1]
    tau = t - s.t0
    val = s.b3 * cmath.exp(s.lam1 * tau) + s.b4 * cmath.exp(s.lam2 * tau)
    if val == 0:
        return float("-inf"), 0.0
    return math.log(abs(val)) + s.scale_exp * math.log(2.0), cmath.phase(val)


def analytic_trajectory(
    config: SimulationConfig,
    kernel: BathKernel,
    program: PulseProgram,
    times: np.ndarray,
    slope_frame: str = "carryover",
) -> Trajectory:
    """Closed-form trajectory on a given grid. Rectangular or no control only."""
    if program.is_noisy:
        raise ValidationError("no closed form for a noisy program")
    shape = program.shape
    if shape is None:
        vals = np.asarray(analytic_no_control(config.alpha0, config.omega0, kernel, times))
        vals = vals.astype(complex)
        if len(vals) and times[0] == 0.0:
            vals[0] = config.alpha0
        return Trajectory.from_values(times, vals)
    if isinstance(shape, RectangularPulse):
        vals = analytic_rectangular(
            config.alpha0, config.omega0, shape, kernel, times, slope_frame=slope_frame
        )
        return Trajectory.from_values(times, vals)
    raise ValidationError("closed form exists only for rectangular or absent control")
