"""Numerical solvers for the reduced mode dynamics.

The memory integral with a single-exponential kernel reduces exactly to

    alpha'(t) = -z(t)
    z'(t)     = coupling*alpha(t) + (i*omega_a(t) - gamma0)*z(t),   z(0) = 0

with coupling = big_gamma*gamma0/2 and omega_a the instantaneous (possibly
noisy) mode frequency. `simulate_ode` integrates this system with fixed-step
RK4, stepping each smooth pulse span separately so discontinuities always land
on step boundaries. `simulate_quadrature` ignores the reduction and
discretizes the memory integral directly; the two must agree and serve as
mutual oracles.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .model import (
    METHOD_ODE,
    BathKernel,
    PulseProgram,
    PulseSegment,
    SimulationConfig,
    Trajectory,
    ValidationError,
    _cumulative,
    pulse_segments,
)

logger = logging.getLogger(__name__)

DEFAULT_DT = 1e-3
PERIOD_RESOLUTION = 50  # default dt is period/50 when a pulse is active
WIDTH_RESOLUTION = 10  # dt must satisfy dt <= width/10
MARKOV_GAMMA0_CUTOFF = 1e3
STIFFNESS_PRODUCT = 0.1  # warn when gamma0*dt exceeds this
QUADRATURE_PAIR_BUDGET = 4_000_000_000  # max N^2 node pairs per quadrature run


class SolverError(RuntimeError):
    """Internal solver failure (non-finite state, ill-conditioned system)."""


class StiffnessWarning(UserWarning):
    """gamma0*dt is large; the memory variable is marginally resolved."""


@dataclass(frozen=True)
class OdeState:
    """Reduced state: mode amplitude and the memory accumulator z."""

    alpha: complex
    z: complex = 0j


def state_derivative(state: OdeState, omega_a: float, kernel: BathKernel) -> OdeState:
    """Right-hand side of the exact reduction at instantaneous frequency omega_a."""
    return OdeState(
        alpha=-state.z,
        z=_memory_coupling(kernel) * state.alpha + (1j * omega_a - kernel.gamma0) * state.z,
    )


def _memory_coupling(kernel: BathKernel) -> float:
    # z' source term; equals the memory kernel at zero lag
    return 0.5 * kernel.big_gamma * kernel.gamma0


def default_dt(program: PulseProgram) -> float:
    """min(period/50, 1e-3) with an active pulse, 1e-3 otherwise."""
    if program.shape is None:
        return DEFAULT_DT
    return min(program.shape.period / PERIOD_RESOLUTION, DEFAULT_DT)


def check_resolution(program: PulseProgram, dt: float) -> None:
    """Reject a step that cannot resolve the pulse's on-window."""
    shape = program.shape
    if shape is None:
        return
    limit = shape.width / WIDTH_RESOLUTION
    if dt > limit * (1.0 + 1e-12):
        raise ValidationError(
            f"dt={dt} too coarse for pulse width {shape.width}; need dt <= {limit}"
        )


@dataclass(frozen=True)
class Grid:
    """Step grid whose nodes hit every pulse discontinuity exactly.

    Nodes are grouped into smooth segments: segment s starts at seg_t0[s] and
    advances seg_nsteps[s] steps of size seg_dt[s]. times holds all nodes
    including t=0 and t_max.
    """

    times: np.ndarray
    edges: np.ndarray
    seg_t0: np.ndarray
    seg_dt: np.ndarray
    seg_nsteps: np.ndarray

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    @property
    def max_dt(self) -> float:
        return float(np.max(self.seg_dt))


def build_grid(
    programs: Sequence[PulseProgram], t_max: float, dt: float, _edge_tol: float = 1e-9
) -> Grid:
    """Union of all programs' discontinuities, each span subdivided to <= dt."""
    if not programs:
        programs = [PulseProgram()]
    edge_set: list[float] = [0.0, t_max]
    for p in programs:
        for seg in pulse_segments(p, t_max):
            edge_set.extend((seg.t0, seg.t1))
    edges_sorted = sorted(edge_set)
    tol = _edge_tol * max(dt, 1e-12)
    edges = [edges_sorted[0]]
    for e in edges_sorted[1:]:
        if e - edges[-1] > tol:
            edges.append(e)
    edges = np.asarray(edges)

    seg_t0 = []
    seg_dt = []
    seg_nsteps = []
    chunks = []
    for s in range(len(edges) - 1):
        width = edges[s + 1] - edges[s]
        m = max(1, math.ceil(width / dt - 1e-9))
        h = width / m
        seg_t0.append(edges[s])
        seg_dt.append(h)
        seg_nsteps.append(m)
        chunks.append(edges[s] + h * np.arange(m))
    chunks.append(np.array([t_max]))
    times = np.concatenate(chunks)
    return Grid(
        times=times,
        edges=edges,
        seg_t0=np.asarray(seg_t0),
        seg_dt=np.asarray(seg_dt),
        seg_nsteps=np.asarray(seg_nsteps, dtype=np.int64),
    )


def segment_profile(
    program: PulseProgram, grid: Grid
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per grid-segment pulse formula (kind, amp, freq) for one program.

    Grid segments never straddle a discontinuity of any participating program,
    so each one maps to a single smooth span of this pulse.
    """
    own = pulse_segments(program, float(grid.edges[-1]))
    own_starts = np.array([s.t0 for s in own])
    mids = 0.5 * (grid.edges[:-1] + grid.edges[1:])
    idx = np.searchsorted(own_starts, mids, side="right") - 1
    idx = np.clip(idx, 0, len(own) - 1)
    kind = np.array([own[i].kind for i in idx], dtype=np.int32)
    amp = np.array([own[i].amp for i in idx])
    freq = np.array([own[i].freq for i in idx])
    return kind, amp, freq


def _noise_factors(program: PulseProgram, n_steps: int) -> np.ndarray:
    if program.noise is not None:
        return program.noise.sample_factors(n_steps)
    return np.ones(n_steps)


def _markov_note(kernel: BathKernel) -> bool:
    if kernel.gamma0 >= MARKOV_GAMMA0_CUTOFF:
        logger.info(
            "gamma0=%g is at or beyond the white-noise cutoff %g; "
            "returning the closed-form limit instead of integrating",
            kernel.gamma0,
            MARKOV_GAMMA0_CUTOFF,
        )
        return True
    return False


def simulate_ode(
    config: SimulationConfig,
    kernel: BathKernel,
    program: PulseProgram | None = None,
    grid: Grid | None = None,
) -> Trajectory:
    """Integrate the exact reduction with fixed-step RK4. The workhorse path."""
    program = program or PulseProgram()
    check_resolution(program, config.dt)
    if grid is None:
        grid = build_grid([program], config.t_max, config.dt)
    if _markov_note(kernel):
        return markovian_trajectory(config.alpha0, kernel.big_gamma, grid.times)
    if kernel.gamma0 * grid.max_dt > STIFFNESS_PRODUCT:
        warnings.warn(
            f"gamma0*dt = {kernel.gamma0 * grid.max_dt:.3g} > {STIFFNESS_PRODUCT}; "
            "memory decay is marginally resolved",
            StiffnessWarning,
            stacklevel=2,
        )
    kind, amp, freq = segment_profile(program, grid)
    factors = _noise_factors(program, grid.n_steps)
    out = np.empty(len(grid.times), dtype=complex)
    _backend.rk4_ode(
        complex(config.alpha0),
        grid.seg_t0,
        grid.seg_dt,
        grid.seg_nsteps,
        kind,
        amp,
        freq,
        config.omega0,
        _memory_coupling(kernel),
        kernel.gamma0,
        factors,
        out,
    )
    if not np.all(np.isfinite(out.view(float))):
        raise SolverError("non-finite amplitude during RK4 integration")
    return Trajectory.from_values(grid.times, out)


def phase_on_grid(config: SimulationConfig, program: PulseProgram, grid: Grid) -> np.ndarray:
    """Accumulated frequency integral at every node, honoring per-step noise."""
    shape = program.shape
    base = np.array([_cumulative(shape, t) for t in grid.times])
    if not program.is_noisy:
        return config.omega0 * grid.times + base
    factors = _noise_factors(program, grid.n_steps)
    steps = factors * np.diff(base)
    return config.omega0 * grid.times + np.concatenate(([0.0], np.cumsum(steps)))


def simulate_quadrature(
    config: SimulationConfig,
    kernel: BathKernel,
    program: PulseProgram | None = None,
    grid: Grid | None = None,
    max_pairs: int = QUADRATURE_PAIR_BUDGET,
) -> Trajectory:
    """Solve the memory-integral form directly (trapezoid + Heun), O(N^2).

    Slow but independent of the ODE reduction; used to cross-check it. A noisy
    program must reuse the seed of the paired RK4 run so both integrate the
    same realization.
    """
    program = program or PulseProgram()
    check_resolution(program, config.dt)
    if grid is None:
        grid = build_grid([program], config.t_max, config.dt)
    n_nodes = len(grid.times)
    if n_nodes * n_nodes > max_pairs:
        raise ValidationError(
            f"quadrature would touch {n_nodes}^2 node pairs, over the budget {max_pairs}; "
            "increase dt or shorten the horizon"
        )
    if _markov_note(kernel):
        return markovian_trajectory(config.alpha0, kernel.big_gamma, grid.times)
    phi = phase_on_grid(config, program, grid)
    out = np.empty(n_nodes, dtype=complex)
    _backend.volterra_pc(
        complex(config.alpha0),
        grid.times,
        phi,
        _quadrature_coupling(kernel),
        kernel.gamma0,
        out,
    )
    if not np.all(np.isfinite(out.view(float))):
        raise SolverError("non-finite amplitude during quadrature")
    return Trajectory.from_values(grid.times, out)


def _quadrature_coupling(kernel: BathKernel) -> float:
    # zero-lag kernel value, evaluated through the public kernel function so
    # the quadrature path stays independent of the ODE reduction coefficients
    from .model import kernel_eval

    return float(kernel_eval(kernel, 0.0))


def markovian_limit(alpha0: complex, big_gamma: float, t):
    """White-noise (memoryless) closed form alpha0*exp(-big_gamma*t/2)."""
    return alpha0 * np.exp(-0.5 * big_gamma * np.asarray(t, dtype=float))


def markovian_trajectory(alpha0: complex, big_gamma: float, times: np.ndarray) -> Trajectory:
    values = markovian_limit(alpha0, big_gamma, times)
    values = np.asarray(values, dtype=complex)
    values[0] = alpha0
    return Trajectory.from_values(times, values)


def simulate(
    config: SimulationConfig,
    kernel: BathKernel,
    program: PulseProgram | None = None,
    grid: Grid | None = None,
) -> Trajectory:
    """Dispatch on config.method; the analytic path needs a closed-form pulse."""
    program = program or PulseProgram()
    if config.method == METHOD_ODE:
        return simulate_ode(config, kernel, program, grid)
    if config.method == "quadrature-oracle":
        return simulate_quadrature(config, kernel, program, grid)
    from . import analytic

    if grid is None:
        grid = build_grid([program], config.t_max, config.dt)
    try:
        return analytic.analytic_trajectory(config, kernel, program, grid.times)
    except analytic.DegenerateRootsError as exc:
        logger.warning("analytic solution degenerate (%s); falling back to RK4", exc)
        return simulate_ode(config, kernel, program, grid)
