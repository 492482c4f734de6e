"""Timing comparison of the compiled and pure-python kernels.

Runs the RK4 reduction and the O(N^2) memory-integral quadrature on the same
parameter set through both implementations and reports best-of-N wall times.

    python3 benchmarks/bench_backends.py [--t-max 10] [--dt 1e-3] [--repeat 5]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from oupulse import _backend, _kernels_py
from oupulse.model import BathKernel, PulseProgram, RectangularPulse, SimulationConfig
from oupulse.solver import _noise_factors, build_grid, phase_on_grid, segment_profile


def best_of(repeat: int, fn) -> float:
    best = float("inf")
    for _ in range(repeat):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--t-max", type=float, default=10.0)
    parser.add_argument("--dt", type=float, default=1e-3)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    config = SimulationConfig(alpha0=5 + 0j, omega0=1.0, t_max=args.t_max, dt=args.dt)
    kernel = BathKernel(gamma0=1.0, big_gamma=5.0)
    program = PulseProgram(RectangularPulse(15.0, 0.05, 0.035))
    grid = build_grid([program], config.t_max, config.dt)
    kind, amp, freq = segment_profile(program, grid)
    factors = _noise_factors(program, grid.n_steps)
    phi = phase_on_grid(config, program, grid)
    out = np.empty(len(grid.times), dtype=complex)

    impls = [("pure-python", _kernels_py)]
    try:
        from oupulse import _kernels

        impls.append(("compiled", _kernels))
    except ImportError:
        print("compiled kernels not built; timing the fallback only")

    print(f"nodes: {len(grid.times)}  (t_max={args.t_max}, dt={args.dt})")
    print(f"active backend: {_backend.backend_name()}")
    print(f"{'impl':12s} {'rk4_ode':>12s} {'volterra_pc':>12s}")
    rows = {}
    for name, impl in impls:
        t_rk4 = best_of(args.repeat, lambda: impl.rk4_ode(
            complex(config.alpha0), grid.seg_t0, grid.seg_dt, grid.seg_nsteps,
            kind, amp, freq, config.omega0, kernel.coupling, kernel.gamma0, factors, out,
        ))
        t_vol = best_of(args.repeat, lambda: impl.volterra_pc(
            complex(config.alpha0), grid.times, phi, kernel.coupling, kernel.gamma0, out,
        ))
        rows[name] = (t_rk4, t_vol)
        print(f"{name:12s} {t_rk4 * 1e3:10.2f}ms {t_vol * 1e3:10.2f}ms")
    if len(rows) == 2:
        pure, comp = rows["pure-python"], rows["compiled"]
        print(f"{'speedup':12s} {pure[0] / comp[0]:11.1f}x {pure[1] / comp[1]:11.1f}x")


if __name__ == "__main__":
    main()
