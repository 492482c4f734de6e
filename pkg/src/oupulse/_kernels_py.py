"""Pure-numpy integration kernels.

Reference implementation of the hot loops; `oupulse._kernels` is the compiled
twin with identical semantics. Keep the two in lockstep: the backend-equality
test compares them directly.
"""
from __future__ import annotations

import math

import numpy as np

BACKEND = "pure-python"


def rk4_ode(
    alpha0: complex,
    seg_t0: np.ndarray,
    seg_dt: np.ndarray,
    seg_nsteps: np.ndarray,
    seg_kind: np.ndarray,
    seg_amp: np.ndarray,
    seg_freq: np.ndarray,
    omega0: float,
    coupling: float,
    gamma0: float,
    factors: np.ndarray,
    out: np.ndarray,
) -> None:
    """Fixed-step RK4 for the exact reduction

        alpha' = -z
        z'     = coupling*alpha + (i*omega_a(t) - gamma0)*z

    where omega_a(t) = omega0 + factor_k * shift(t) and shift is constant or
    amp*sin(freq*t) per segment. factor_k is frozen over step k, so the right
    hand side stays smooth inside every step and RK4 keeps its order.
    """
    alpha = complex(alpha0)
    z = 0.0j
    out[0] = alpha
    node = 1
    step = 0
    for s in range(len(seg_t0)):
        t0 = seg_t0[s]
        h = seg_dt[s]
        kind = seg_kind[s]
        amp = seg_amp[s]
        freq = seg_freq[s]
        for i in range(seg_nsteps[s]):
            t = t0 + i * h
            f = factors[step]
            if kind == 1:
                c_a = amp * math.sin(freq * t)
                c_b = amp * math.sin(freq * (t + 0.5 * h))
                c_c = amp * math.sin(freq * (t + h))
            else:
                c_a = c_b = c_c = amp
            wa = omega0 + f * c_a
            wb = omega0 + f * c_b
            wc = omega0 + f * c_c

            k1a = -z
            k1z = coupling * alpha + (1j * wa - gamma0) * z
            a2 = alpha + 0.5 * h * k1a
            z2 = z + 0.5 * h * k1z
            k2a = -z2
            k2z = coupling * a2 + (1j * wb - gamma0) * z2
            a3 = alpha + 0.5 * h * k2a
            z3 = z + 0.5 * h * k2z
            k3a = -z3
            k3z = coupling * a3 + (1j * wb - gamma0) * z3
            a4 = alpha + h * k3a
            z4 = z + h * k3z
            k4a = -z4
            k4z = coupling * a4 + (1j * wc - gamma0) * z4

            alpha = alpha + (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
            z = z + (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
            out[node] = alpha
            node += 1
            step += 1


def volterra_pc(
    alpha0: complex,
    times: np.ndarray,
    phi: np.ndarray,
    coupling: float,
    gamma0: float,
    out: np.ndarray,
) -> None:
    """Direct trapezoidal discretization of the memory integral.

        alpha'(t_n) = -I_n,   I_n = int_0^{t_n} K(t_n, t') alpha(t') dt'
        K(t_n, t_j) = coupling * exp(-gamma0*(t_n - t_j)) * exp(i*(phi_n - phi_j))

    advanced with a Heun predictor/corrector. Each row of K is evaluated from
    the formula above (O(N^2) work overall); no reduction to an auxiliary ODE
    is used, which keeps this an independent oracle for the RK4 path.
    """
    n_nodes = len(times)
    alpha = out
    alpha[0] = alpha0
    hs = np.diff(times)
    acc = 0.0j  # I_n with the trapezoid weights
    for n in range(n_nodes - 1):
        h = hs[n]
        pred = alpha[n] - h * acc
        alpha[n + 1] = pred
        row = coupling * np.exp(
            -gamma0 * (times[n + 1] - times[: n + 2]) + 1j * (phi[n + 1] - phi[: n + 2])
        )
        integrand = row * alpha[: n + 2]
        i_pred = 0.5 * np.sum(hs[: n + 1] * (integrand[:-1] + integrand[1:]))
        alpha[n + 1] = alpha[n] - 0.5 * h * (acc + i_pred)
        # I_{n+1} differs from i_pred only in the last node's value
        acc = i_pred + 0.5 * h * coupling * (alpha[n + 1] - pred)
