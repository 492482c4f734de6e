# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled integration kernels.

Twin of `oupulse._kernels_py` with identical semantics; the backend-equality
test holds the two together. The quadrature kernel replaces the per-row
complex exponentials with a one-scalar-per-step recurrence on the kernel row
(the row ratio between consecutive steps does not depend on the history
index), refreshed from the closed form every REFRESH steps so rounding drift
stays below ~1e-13 relative.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, sin

cnp.import_array()

BACKEND = "compiled"

ctypedef double complex zdouble

cdef enum:
    REFRESH = 256


def rk4_ode(
    alpha0,
    const double[::1] seg_t0,
    const double[::1] seg_dt,
    const cnp.int64_t[::1] seg_nsteps,
    const cnp.int32_t[::1] seg_kind,
    const double[::1] seg_amp,
    const double[::1] seg_freq,
    double omega0,
    double coupling,
    double gamma0,
    const double[::1] factors,
    zdouble[::1] out,
):
    """Fixed-step RK4 for the exact reduction

        alpha' = -z
        z'     = coupling*alpha + (i*omega_a(t) - gamma0)*z

    where omega_a(t) = omega0 + factor_k * shift(t) and shift is constant or
    amp*sin(freq*t) per segment. factor_k is frozen over step k, so the right
    hand side stays smooth inside every step and RK4 keeps its order.
    """
    cdef zdouble alpha = alpha0
    cdef zdouble z = 0
    cdef zdouble k1a, k1z, k2a, k2z, k3a, k3z, k4a, k4z, a2, z2, a3, z3, a4, z4
    cdef double t0, h, amp, freq, t, f, c_a, c_b, c_c, wa, wb, wc
    cdef Py_ssize_t s, i, node = 1, step = 0
    cdef int kind

    out[0] = alpha
    for s in range(seg_t0.shape[0]):
        t0 = seg_t0[s]
        h = seg_dt[s]
        kind = seg_kind[s]
        amp = seg_amp[s]
        freq = seg_freq[s]
        for i in range(seg_nsteps[s]):
            t = t0 + i * h
            f = factors[step]
            if kind == 1:
                c_a = amp * sin(freq * t)
                c_b = amp * sin(freq * (t + 0.5 * h))
                c_c = amp * sin(freq * (t + h))
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
    alpha0,
    const double[::1] times,
    const double[::1] phi,
    double coupling,
    double gamma0,
    zdouble[::1] out,
):
    """Direct trapezoidal discretization of the memory integral.

        alpha'(t_n) = -I_n,   I_n = int_0^{t_n} K(t_n, t') alpha(t') dt'
        K(t_n, t_j) = coupling * exp(-gamma0*(t_n - t_j)) * exp(i*(phi_n - phi_j))

    advanced with a Heun predictor/corrector. The kernel row for step n+1 is
    the row for step n times exp(-gamma0*h + i*dphi) for every history index,
    so one persistent array and one scalar multiply per entry replace the
    elementwise exponentials (O(N^2) multiplies, O(N^2/REFRESH) exp calls).
    """
    cdef Py_ssize_t n_nodes = times.shape[0]
    cdef zdouble[::1] alpha = out
    cdef zdouble acc = 0, pred, i_pred, row_sum, r, f_prev, f_cur
    cdef double h, dtau, dph
    cdef Py_ssize_t n, j
    cdef bint refresh

    row = np.empty(n_nodes, dtype=complex)
    cdef zdouble[::1] w = row

    alpha[0] = alpha0
    for n in range(n_nodes - 1):
        h = times[n + 1] - times[n]
        pred = alpha[n] - h * acc
        alpha[n + 1] = pred
        refresh = n % REFRESH == 0
        dph = phi[n + 1] - phi[n]
        r = exp(-gamma0 * h) * (cos(dph) + 1j * sin(dph))
        if refresh:
            dtau = times[n + 1] - times[0]
            dph = phi[n + 1] - phi[0]
            w[0] = coupling * exp(-gamma0 * dtau) * (cos(dph) + 1j * sin(dph))
        else:
            w[0] = w[0] * r
        f_prev = w[0] * alpha[0]
        row_sum = 0
        for j in range(1, n + 2):
            if j <= n:
                if refresh:
                    dtau = times[n + 1] - times[j]
                    dph = phi[n + 1] - phi[j]
                    w[j] = coupling * exp(-gamma0 * dtau) * (cos(dph) + 1j * sin(dph))
                else:
                    w[j] = w[j] * r
            else:
                w[j] = coupling
            f_cur = w[j] * alpha[j]
            row_sum += (times[j] - times[j - 1]) * (f_prev + f_cur)
            f_prev = f_cur
        i_pred = 0.5 * row_sum
        alpha[n + 1] = alpha[n] - 0.5 * h * (acc + i_pred)
        # I_{n+1} differs from i_pred only in the last node's value
        acc = i_pred + 0.5 * h * coupling * (alpha[n + 1] - pred)
