"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set OUPULSE_PURE_PYTHON=1 to force the fallback (used by the benchmark and by
tests that compare the two implementations).
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("OUPULSE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

rk4_ode = _impl.rk4_ode
volterra_pc = _impl.volterra_pc
BACKEND = _impl.BACKEND


def backend_name() -> str:
    """Either "compiled" or "pure-python"."""
    return BACKEND
