"""Hot path-recursion kernels: numba-compiled loops with a pure-numpy fallback.

Set SVOLTAILS_NO_NUMBA=1 to force the numpy path (benchmarks/bench_kernels.py
compares the two).  All randomness is drawn outside the kernels with a
counter-based generator, so both implementations consume identical draw
matrices and accumulate in identical per-path order; results are bitwise equal
between the two modes and independent of any threading.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_requested() -> bool:
    if os.environ.get("SVOLTAILS_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}:
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_requested()


# ---------------------------------------------------------------------------
# loop implementations (numba targets)
# ---------------------------------------------------------------------------

def _ou_integral_sq_loops(y0, m, decay, noise, z, h):
    """Trapezoid of Y^2 along exact OU transitions; z is (paths, steps) normals."""
    n_paths, n_steps = z.shape
    out = np.empty(n_paths)
    for p in range(n_paths):
        y = y0
        acc = 0.5 * y * y
        for k in range(n_steps):
            y = m + (y - m) * decay + noise * z[p, k]
            acc += y * y
        acc -= 0.5 * y * y
        out[p] = acc * h
    return out


def _cir_integral_exact_loops(y0, ebh, scale, gam2, z, h):
    """Trapezoid of Y along exact CIR transitions (d >= 1 decomposition).

    Per step, Y' = scale * (G + (Z + sqrt(Y ebh / scale))^2) with G a
    pre-drawn 2*Gamma((d-1)/2) variate and Z standard normal.
    """
    n_paths, n_steps = z.shape
    out = np.empty(n_paths)
    for p in range(n_paths):
        y = y0
        acc = 0.5 * y
        for k in range(n_steps):
            w = z[p, k] + np.sqrt(y * ebh / scale)
            y = scale * (gam2[p, k] + w * w)
            acc += y
        acc -= 0.5 * y
        out[p] = acc * h
    return out


def _cir_integral_euler_loops(y0, a, b, c, z, h):
    """Trapezoid of max(Y, 0) along full-truncation Euler CIR steps."""
    n_paths, n_steps = z.shape
    sqh = np.sqrt(h)
    out = np.empty(n_paths)
    for p in range(n_paths):
        y = y0
        yp = y if y > 0.0 else 0.0
        acc = 0.5 * yp
        for k in range(n_steps):
            y = y + (a + b * yp) * h + c * np.sqrt(yp) * sqh * z[p, k]
            yp = y if y > 0.0 else 0.0
            acc += yp
        acc -= 0.5 * yp
        out[p] = acc * h
    return out


# ---------------------------------------------------------------------------
# vectorized numpy fallbacks (same accumulation order per path)
# ---------------------------------------------------------------------------

def _ou_integral_sq_numpy(y0, m, decay, noise, z, h):
    n_paths, n_steps = z.shape
    y = np.full(n_paths, float(y0))
    acc = 0.5 * y * y
    for k in range(n_steps):
        y = m + (y - m) * decay + noise * z[:, k]
        acc += y * y
    acc -= 0.5 * y * y
    return acc * h


def _cir_integral_exact_numpy(y0, ebh, scale, gam2, z, h):
    n_paths, n_steps = z.shape
    y = np.full(n_paths, float(y0))
    acc = 0.5 * y
    for k in range(n_steps):
        w = z[:, k] + np.sqrt(y * ebh / scale)
        y = scale * (gam2[:, k] + w * w)
        acc += y
    acc -= 0.5 * y
    return acc * h


def _cir_integral_euler_numpy(y0, a, b, c, z, h):
    n_paths, n_steps = z.shape
    sqh = np.sqrt(h)
    y = np.full(n_paths, float(y0))
    yp = np.maximum(y, 0.0)
    acc = 0.5 * yp
    for k in range(n_steps):
        y = y + (a + b * yp) * h + c * np.sqrt(yp) * sqh * z[:, k]
        yp = np.maximum(y, 0.0)
        acc += yp
    acc -= 0.5 * yp
    return acc * h


if NUMBA_ENABLED:
    import numba

    ou_integral_sq = numba.njit(cache=True)(_ou_integral_sq_loops)
    cir_integral_exact = numba.njit(cache=True)(_cir_integral_exact_loops)
    cir_integral_euler = numba.njit(cache=True)(_cir_integral_euler_loops)
else:
    ou_integral_sq = _ou_integral_sq_numpy
    cir_integral_exact = _cir_integral_exact_numpy
    cir_integral_euler = _cir_integral_euler_numpy
