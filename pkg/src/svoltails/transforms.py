"""Laplace transforms of integrated variance for CIR, squared OU and squared Bessel processes.

Both model transforms share one structure.  With

    M(z) = cosh(z) + s0 * sinh(z)/z,

the Heston transform of int_0^t Y ds (CIR variance, b <= 0) is

    Psi(lam) = exp(-a b t / c^2) * M(z)^(-2a/c^2) * exp(-lam * y0 * t * sinhc(z) / M(z)),
    z = (t/2) sqrt(b^2 + 2 c^2 lam),   s0 = t|b|/2,

and the Stein-Stein transform of int_0^t Y^2 ds (squared OU) is

    Psi(lam) = exp(q t / 2) * M(z)^(-1/2) * exp(-lam * S(z) / M(z)),
    z = t sqrt(q^2 + 2 sigma^2 lam),   s0 = q t,
    S(z) = y0^2 t sinhc(z) + 2 m q y0 t^2 f3(z) - m^2 q^2 t^3 f4(z) - m^2 q^3 t^4 f5(z),

where sinhc(z) = sinh(z)/z, f3 = (cosh z - 1)/z^2, f4 = (sinh z - z cosh z)/z^3,
f5 = (2 cosh z - 2 - z sinh z)/z^4.  All five are even entire functions of z, so
nothing here depends on the branch of the square root, and the removable
singularity at the continuation boundary needs no special casing.  The squared-OU
formula is normalized so that Psi(0) = 1 (the raw five-factor identity carries a
spurious 2 sqrt(t) prefactor that belongs to the density-side change of variables).

At b = 0 the Heston formula reduces, with s0 = 0, to the Pitman-Yor squared-Bessel
expression cosh(z)^(-2a/c^2) exp(-x kappa tanh(kappa tau)/2); the two routes agree
identically, and ``besq_integrated_laplace`` exposes the Bessel form directly.

M(z)^(-p) requires an analytic logarithm of M.  For Re z >= 2 we factor
M = (e^z / 2) [(1 + s0/z) + (1 - s0/z) e^{-2z}]; the bracket stays close to
1 + s0/z, whose real part is positive on the sector |arg z| <= pi/4 covered by
Re(lam) >= 0, so its principal log is the analytic one.  For Re z < 2 the
principal log of M itself is analytic on that sector and on the real in-domain
segment (where M > 0).  Off that envelope - e.g. Bromwich contours with a
negative real part - use ``log_laplace_contour``, which restores continuity of
the log along an ordered contour by phase unwrapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import HestonParams, ModelParams, SteinSteinParams
from .roots import smallest_root

_LN2 = math.log(2.0)
# Switch from direct cosh/sinh evaluation to the e^{-z}-factored form.
_FACTORED_RE = 2.0
# Below this |z|, series for the even entire auxiliaries (next term < 1e-18).
_SERIES_RADIUS = 0.25


@dataclass(frozen=True)
class TransformDomain:
    """Analyticity data for the integrated-variance transform.

    ``re_lower`` is the left edge of the continuation half-plane in the scaled
    variable of the paper (-b^2 + u_{b,t} for Heston, -q^2 + v_{q,t} for
    Stein-Stein); ``lam_lower`` is the same edge mapped to the argument of
    ``cir_integrated_laplace`` / ``ou2_integrated_laplace`` (divide by 2c^2 or
    2 sigma^2).  ``decay_exponent`` is the delta of the square-root-exponential
    decay bound |Psi| <= C1 exp(-C2 |lam|^delta).
    """

    re_lower: float
    lam_lower: float
    decay_exponent: float = 0.5


def transform_domain(model: ModelParams, t: float) -> TransformDomain:
    """Continuation domain of the integrated-variance transform for (model, t)."""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    if isinstance(model, HestonParams):
        r = smallest_root(0.5 * t * abs(model.b))
        u_bt = -4.0 * r * r / (t * t)
        re_lower = -model.b ** 2 + u_bt
        return TransformDomain(re_lower, re_lower / (2.0 * model.c ** 2))
    r = smallest_root(model.q * t)
    v_qt = -(r * r) / (t * t)
    re_lower = -model.q ** 2 + v_qt
    return TransformDomain(re_lower, re_lower / (2.0 * model.sigma ** 2))


# ---------------------------------------------------------------------------
# even entire auxiliaries, stable near z = 0
# ---------------------------------------------------------------------------

def _sinhc(z):
    """sinh(z)/z, series below |z| = 0.25."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    zs = z[small] ** 2
    out[small] = 1.0 + zs / 6.0 * (1.0 + zs / 20.0 * (1.0 + zs / 42.0 * (1.0 + zs / 72.0)))
    zb = z[~small]
    out[~small] = np.sinh(zb) / zb
    return out


def _f3(z):
    """(cosh z - 1)/z^2."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    zs = z[small] ** 2
    out[small] = 0.5 * (1.0 + zs / 12.0 * (1.0 + zs / 30.0 * (1.0 + zs / 56.0)))
    zb = z[~small]
    out[~small] = (np.cosh(zb) - 1.0) / zb ** 2
    return out


def _f4(z):
    """(sinh z - z cosh z)/z^3."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    zs = z[small] ** 2
    out[small] = -(1.0 / 3.0) * (1.0 + zs / 10.0 * (1.0 + zs / 28.0 * (1.0 + zs / 54.0)))
    zb = z[~small]
    out[~small] = (np.sinh(zb) - zb * np.cosh(zb)) / zb ** 3
    return out


def _f5(z):
    """(2 cosh z - 2 - z sinh z)/z^4  (= (4 sinh^2(z/2) - z sinh z)/z^4)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    zs = z[small] ** 2
    out[small] = -(1.0 / 12.0) * (1.0 + zs / 15.0 * (1.0 + zs / (112.0 / 3.0)))
    zb = z[~small]
    out[~small] = (2.0 * np.cosh(zb) - 2.0 - zb * np.sinh(zb)) / zb ** 4
    return out


def _core(z, s0, with_ss_terms):
    """log M and the exponent ratios for the shared transform structure.

    Returns (log_M, sinhc/M) and, when ``with_ss_terms``, also (f3/M, f4/M, f5/M).
    Splits between direct evaluation (Re z < 2) and the e^{-z}-factored form.
    """
    z = np.asarray(z, dtype=complex)
    log_m = np.empty_like(z)
    shc_m = np.empty_like(z)
    f3_m = np.empty_like(z) if with_ss_terms else None
    f4_m = np.empty_like(z) if with_ss_terms else None
    f5_m = np.empty_like(z) if with_ss_terms else None

    direct = z.real < _FACTORED_RE
    zd = z[direct]
    if zd.size:
        shc = _sinhc(zd)
        m = np.cosh(zd) + s0 * shc
        log_m[direct] = np.log(m)
        shc_m[direct] = shc / m
        if with_ss_terms:
            f3_m[direct] = _f3(zd) / m
            f4_m[direct] = _f4(zd) / m
            f5_m[direct] = _f5(zd) / m

    zf = z[~direct]
    if zf.size:
        em = np.exp(-zf)
        em2 = em * em
        bracket = (1.0 + s0 / zf) + (1.0 - s0 / zf) * em2
        log_m[~direct] = zf - _LN2 + np.log(bracket)
        zb = zf * bracket
        shc_m[~direct] = (1.0 - em2) / zb
        if with_ss_terms:
            one_em = 1.0 - em
            f3_m[~direct] = one_em * one_em / (zf * zb)
            f4_m[~direct] = ((1.0 - zf) - (1.0 + zf) * em2) / (zf * zf * zb)
            f5_m[~direct] = (2.0 * one_em * one_em - zf * (1.0 - em2)) / (zf ** 3 * zb)

    if with_ss_terms:
        return log_m, shc_m, f3_m, f4_m, f5_m
    return log_m, shc_m


def _check_domain(lam, lam_lower, what):
    if np.any(np.real(lam) <= lam_lower):
        raise ValueError(
            f"{what}: Re(lam) must exceed the continuation edge {lam_lower:.6g}"
        )


def _log_cir(p: HestonParams, t: float, lam, unwrap=False):
    """log of the CIR integrated-variance transform; lam scalar or array."""
    lam = np.asarray(lam, dtype=complex)
    z = 0.5 * t * np.sqrt(p.b ** 2 + 2.0 * p.c ** 2 * lam)
    s0 = 0.5 * t * abs(p.b)
    log_m, shc_m = _core(z, s0, False)
    if unwrap:
        log_m = log_m.real + 1j * np.unwrap(log_m.imag)
    pref = -p.a * p.b * t / p.c ** 2
    return pref - (2.0 * p.a / p.c ** 2) * log_m - lam * p.y0 * t * shc_m


def _log_ou2(p: SteinSteinParams, t: float, lam, unwrap=False):
    """log of the squared-OU integrated-variance transform, normalized to 1 at 0."""
    lam = np.asarray(lam, dtype=complex)
    z = t * np.sqrt(p.q ** 2 + 2.0 * p.sigma ** 2 * lam)
    s0 = p.q * t
    log_m, shc_m, f3_m, f4_m, f5_m = _core(z, s0, True)
    if unwrap:
        log_m = log_m.real + 1j * np.unwrap(log_m.imag)
    q, m, y0 = p.q, p.m, p.y0
    s_over_m = (
        y0 * y0 * t * shc_m
        + 2.0 * m * q * y0 * t ** 2 * f3_m
        - m * m * q * q * t ** 3 * f4_m
        - m * m * q ** 3 * t ** 4 * f5_m
    )
    return 0.5 * p.q * t - 0.5 * log_m - lam * s_over_m


def _as_given(value, lam):
    """Return a scalar when the input lam was scalar."""
    if np.isscalar(lam) or (isinstance(lam, np.ndarray) and lam.ndim == 0):
        return complex(value) if np.iscomplexobj(value) else float(value)
    return value


def cir_integrated_laplace(p: HestonParams, t: float, lam) -> complex:
    """E[exp(-lam int_0^t Y_s ds)] for the CIR variance process of ``p``.

    Valid for Re(lam) > lam_lower (see ``transform_domain``); complex arguments
    are supported on Re(lam) >= 0 and on the real in-domain segment.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    _check_domain(lam, transform_domain(p, t).lam_lower, "cir_integrated_laplace")
    return _as_given(np.exp(_log_cir(p, t, lam)), lam)


def ou2_integrated_laplace(p: SteinSteinParams, t: float, lam) -> complex:
    """E[exp(-lam int_0^t Y_s^2 ds)] for the OU volatility process of ``p``."""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    _check_domain(lam, transform_domain(p, t).lam_lower, "ou2_integrated_laplace")
    return _as_given(np.exp(_log_ou2(p, t, lam)), lam)


def besq_integrated_laplace(x: float, delta: float, t: float, lam: float) -> float:
    """E[exp(-(lam^2/2) int_0^t BESQ_x^delta(u) du)] = cosh(lam t)^(-delta/2) exp(-(x lam/2) tanh(lam t)).

    Real lam > 0 (the Pitman-Yor identity); log-space cosh keeps large lam t finite.
    """
    if x < 0 or delta < 0 or t <= 0 or lam <= 0:
        raise ValueError("besq_integrated_laplace requires x >= 0, delta >= 0, t > 0, lam > 0")
    z = lam * t
    log_cosh = z + math.log1p(math.exp(-2.0 * z)) - _LN2
    return math.exp(-0.5 * delta * log_cosh - 0.5 * x * lam * math.tanh(z))


def char_fn(model: ModelParams, t: float, xi):
    """Integrated-variance transform at lam = i xi (characteristic-function axis).

    Equals 1 at xi = 0 and satisfies char_fn(-xi) = conj(char_fn(xi)).
    Accepts scalar or array xi.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    lam = 1j * np.asarray(xi, dtype=float)
    if isinstance(model, HestonParams):
        out = np.exp(_log_cir(model, t, lam))
    else:
        out = np.exp(_log_ou2(model, t, lam))
    return _as_given(out, xi)


def log_laplace_contour(model: ModelParams, t: float, lams: np.ndarray) -> np.ndarray:
    """log Psi along an ordered contour of complex lam values.

    The only multivalued ingredient is log M; its imaginary part is unwrapped
    along the array so the result is the analytic continuation from the first
    node (which must lie where the principal branch is valid, e.g. on the real
    in-domain segment).  Used by the density inverter, whose Bromwich abscissa
    may sit left of the imaginary axis where the pointwise branch rules fail.
    """
    lams = np.asarray(lams, dtype=complex)
    if isinstance(model, HestonParams):
        return _log_cir(model, t, lams, unwrap=True)
    return _log_ou2(model, t, lams, unwrap=True)


def log_laplace_real(model: ModelParams, t: float, lam: float) -> float:
    """log Psi at real in-domain lam (used for saddle searches); real-valued."""
    if isinstance(model, HestonParams):
        return float(np.real(_log_cir(model, t, complex(lam))))
    return float(np.real(_log_ou2(model, t, complex(lam))))
