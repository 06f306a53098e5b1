"""Numerical densities: integrated variance, mixing density m_t, stock density D_t, call prices.

The integrated-variance density is recovered from its Laplace transform by a
Bromwich integral along Re(lam) = eps,

    f(v) = (e^{eps v} / pi) * Integral_0^R Re[Psi(eps + i r) e^{i r v}] dr,

with eps = 0 reducing to the plain characteristic-function cosine inversion.
The abscissa is placed at the minimizer of h(eps) = eps v + log Psi(eps): the
bulk of the density is insensitive to eps, but in the far tail the value of
f(v) is exponentially smaller than the eps = 0 integrand and would drown in
cancellation, whereas at the optimal tilt the integrand peak matches the
result up to an algebraic factor.  Everything is carried in log space, so
densities far below the double-precision underflow threshold of the plain
formula come out with full relative accuracy.

The mixing density follows by the change of variables m_t(y) = 2 t y f(t y^2),
and the stock density by the lognormal-mixture quadrature

    D_t(x0 e^{mu t} x) = (x0 e^{mu t} sqrt(2 pi t))^{-1} x^{-3/2}
        Integral_0^inf y^{-1} m_t(y) exp(-(log^2 x)/(2 t y^2) - t y^2 / 8) dy,

evaluated against a cached log-space interpolant of m_t with a Laplace-type
window around the integrand peak y*^4 = 4 log^2(x)/t^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .params import HestonParams, ModelParams
from .transforms import log_laplace_contour, log_laplace_real, transform_domain

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
# integrand magnitude drop (in log) that counts as negligible
_LOG_CUTOFF = 41.0  # e^-41 < 2e-18
_MAX_REFINE = 9
_DEFAULT_TOL = 1e-8
_REL_TOL = 1e-9


class QuadratureError(RuntimeError):
    """Adaptive refinement failed to reach the requested accuracy."""


@dataclass(frozen=True)
class DensityGrid:
    """Tabulated density curve with its quadrature metadata."""

    abscissae: np.ndarray
    values: np.ndarray
    abs_tolerance: float
    total_mass: float

    def cdf(self) -> CubicSpline:
        """Monotone-clipped CDF interpolant of the tabulated curve."""
        mass = np.concatenate(
            [[0.0], np.cumsum(np.diff(self.abscissae) * 0.5 * (self.values[1:] + self.values[:-1]))]
        )
        spline = CubicSpline(self.abscissae, mass)
        lo, hi = self.abscissae[0], self.abscissae[-1]

        def _cdf(x):
            return np.clip(spline(np.clip(x, lo, hi)), 0.0, None)

        return _cdf


def _gl_panels(a: float, b: float, n_panels: int):
    """Gauss-Legendre nodes/weights on n_panels equal panels over [a, b]."""
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def _tilt_center(model: ModelParams, t: float, v: float, lam_lo: float) -> float:
    """Abscissa minimizing eps*v + log Psi(eps) over (lam_lo, inf)."""
    width = abs(lam_lo)

    def h(e):
        return e * v + log_laplace_real(model, t, e)

    lo = lam_lo + 1e-9 * width
    hi = lam_lo + 4.0 * width
    # expand right until h turns upward (h is convex with a unique minimum)
    for _ in range(60):
        if h(hi) > h(0.5 * (hi + lam_lo)):
            break
        hi = lam_lo + 2.0 * (hi - lam_lo)
    res = minimize_scalar(h, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10 * width})
    return float(res.x)


def _truncation_radius(model: ModelParams, t: float, eps: float, ref: float, v: float) -> float:
    """Smallest dyadic R with |Psi(eps + ir)| negligible against Psi(eps) for r >= R.

    Near the optimal tilt the integrand is Gaussian-narrow in r, so the search
    starts small and doubles; R is accepted only when the magnitude stays below
    the cutoff at both R and 2R (the decay is eventually square-root
    exponential, hence monotone in the large).
    """

    def mag(r):
        return log_laplace_contour(model, t, np.array([eps + 0j, eps + 1j * r]))[1].real

    r = max(1.0 / max(v, 1.0), 1e-3)
    for _ in range(80):
        if mag(r) < ref - _LOG_CUTOFF and mag(2.0 * r) < ref - _LOG_CUTOFF:
            return r
        r *= 2.0
    raise QuadratureError("transform decay too slow to truncate the inversion contour")


def _invert_log(model: ModelParams, t: float, v: float, abs_tolerance: float) -> float:
    """log of the integrated-variance density at v > 0 via the tilted Bromwich integral."""
    lam_lo = transform_domain(model, t).lam_lower
    eps = _tilt_center(model, t, v, lam_lo)
    log_ref = log_laplace_real(model, t, eps)
    radius = _truncation_radius(model, t, eps, log_ref, v)

    # absolute tolerance on the density, translated to the normalized integral
    # (capped so the relative criterion governs deep in the tail)
    abs_term = abs_tolerance * math.exp(min(-(eps * v + log_ref), 0.0))
    # resolve both the e^{irv} oscillation and the transform's own variation
    n_panels = max(8, int(radius * v / (2.0 * math.pi) / 12.0) + 1)
    prev = None
    for _ in range(_MAX_REFINE):
        r_nodes, w = _gl_panels(0.0, radius, n_panels)
        lams = eps + 1j * r_nodes
        log_psi = log_laplace_contour(model, t, np.concatenate([[eps + 0j], lams]))[1:]
        integrand = np.exp(log_psi - log_ref + 1j * r_nodes * v).real
        s = float(np.dot(w, integrand))
        if prev is not None and abs(s - prev) <= max(_REL_TOL * abs(s), abs_term):
            if s <= 0:
                return -math.inf  # value below cancellation floor: density is 0 here
            return eps * v + log_ref + math.log(s / math.pi)
        prev = s
        n_panels *= 2
    raise QuadratureError(f"density inversion did not converge at v={v!r}")


def integrated_variance_density(
    model: ModelParams, t: float, y: float, abs_tolerance: float = _DEFAULT_TOL
) -> float:
    """Density of int_0^t Y ds (Heston) or int_0^t Y^2 ds (Stein-Stein) at y > 0.

    Fourier/Bromwich inversion of the closed-form transform, tilted to the
    saddle abscissa; negative lobes below the tolerance are clipped to zero.
    """
    if y <= 0:
        raise ValueError(f"y must be positive, got {y}")
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    log_f = _invert_log(model, t, y, abs_tolerance)
    return 0.0 if log_f == -math.inf else math.exp(log_f)


def log_mixing_density(model: ModelParams, t: float, y: float,
                       abs_tolerance: float = _DEFAULT_TOL) -> float:
    """log m_t(y); m_t(y) = 2 t y f(t y^2) with f the integrated-variance density."""
    if y <= 0:
        raise ValueError(f"y must be positive, got {y}")
    log_f = _invert_log(model, t, t * y * y, abs_tolerance)
    return -math.inf if log_f == -math.inf else math.log(2.0 * t * y) + log_f


def mixing_density(model: ModelParams, t: float, y: float,
                   abs_tolerance: float = _DEFAULT_TOL) -> float:
    """Mixing density m_t at y > 0 (density of the RMS average volatility alpha_t)."""
    out = log_mixing_density(model, t, y, abs_tolerance)
    return 0.0 if out == -math.inf else math.exp(out)


# ---------------------------------------------------------------------------
# cached mixing curve (log-space interpolant) for quadratures against m_t
# ---------------------------------------------------------------------------

_CURVE_POINTS = 480


class _MixingCurve:
    """Cubic interpolant of log m_t on a log-spaced y grid covering the support."""

    def __init__(self, model: ModelParams, t: float):
        lam_lo = transform_domain(model, t).lam_lower
        # second moment of alpha_t from the transform derivative at 0
        d = 1e-6
        mean_iv = -(log_laplace_real(model, t, d) - log_laplace_real(model, t, -d)) / (2 * d)
        y_c = math.sqrt(mean_iv / t)
        # Gaussian-type tail exp(t lam_lo y^2): stop once 700 log-units below peak scale
        y_hi = max(4.0 * y_c, math.sqrt(700.0 / (t * abs(lam_lo))))
        y_lo = y_c / 64.0
        ys = np.geomspace(y_lo, y_hi, _CURVE_POINTS)
        logs = np.empty_like(ys)
        for i, y in enumerate(ys):
            logs[i] = log_mixing_density(model, t, float(y))
        good = logs > -690.0
        first, last = np.argmax(good), len(good) - np.argmax(good[::-1]) - 1
        self.y_lo = float(ys[first])
        self.y_hi = float(ys[last])
        self._spline = CubicSpline(np.log(ys[first:last + 1]), logs[first:last + 1])

    def log_m(self, y):
        """Vectorized log m_t(y); -inf outside the tabulated support."""
        y = np.asarray(y, dtype=float)
        out = np.full(y.shape, -math.inf)
        ok = (y >= self.y_lo) & (y <= self.y_hi)
        out[ok] = self._spline(np.log(y[ok]))
        return out


@lru_cache(maxsize=8)
def _mixing_curve(model: ModelParams, t: float) -> _MixingCurve:
    return _MixingCurve(model, t)


# ---------------------------------------------------------------------------
# stock density and call prices
# ---------------------------------------------------------------------------

def _log_stock_integrand(curve: _MixingCurve, t: float, lx: float, y):
    """log of y^{-1} m_t(y) exp(-log^2(x)/(2 t y^2) - t y^2/8)."""
    y = np.asarray(y, dtype=float)
    return (
        curve.log_m(y) - np.log(y)
        - lx * lx / (2.0 * t * y * y) - t * y * y / 8.0
    )


def _stock_window(curve: _MixingCurve, t: float, lx: float) -> tuple[float, float, float]:
    """Integration window around the integrand peak, expanded to negligible endpoints."""
    if lx != 0.0:
        y_star = math.sqrt(2.0 * abs(lx) / t)
        lo, hi = y_star / 10.0, 10.0 * y_star
    else:
        lo, hi = curve.y_lo, curve.y_hi
    lo = max(lo, curve.y_lo)
    hi = min(hi, curve.y_hi)
    if lo >= hi:
        return lo, lo, -math.inf  # integrand support misses the mixing support entirely
    probe = np.geomspace(lo, hi, 200)
    log_peak = float(np.max(_log_stock_integrand(curve, t, lx, probe)))
    for _ in range(60):
        if _log_stock_integrand(curve, t, lx, np.array([lo]))[0] < log_peak - _LOG_CUTOFF:
            break
        if lo <= curve.y_lo:
            break
        lo = max(lo / 2.0, curve.y_lo)
    for _ in range(60):
        if _log_stock_integrand(curve, t, lx, np.array([hi]))[0] < log_peak - _LOG_CUTOFF:
            break
        if hi >= curve.y_hi:
            break
        hi = min(hi * 2.0, curve.y_hi)
    return lo, hi, log_peak


def _log_quad(fn_log, a: float, b: float, log_peak: float, abs_tolerance: float,
              what: str) -> float:
    """log of Integral_a^b exp(fn_log(u)) du with the peak factored out."""
    prev = None
    n_panels = 16
    for _ in range(_MAX_REFINE):
        nodes, w = _gl_panels(a, b, n_panels)
        s = float(np.dot(w, np.exp(fn_log(nodes) - log_peak)))
        if prev is not None and abs(s - prev) <= max(_REL_TOL * abs(s), abs_tolerance):
            if s <= 0:
                return -math.inf
            return log_peak + math.log(s)
        prev = s
        n_panels *= 2
    raise QuadratureError(f"{what}: quadrature did not converge")


def log_stock_density(model: ModelParams, t: float, x: float,
                      abs_tolerance: float = _DEFAULT_TOL) -> float:
    """log D_t(x0 e^{mu t} x) for moneyness ratio x > 0."""
    if x <= 0:
        raise ValueError(f"x must be positive, got {x}")
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    curve = _mixing_curve(model, t)
    lx = math.log(x)
    lo, hi, log_peak = _stock_window(curve, t, lx)
    if log_peak == -math.inf:
        return -math.inf
    # integrate in log-y coordinates (extra e^u Jacobian)
    log_int = _log_quad(
        lambda u: _log_stock_integrand(curve, t, lx, np.exp(u)) + u,
        math.log(lo), math.log(hi), log_peak, abs_tolerance, "stock density",
    )
    if log_int == -math.inf:
        return -math.inf
    pref = -math.log(model.x0) - model.mu * t - 0.5 * math.log(2.0 * math.pi * t)
    return pref - 1.5 * lx + log_int


def stock_density(model: ModelParams, t: float, x: float,
                  abs_tolerance: float = _DEFAULT_TOL) -> float:
    """Stock-price density D_t evaluated at x0 e^{mu t} x, for moneyness ratio x > 0."""
    out = log_stock_density(model, t, x, abs_tolerance)
    return 0.0 if out == -math.inf else math.exp(out)


class _StockLogCurve:
    """Interpolant of ell -> log D_t(x0 e^{mu t} e^ell) on a symmetric grid.

    Built once per (model, t); call pricing integrates strikes against it
    instead of re-running the mixing quadrature at every node.
    """

    _PER_UNIT = 16

    def __init__(self, model: ModelParams, t: float, half_range: float):
        n = int(2 * half_range * self._PER_UNIT) + 1
        ells = np.linspace(-half_range, half_range, n)
        logs = np.array([log_stock_density(model, t, math.exp(le)) for le in ells])
        good = np.isfinite(logs)
        self.lo = float(ells[good][0])
        self.hi = float(ells[good][-1])
        self._spline = CubicSpline(ells[good], logs[good])

    def log_d(self, ell):
        ell = np.asarray(ell, dtype=float)
        out = np.full(ell.shape, -math.inf)
        ok = (ell >= self.lo) & (ell <= self.hi)
        out[ok] = self._spline(ell[ok])
        return out


@lru_cache(maxsize=8)
def _stock_log_curve(model: ModelParams, t: float, half_range: float) -> _StockLogCurve:
    return _StockLogCurve(model, t, half_range)


def call_price(model: ModelParams, t: float, rate: float, strike: float,
               abs_tolerance: float = _DEFAULT_TOL) -> float:
    """European call price e^{-rt} E[(X_t - K)+] by quadrature against D_t.

    The model drift is set to ``rate`` (pricing measure); the quadrature runs
    in log-moneyness against a cached tabulation of the stock density.
    """
    if strike <= 0:
        raise ValueError(f"strike must be positive, got {strike}")
    p = model.with_drift(rate)
    fwd = p.x0 * math.exp(rate * t)
    s_k = strike / fwd
    lk = math.log(s_k)
    half = 24.0
    while half < abs(lk) + 12.0:
        half *= 2.0
    curve = _stock_log_curve(p, t, half)

    def log_f(ell):
        # log of (e^l - s_K) * D(F e^l) * e^l, the absolute-price payoff integrand
        ell = np.atleast_1d(np.asarray(ell, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            gap = np.where(ell > lk, np.log(np.expm1(np.clip(ell - lk, 0, None))) + lk,
                           -np.inf)
        return gap + curve.log_d(ell) + ell

    a = max(lk, curve.lo)
    probe = np.linspace(a + 1e-9 * max(1.0, abs(a)), min(max(a + 8.0, 4.0), curve.hi), 160)
    log_peak = float(np.max(log_f(probe)))
    if log_peak == -math.inf:
        return 0.0
    b = probe[-1]
    while b < curve.hi and log_f(np.array([b]))[0] > log_peak - _LOG_CUTOFF:
        b = min(b + 2.0, curve.hi)
    log_int = _log_quad(log_f, a, b, log_peak, abs_tolerance, "call price")
    if log_int == -math.inf:
        return 0.0
    # V = e^{-rt} F^2 * integral  (one F from u = F s, one from the payoff scale)
    return math.exp(-rate * t + 2.0 * math.log(fwd) + log_int)


# ---------------------------------------------------------------------------
# tabulated curves
# ---------------------------------------------------------------------------

def mixing_density_grid(model: ModelParams, t: float, ys: np.ndarray,
                        abs_tolerance: float = _DEFAULT_TOL) -> DensityGrid:
    """Tabulate m_t on ``ys`` (strictly increasing) with trapezoid total mass."""
    ys = np.asarray(ys, dtype=float)
    if ys.ndim != 1 or ys.size < 2 or np.any(np.diff(ys) <= 0):
        raise ValueError("ys must be a strictly increasing vector")
    vals = np.array([mixing_density(model, t, float(y), abs_tolerance) for y in ys])
    vals = np.clip(vals, 0.0, None)
    return DensityGrid(ys, vals, abs_tolerance, float(np.trapezoid(vals, ys)))


def stock_density_grid(model: ModelParams, t: float, xs: np.ndarray,
                       abs_tolerance: float = _DEFAULT_TOL) -> DensityGrid:
    """Tabulate x -> D_t(x0 e^{mu t} x) on ``xs`` (strictly increasing moneyness)."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise ValueError("xs must be a strictly increasing vector")
    vals = np.array([stock_density(model, t, float(x), abs_tolerance) for x in xs])
    vals = np.clip(vals, 0.0, None)
    # mass in absolute-price coordinates u = x0 e^{mu t} x
    scale = model.x0 * math.exp(model.mu * t)
    return DensityGrid(xs, vals, abs_tolerance, float(np.trapezoid(vals, xs) * scale))
