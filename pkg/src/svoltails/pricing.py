"""Black-Scholes machinery, implied-volatility extraction and model smiles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .asymptotics import (
    StockTailConstants,
    heston_stock_constants,
    log_stock_tail,
    smile_coeffs,
    stein_stock_constants,
)
from .densities import call_price, _gl_panels
from .params import HestonParams, ModelParams

_VOL_LO, _VOL_HI = 1e-6, 5.0
_BISECT_WIDTH = 1e-6
# beyond this log-strike the payoff quadrature loses the price to underflow;
# switch to the closed tail form and flag the point
_TAIL_LOG_STRIKE = 6.0


@dataclass(frozen=True)
class OptionSpec:
    """European call terms."""

    spot: float
    strike: float
    rate: float
    expiry: float

    def __post_init__(self):
        if self.spot <= 0 or self.strike <= 0 or self.expiry <= 0:
            raise ValueError("spot, strike and expiry must be positive")
        if self.rate < 0:
            raise ValueError(f"rate must be nonnegative, got {self.rate}")


@dataclass(frozen=True)
class SmilePoint:
    """One smile node: log-strike k = log(K/(x0 e^{rT})) and the implied vol there."""

    log_strike: float
    implied_vol: float
    flagged_tail: bool = False


def bs_call(spec: OptionSpec, vol: float) -> float:
    """Black-Scholes call price at volatility ``vol``."""
    if vol <= 0:
        raise ValueError(f"vol must be positive, got {vol}")
    df_strike = spec.strike * math.exp(-spec.rate * spec.expiry)
    sq = vol * math.sqrt(spec.expiry)
    d1 = math.log(spec.spot / df_strike) / sq + 0.5 * sq
    return float(spec.spot * ndtr(d1) - df_strike * ndtr(d1 - sq))


def bs_vega(spec: OptionSpec, vol: float) -> float:
    """dPrice/dVol of the Black-Scholes call."""
    df_strike = spec.strike * math.exp(-spec.rate * spec.expiry)
    sq = vol * math.sqrt(spec.expiry)
    d1 = math.log(spec.spot / df_strike) / sq + 0.5 * sq
    return spec.spot * math.sqrt(spec.expiry) * math.exp(-0.5 * d1 * d1) / math.sqrt(2.0 * math.pi)


def implied_vol(spec: OptionSpec, price: float) -> float:
    """Volatility solving bs_call(spec, vol) = price, to residual 1e-12 * spot.

    Bracketed bisection on [1e-6, 5] down to width 1e-6, then Newton polish
    with the analytic vega.  Prices outside the no-arbitrage band
    (max(spot - K e^{-rT}, 0), spot) are rejected.
    """
    intrinsic = max(spec.spot - spec.strike * math.exp(-spec.rate * spec.expiry), 0.0)
    if not intrinsic < price < spec.spot:
        raise ValueError(
            f"price {price!r} violates the no-arbitrage band ({intrinsic!r}, {spec.spot!r})"
        )
    lo, hi = _VOL_LO, _VOL_HI
    if bs_call(spec, lo) > price or bs_call(spec, hi) < price:
        raise ValueError("price not attainable for vol in [1e-6, 5]")
    while hi - lo > _BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        if bs_call(spec, mid) < price:
            lo = mid
        else:
            hi = mid
    vol = 0.5 * (lo + hi)
    tol = 1e-12 * spec.spot
    for _ in range(60):
        resid = bs_call(spec, vol) - price
        if abs(resid) < tol:
            break
        vega = bs_vega(spec, vol)
        if vega <= 0:
            break
        step = resid / vega
        vol = min(max(vol - step, 0.5 * vol), 2.0 * vol)
    return vol


def _tail_call_price(consts: StockTailConstants, fwd: float, rate: float,
                     T: float, k: float) -> float:
    """Deep-OTM call from the density tail expansion, in log space.

    V = e^{-rT} F^2 Integral_k^inf (e^l - e^k) Dtail(F e^l) e^l dl with Dtail the
    leading-term stock density; used where payoff quadrature underflows.
    """
    drop = 41.0 / (consts.c3 - 2.0)
    a, b = k, k + max(drop, 4.0)
    nodes, w = _gl_panels(a, b, 48)
    gap = np.log(np.expm1(nodes - k)) + k
    log_tail = np.array([log_stock_tail(consts, math.exp(le)) for le in nodes])
    log_f = gap + log_tail + nodes
    peak = float(np.max(log_f))
    integral = float(np.dot(w, np.exp(log_f - peak)))
    return math.exp(-rate * T + 2.0 * math.log(fwd) + peak + math.log(integral))


def model_smile(model: ModelParams, T: float, rate: float, k_grid) -> list[SmilePoint]:
    """Implied-volatility smile on a log-strike grid from density-based call prices.

    The model drift is set to ``rate``.  Points with |k| > 6 are priced from the
    tail expansion (quadrature loses those prices) and mirrored through the
    uncorrelated-model symmetry I(k) = I(-k); they carry ``flagged_tail``.
    """
    if T <= 0:
        raise ValueError(f"T must be positive, got {T}")
    p = model.with_drift(rate)
    fwd = p.x0 * math.exp(rate * T)
    tail_consts = None
    points = []
    for k in np.asarray(k_grid, dtype=float):
        flagged = abs(k) > _TAIL_LOG_STRIKE
        if flagged:
            if tail_consts is None:
                if isinstance(p, HestonParams):
                    tail_consts = heston_stock_constants(p, T)
                else:
                    tail_consts = stein_stock_constants(p, T)
            price = _tail_call_price(tail_consts, fwd, rate, T, abs(k))
            strike = fwd * math.exp(abs(k))
        else:
            strike = fwd * math.exp(k)
            price = call_price(model, T, rate, strike)
        spec = OptionSpec(spot=p.x0, strike=strike, rate=rate, expiry=T)
        points.append(SmilePoint(float(k), implied_vol(spec, price), flagged))
    return points
