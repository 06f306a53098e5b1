"""Explicit tail constants and leading-term evaluators for both models.

Everything here reduces to elementary functions of r_s, the smallest positive
zero of z cos z + s sin z, with s = t|b|/2 (Heston) or s = q t (Stein-Stein).
The mixing density behaves like  amp * exp(-quad*y^2) * exp(lin*y) * y^power
for large y, the stock density like  c1 * x^(-c3) * exp(c2 sqrt(log x)) *
(log x)^log_power for large x, and the implied-volatility wing follows from
the stock constants alone.

All evaluators work in log space and exponentiate last: exp(lin*y) and
exp(-quad*y^2) over- and underflow componentwise long before their product
does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .params import HestonParams, ModelParams, SteinSteinParams
from .roots import smallest_root

_SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# constants containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HestonMixingConstants:
    """Residues, series coefficients and final A, B, C of the Heston mixing tail."""

    u_bt: float
    lambda0: float
    eta1: float
    eta2: float
    rho1: float
    rho2: float
    alpha: float
    F_tilde0: float
    A: float
    B: float
    C: float
    y_power: float
    t: float


@dataclass(frozen=True)
class SteinMixingConstants:
    """Residue, series coefficients and final E, F, G of the Stein-Stein mixing tail."""

    v_qt: float
    lambda1: float
    zeta1: float
    zeta2: float
    tau1: float
    tau2: float
    alpha2: float
    alpha3: float
    alpha4: float
    alpha5: float
    Ftilde2_0: float
    Ftilde3_0: float
    Ftilde4_0: float
    Ftilde5_0: float
    alpha: float
    F_tilde0: float
    E: float
    F: float
    G: float
    y_power: float
    t: float


@dataclass(frozen=True)
class StockTailConstants:
    """Leading-term data of the stock-price density tail: c1 x^-c3 e^{c2 sqrt(log x)} (log x)^log_power.

    ``k`` and ``l`` are the quadrature constants sqrt(quad + t/8) and the linear
    mixing coefficient used in the integral-operator leading term;
    ``power_shift`` is a/c^2 for Heston and 0 for Stein-Stein.
    """

    c1: float
    c2: float
    c3: float
    k: float
    l: float
    power_shift: float
    log_power: float
    t: float


@dataclass(frozen=True)
class SmileCoeffs:
    """Implied-volatility wing coefficients: I(k) ~ b1 sqrt(k) + b2 + b3 log(k)/sqrt(k)."""

    b1: float
    b2: float
    b3: float
    T: float
    has_log_term: bool = True


@dataclass(frozen=True)
class LtiInputs:
    """Data of the generic Laplace-inversion leading term.

    ``alpha`` is the residue of the exponent F at 0; gamma1/gamma2 the outer
    powers; G2_at_0 the analytic prefactor at 0; F_tilde_at_0 the constant term
    of F - alpha/lambda.
    """

    alpha: float
    gamma1: float
    gamma2: float
    G2_at_0: float
    F_tilde_at_0: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError("gamma1 and gamma2 must be nonnegative")


# ---------------------------------------------------------------------------
# constants assembly
# ---------------------------------------------------------------------------

def heston_mixing_constants(p: HestonParams, t: float) -> HestonMixingConstants:
    """Mixing-tail constants for the Heston model with b < 0.

    Rejects b >= 0 (use ``heston_mixing_constants_b0``) and y0 <= 0 (the
    exponent residue alpha is proportional to y0 and the tail theorem needs
    alpha > 0).
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    if p.b >= 0:
        raise ValueError("b must be negative here; use heston_mixing_constants_b0 for b = 0")
    if p.y0 <= 0:
        raise ValueError("y0 must be positive (alpha degenerates to 0 at y0 = 0)")

    a, b, c, y0 = p.a, p.b, p.c, p.y0
    r = smallest_root(0.5 * t * abs(b))
    sr, cr = math.sin(r), math.cos(r)
    u_bt = -4.0 * r * r / (t * t)
    big_k = b * b - u_bt
    dphi = (1.0 + 0.5 * t * abs(b)) * cr - r * sr

    lambda0 = 8.0 * r * r / (t * t * abs(dphi))
    eta1 = sr
    eta2 = -t * t * cr / (8.0 * r)
    rho1 = t * t * dphi / (8.0 * r)
    rho2 = t ** 4 / 128.0 * (dphi / r ** 3 + 2.0 * sr / r ** 2)
    alpha = t * y0 * eta1 * big_k / (2.0 * c * c * abs(rho1))
    f_tilde0 = t * y0 / (2.0 * c * c * rho1 * rho1) * (
        (eta1 - big_k * eta2) * rho1 + big_k * eta1 * rho2
    )

    ac2 = a / (c * c)
    big_a = (
        (1.0 / _SQRT_PI)
        * (t / (2.0 * c * c)) ** (0.25 + ac2)
        * alpha ** (0.25 - ac2)
        * lambda0 ** (2.0 * ac2)
        * math.exp(-a * b * t / (c * c))
        * math.exp(f_tilde0)
    )
    big_b = math.sqrt(2.0 * alpha * t) / c
    big_c = t * big_k / (2.0 * c * c)
    return HestonMixingConstants(
        u_bt=u_bt, lambda0=lambda0, eta1=eta1, eta2=eta2, rho1=rho1, rho2=rho2,
        alpha=alpha, F_tilde0=f_tilde0, A=big_a, B=big_b, C=big_c,
        y_power=-0.5 + 2.0 * ac2, t=t,
    )


def heston_mixing_constants_b0(p: HestonParams, t: float) -> HestonMixingConstants:
    """Closed-form mixing constants for b = 0, where r_0 = pi/2 collapses everything.

    lambda0 = 4 pi / t^2, alpha = 4 y0 pi^2 / (c^2 t^3), F~(0) = -3 y0 / (c^2 t),
    B = 2 sqrt(2 y0) pi / (c^2 t), C = pi^2 / (2 c^2 t) and
    A = 2^(1/4 + a/c^2) y0^(1/4 - a/c^2) / (c sqrt(t)) * exp(-3 y0 / (c^2 t)).
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    if p.b != 0:
        raise ValueError(f"b must be 0 here, got {p.b}")
    if p.y0 <= 0:
        raise ValueError("y0 must be positive (alpha degenerates to 0 at y0 = 0)")

    a, c, y0 = p.a, p.c, p.y0
    pi = math.pi
    ac2 = a / (c * c)
    alpha = 4.0 * y0 * pi * pi / (c * c * t ** 3)
    f_tilde0 = -3.0 * y0 / (c * c * t)
    big_a = (
        2.0 ** (0.25 + ac2) * y0 ** (0.25 - ac2) / (c * math.sqrt(t))
        * math.exp(f_tilde0)
    )
    return HestonMixingConstants(
        u_bt=-pi * pi / (t * t),
        lambda0=4.0 * pi / (t * t),
        eta1=1.0,
        eta2=0.0,
        rho1=-t * t / 8.0,
        rho2=t ** 4 / (32.0 * pi * pi),
        alpha=alpha,
        F_tilde0=f_tilde0,
        A=big_a,
        B=2.0 * math.sqrt(2.0 * y0) * pi / (c * c * t),
        C=pi * pi / (2.0 * c * c * t),
        y_power=-0.5 + 2.0 * ac2,
        t=t,
    )


def stein_mixing_constants(p: SteinSteinParams, t: float) -> SteinMixingConstants:
    """Mixing-tail constants for the Stein-Stein model.

    Each alpha_j carries its m or y0 factor, so alpha_j >= 0 requires y0 >= 0
    once m > 0; (y0, m) = (0, 0) degenerates alpha to 0 and is rejected.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    q, m, sig, y0 = p.q, p.m, p.sigma, p.y0
    if m > 0 and y0 < 0:
        raise ValueError("y0 must be nonnegative when m > 0 (alpha_3 would turn negative)")
    if m == 0 and y0 == 0:
        raise ValueError("(y0, m) = (0, 0) degenerates the tail residue alpha to 0")

    r = smallest_root(q * t)
    sr, cr = math.sin(r), math.cos(r)
    sh = math.sin(0.5 * r)
    v_qt = -(r * r) / (t * t)
    big_k = q * q - v_qt
    dphi = (1.0 + q * t) * cr - r * sr

    lambda1 = 2.0 * r * r / (t * t * abs(dphi))
    zeta1 = t * t * dphi / (2.0 * r)
    zeta2 = t ** 4 / (8.0 * r ** 3) * ((1.0 + q * t) * cr + r * sr)
    tau1 = 2.0 * (v_qt - q * q) * r / (t * t * dphi)
    tau2 = (zeta1 - (v_qt - q * q) * zeta2) / (zeta1 * zeta1)

    # bracket expansions H_j(lam) = i (h_j0 + h_j1 lam + ...) around lam = 0
    h20 = sr
    h21 = -t * t * cr / (2.0 * r)
    h30 = t * (1.0 - cr) / r
    h31 = -t ** 3 * (r * sr + cr - 1.0) / (2.0 * r ** 3)
    h40 = -t * t * (sr - r * cr) / (r * r)
    h41 = t ** 4 * ((0.5 * r * r - 1.0) * sr + r * cr) / r ** 4
    h50 = t ** 3 * (r * sr - 4.0 * sh * sh) / r ** 3
    h51 = (
        t ** 5 * (sr - r * cr) / (2.0 * r ** 4)
        + 3.0 * t ** 5 * (r * sr - 4.0 * sh * sh) / (2.0 * r ** 5)
    )

    c2 = y0 * y0 * t / (2.0 * sig * sig)
    c3 = m * q * y0 * t / (sig * sig)
    c4 = -m * m * q * q * t / (2.0 * sig * sig)
    c5 = -m * m * q ** 3 * t / (2.0 * sig * sig)

    alpha2 = c2 * tau1 * h20
    alpha3 = c3 * tau1 * h30
    alpha4 = c4 * tau1 * h40
    alpha5 = c5 * tau1 * h50
    ft2 = c2 * (tau1 * h21 + tau2 * h20)
    ft3 = c3 * (tau1 * h31 + tau2 * h30)
    ft4 = c4 * (tau1 * h41 + tau2 * h40)
    ft5 = c5 * (tau1 * h51 + tau2 * h50)

    alpha = alpha2 + alpha3 + alpha4 + alpha5
    f_tilde0 = ft2 + ft3 + ft4 + ft5

    big_e = (
        math.sqrt(t) / (math.sqrt(2.0 * math.pi) * sig)
        * math.exp(0.5 * q * t)
        * math.sqrt(lambda1)
        * math.exp(f_tilde0)
    )
    big_f = math.sqrt(2.0 * alpha * t) / sig
    big_g = t * big_k / (2.0 * sig * sig)
    return SteinMixingConstants(
        v_qt=v_qt, lambda1=lambda1, zeta1=zeta1, zeta2=zeta2, tau1=tau1, tau2=tau2,
        alpha2=alpha2, alpha3=alpha3, alpha4=alpha4, alpha5=alpha5,
        Ftilde2_0=ft2, Ftilde3_0=ft3, Ftilde4_0=ft4, Ftilde5_0=ft5,
        alpha=alpha, F_tilde0=f_tilde0, E=big_e, F=big_f, G=big_g,
        y_power=0.0, t=t,
    )


def _mixing_abc(consts) -> tuple[float, float, float, float]:
    """(amplitude, linear, quadratic, y-power) of a mixing-tail constants object."""
    if isinstance(consts, HestonMixingConstants):
        return consts.A, consts.B, consts.C, consts.y_power
    return consts.E, consts.F, consts.G, consts.y_power


def heston_stock_constants(p: HestonParams, t: float) -> StockTailConstants:
    """Stock-density tail constants A1, A2, A3 for the Heston model."""
    mix = heston_mixing_constants_b0(p, t) if p.b == 0 else heston_mixing_constants(p, t)
    return _stock_constants(mix, p.x0, p.mu, p.a / (p.c * p.c), t)


def stein_stock_constants(p: SteinSteinParams, t: float) -> StockTailConstants:
    """Stock-density tail constants B1, B2, B3 for the Stein-Stein model."""
    mix = stein_mixing_constants(p, t)
    return _stock_constants(mix, p.x0, p.mu, 0.0, t)


def _stock_constants(mix, x0, mu, power_shift, t) -> StockTailConstants:
    amp, lin, quad, y_power = _mixing_abc(mix)
    root8 = math.sqrt(8.0 * quad + t)
    c3 = 1.5 + root8 / (2.0 * math.sqrt(t))
    c2 = lin * math.sqrt(2.0) / (t ** 0.25 * root8 ** 0.5)
    # exponent on 2, t and (8*quad + t) from folding the integral-operator
    # leading term back through z = log(x)/sqrt(2 t)
    if isinstance(mix, HestonMixingConstants):
        e2 = -0.75 + power_shift
        et = -0.125 - 0.5 * power_shift
        log_power = -0.75 + power_shift
    else:
        e2 = -0.5
        et = -0.25
        log_power = -0.5
    c1 = (
        amp / (x0 * math.exp(mu * t))
        * 2.0 ** e2 * t ** et * (8.0 * quad + t) ** et
        * math.exp(lin * lin / (2.0 * (8.0 * quad + t)))
    )
    return StockTailConstants(
        c1=c1, c2=c2, c3=c3,
        k=math.sqrt(quad + t / 8.0), l=lin,
        power_shift=power_shift, log_power=log_power, t=t,
    )


# ---------------------------------------------------------------------------
# leading-term evaluators
# ---------------------------------------------------------------------------

def lti_leading_term(inp: LtiInputs, y: float) -> float:
    """Leading term of the inverse Laplace transform:

    (1/(2 sqrt(pi))) alpha^(1/4+(g1-g2)/2) G2(0) e^{F~(0)} y^(-3/4+(g2-g1)/2) e^{2 sqrt(alpha y)}.
    """
    if y <= 0:
        raise ValueError(f"y must be positive, got {y}")
    g = 0.5 * (inp.gamma1 - inp.gamma2)
    log_val = (
        -math.log(2.0 * _SQRT_PI)
        + (0.25 + g) * math.log(inp.alpha)
        + inp.F_tilde_at_0
        + (-0.75 - g) * math.log(y)
        + 2.0 * math.sqrt(inp.alpha * y)
    )
    return inp.G2_at_0 * math.exp(log_val)


def log_mixing_tail(consts, y: float) -> float:
    """log of the mixing-density leading term amp e^{-quad y^2} e^{lin y} y^power."""
    if y <= 0:
        raise ValueError(f"y must be positive, got {y}")
    amp, lin, quad, y_power = _mixing_abc(consts)
    return math.log(amp) - quad * y * y + lin * y + y_power * math.log(y)


def mixing_tail_eval(consts, y: float) -> float:
    """Leading term of m_t(y) as y -> infinity (log-space computation)."""
    return math.exp(log_mixing_tail(consts, y))


def log_stock_tail(consts: StockTailConstants, x: float) -> float:
    """log of the stock-density leading term c1 x^-c3 e^{c2 sqrt(log x)} (log x)^log_power."""
    if x <= 1:
        raise ValueError(f"x must exceed 1 (tail expansion as x -> infinity), got {x}")
    lx = math.log(x)
    return (
        math.log(consts.c1) - consts.c3 * lx + consts.c2 * math.sqrt(lx)
        + consts.log_power * math.log(lx)
    )


def stock_tail_eval(consts: StockTailConstants, x: float) -> float:
    """Leading term of D_t(x0 e^{mu t} x) as x -> infinity (log-space computation)."""
    return math.exp(log_stock_tail(consts, x))


def into_leading_term(
    zeta_at: Callable[[float], float],
    l: float,
    kappa: float,
    gamma_exp: float,
    w: float,
) -> float:
    """Leading term of int_0^inf A(y) exp(-(w^2/y^2 + kappa^2 y^2)) dy for A(y) ~ e^{l y} zeta(y):

    (sqrt(pi)/(2 kappa)) e^{l^2/(16 kappa^2)} zeta(sqrt(w/kappa)) e^{l sqrt(w/kappa)} e^{-2 kappa w}.

    ``gamma_exp`` is the regularity exponent of the error term (it does not
    enter the leading factor; it is validated for interface completeness).
    """
    if kappa <= 0 or w <= 0:
        raise ValueError("kappa and w must be positive")
    if not 0 < gamma_exp <= 1:
        raise ValueError(f"gamma_exp must lie in (0, 1], got {gamma_exp}")
    yc = math.sqrt(w / kappa)
    return (
        _SQRT_PI / (2.0 * kappa)
        * zeta_at(yc)
        * math.exp(l * l / (16.0 * kappa * kappa) + l * yc - 2.0 * kappa * w)
    )


# ---------------------------------------------------------------------------
# smiles and moment windows
# ---------------------------------------------------------------------------

def smile_coeffs(consts: StockTailConstants, T: float) -> SmileCoeffs:
    """Wing coefficients of the implied-volatility expansion from the tail constants."""
    if T <= 0:
        raise ValueError(f"T must be positive, got {T}")
    c3 = consts.c3
    if c3 <= 2:
        raise ValueError(f"tail power must exceed 2 for the wing formulas, got {c3}")
    sq1, sq2 = math.sqrt(c3 - 1.0), math.sqrt(c3 - 2.0)
    b1 = math.sqrt(2.0 / T) * (sq1 - sq2)
    b2 = consts.c2 / math.sqrt(2.0 * T) * (1.0 / sq2 - 1.0 / sq1)
    # the log-k coefficient traces back to the power of log x in the density tail
    cl = -(2.0 * consts.log_power + 1.0)
    b3 = 0.5 * cl / math.sqrt(2.0 * T) * (1.0 / sq1 - 1.0 / sq2)
    return SmileCoeffs(b1=b1, b2=b2, b3=b3, T=T, has_log_term=cl != 0.0)


def smile_eval(sc: SmileCoeffs, k: float) -> float:
    """Three-term wing value b1 sqrt(k) + b2 + b3 log(k)/sqrt(k) at log-strike k > 1."""
    if k <= 1:
        raise ValueError(f"k must exceed 1, got {k}")
    val = sc.b1 * math.sqrt(k) + sc.b2
    if sc.has_log_term:
        val += sc.b3 * math.log(k) / math.sqrt(k)
    return val


def moment_window(model: ModelParams, t: float) -> tuple[float, float]:
    """Exponent window (p_lo, p_hi) on which E[X_t^p] is finite: (2 - c3, c3 - 1)."""
    if isinstance(model, HestonParams):
        consts = heston_stock_constants(model, t)
    else:
        consts = stein_stock_constants(model, t)
    return 2.0 - consts.c3, consts.c3 - 1.0
