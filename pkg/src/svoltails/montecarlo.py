"""Simulation oracle: exact-transition OU/CIR paths, alpha_t draws and mixing-representation stock draws.

Reproducibility contract: draws are generated with the counter-based Philox
generator; paths are processed in fixed-size batches and batch i uses the
substream Philox(seed).jumped(i), so the draws of path i never depend on the
total path count or on threading.  The per-step recursions run in the kernels
of ``_kernels`` (numba or numpy, bitwise identical).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .params import HestonParams, ModelParams, SteinSteinParams

_BATCH = 4096
_SE_BATCHES = 32

SCHEMES = ("exact_transition", "euler_full_truncation")


@dataclass(frozen=True)
class McConfig:
    """Simulation request: path count, per-horizon step count, seed, stepping scheme."""

    paths: int
    steps: int = 1024
    seed: int = 0
    scheme: str = "exact_transition"

    def __post_init__(self):
        if self.paths < 1:
            raise ValueError(f"paths must be >= 1, got {self.paths}")
        if self.steps < 2:
            raise ValueError(f"steps must be >= 2, got {self.steps}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")


@dataclass(frozen=True)
class McSample:
    """Draw set with its generating configuration."""

    draws: np.ndarray
    config_echo: McConfig

    def mean(self) -> float:
        return float(np.mean(self.draws))

    def estimator_se(self, payoff=None) -> float:
        """Batch-means standard error of mean(payoff(draws)) over 32 batches."""
        values = self.draws if payoff is None else payoff(self.draws)
        n = len(values)
        nb = min(_SE_BATCHES, n)
        edges = np.linspace(0, n, nb + 1).astype(int)
        means = np.array([values[a:b].mean() for a, b in zip(edges[:-1], edges[1:])])
        if nb < 2:
            return float("inf")
        return float(means.std(ddof=1) / math.sqrt(nb))


def _batch_rng(seed: int, batch_index: int, stream: int = 0) -> np.random.Generator:
    """Philox substream for (seed, stream family, batch); streams never collide."""
    return np.random.Generator(np.random.Philox([seed, stream]).jumped(batch_index))


def _batches(n: int):
    for bi, start in enumerate(range(0, n, _BATCH)):
        yield bi, start, min(start + _BATCH, n)


def simulate_ou_alpha(p: SteinSteinParams, t: float, cfg: McConfig) -> McSample:
    """Draws of alpha_t = sqrt((1/t) int_0^t Y_s^2 ds) for the OU volatility process.

    Uses the exact Gaussian transition
    Y_{s+h} = m + (Y_s - m) e^{-q h} + sigma sqrt((1 - e^{-2 q h})/(2 q)) Z
    and trapezoidal integration of Y^2 on the step grid.  The Euler scheme is
    intentionally not offered here: the transition is exact, so there is no
    discretization to cross-check beyond the integration rule.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    h = t / cfg.steps
    decay = math.exp(-p.q * h)
    noise = p.sigma * math.sqrt((1.0 - math.exp(-2.0 * p.q * h)) / (2.0 * p.q))
    out = np.empty(cfg.paths)
    for bi, lo, hi in _batches(cfg.paths):
        rng = _batch_rng(cfg.seed, bi)
        z = rng.standard_normal((hi - lo, cfg.steps))
        out[lo:hi] = _kernels.ou_integral_sq(p.y0, p.m, decay, noise, z, h)
    return McSample(draws=np.sqrt(np.maximum(out, 0.0) / t), config_echo=cfg)


def simulate_cir_alpha(p: HestonParams, t: float, cfg: McConfig) -> McSample:
    """Draws of alpha_t = sqrt((1/t) int_0^t Y_s ds) for the CIR variance process.

    ``exact_transition`` samples each step from the noncentral chi-square
    transition law with d = 4a/c^2 degrees of freedom: for d >= 1 through the
    chi^2(d-1) + (Z + sqrt(nc))^2 decomposition (pre-drawn gamma and normal
    matrices feed the kernel), for d < 1 through numpy's Poisson-mixture
    sampler stepwise.  ``euler_full_truncation`` is the biased cross-check.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    h = t / cfg.steps
    d = 4.0 * p.a / (p.c * p.c)
    out = np.empty(cfg.paths)

    if cfg.scheme == "euler_full_truncation":
        for bi, lo, hi in _batches(cfg.paths):
            rng = _batch_rng(cfg.seed, bi)
            z = rng.standard_normal((hi - lo, cfg.steps))
            out[lo:hi] = _kernels.cir_integral_euler(p.y0, p.a, p.b, p.c, z, h)
        return McSample(draws=np.sqrt(np.maximum(out, 0.0) / t), config_echo=cfg)

    if p.b == 0:
        ebh, scale = 1.0, p.c * p.c * h / 4.0
    else:
        ebh = math.exp(p.b * h)
        scale = p.c * p.c * (1.0 - ebh) / (-4.0 * p.b)

    if d >= 1.0:
        for bi, lo, hi in _batches(cfg.paths):
            rng = _batch_rng(cfg.seed, bi)
            gam2 = 2.0 * rng.standard_gamma(0.5 * (d - 1.0), (hi - lo, cfg.steps))
            z = rng.standard_normal((hi - lo, cfg.steps))
            out[lo:hi] = _kernels.cir_integral_exact(p.y0, ebh, scale, gam2, z, h)
    else:
        # state-dependent Poisson mixture: stepwise vectorized, numpy only
        for bi, lo, hi in _batches(cfg.paths):
            rng = _batch_rng(cfg.seed, bi)
            y = np.full(hi - lo, p.y0)
            acc = 0.5 * y
            for _ in range(cfg.steps):
                nc = y * ebh / scale
                y = scale * rng.noncentral_chisquare(d, np.maximum(nc, 1e-300))
                acc += y
            acc -= 0.5 * y
            out[lo:hi] = acc * h
    return McSample(draws=np.sqrt(np.maximum(out, 0.0) / t), config_echo=cfg)


def simulate_stock(model: ModelParams, t: float, cfg: McConfig) -> McSample:
    """Terminal stock draws via the mixing representation.

    Conditionally on alpha_t, log(X_t / (x0 e^{mu t})) is Gaussian with mean
    -t alpha_t^2 / 2 and variance t alpha_t^2 (uncorrelated model), so one
    extra normal per path on top of the alpha_t draw gives X_t exactly.
    """
    if isinstance(model, HestonParams):
        alpha = simulate_cir_alpha(model, t, cfg)
    else:
        alpha = simulate_ou_alpha(model, t, cfg)
    x = np.empty(cfg.paths)
    for bi, lo, hi in _batches(cfg.paths):
        # separate stream family keeps stock draws independent of path draws
        rng = _batch_rng(cfg.seed, bi, stream=1)
        z = rng.standard_normal(hi - lo)
        a = alpha.draws[lo:hi]
        x[lo:hi] = model.x0 * np.exp(
            model.mu * t - 0.5 * t * a * a + math.sqrt(t) * a * z
        )
    return McSample(draws=x, config_echo=cfg)


def ks_distance(sample: McSample, cdf) -> float:
    """Sup-norm distance between the empirical CDF of ``sample`` and ``cdf``."""
    draws = np.sort(np.asarray(sample.draws, dtype=float))
    n = draws.size
    if n == 0:
        raise ValueError("sample is empty")
    f = np.asarray(cdf(draws), dtype=float)
    grid = np.arange(n + 1) / n
    return float(max(np.max(np.abs(f - grid[:-1])), np.max(np.abs(f - grid[1:]))))
