"""Parameter containers for the uncorrelated Heston and Stein-Stein models."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class HestonParams:
    """Heston model:  dX = mu X dt + sqrt(Y) X dW,   dY = (a + b Y) dt + c sqrt(Y) dZ.

    ``b <= 0`` (mean reversion); ``b = 0`` is allowed and is handled through the
    squared-Bessel representation of the variance process.
    """

    mu: float
    a: float
    b: float
    c: float
    y0: float
    x0: float = 1.0

    def __post_init__(self):
        if self.a < 0:
            raise ValueError(f"a must be nonnegative, got {self.a}")
        if self.b > 0:
            raise ValueError(f"b must be nonpositive, got {self.b}")
        if self.c <= 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.y0 < 0:
            raise ValueError(f"y0 must be nonnegative, got {self.y0}")
        if self.x0 <= 0:
            raise ValueError(f"x0 must be positive, got {self.x0}")

    def with_drift(self, mu: float) -> "HestonParams":
        """Copy with the drift replaced (pricing sets mu to the risk-free rate)."""
        return replace(self, mu=mu)


@dataclass(frozen=True)
class SteinSteinParams:
    """Stein-Stein model:  dX = mu X dt + |Y| X dW,   dY = q (m - Y) dt + sigma dZ."""

    mu: float
    q: float
    m: float
    sigma: float
    y0: float
    x0: float = 1.0

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError(f"q must be positive, got {self.q}")
        if self.m < 0:
            raise ValueError(f"m must be nonnegative, got {self.m}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.x0 <= 0:
            raise ValueError(f"x0 must be positive, got {self.x0}")

    def with_drift(self, mu: float) -> "SteinSteinParams":
        return replace(self, mu=mu)


ModelParams = HestonParams | SteinSteinParams
