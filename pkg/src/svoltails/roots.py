"""The entire function Phi_s(z) = z cos z + s sin z and its smallest positive zero.

For s >= 0 the smallest positive zero r_s sits in [pi/2, pi): r_0 = pi/2 and
r_s increases to pi as s grows.  On (pi/2, pi) the root solves
-u / tan(u) = s, and the left side is strictly increasing there, so a plain
bisection is unconditionally convergent.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

_HALF_PI = math.pi / 2
# Opening the bracket just right of pi/2 avoids the tan singularity.
_BRACKET_PAD = 1e-12
# Beyond this, bisection cannot resolve pi - r_s; use the two-term expansion.
_LARGE_S = 1e12
_MAX_ITER = 200


@dataclass(frozen=True)
class RootQuery:
    """Root request: the parameter s of Phi_s and an absolute tolerance."""

    s: float
    tolerance: float = 1e-13

    def __post_init__(self):
        if self.s < 0:
            raise ValueError(f"s must be nonnegative, got {self.s}")
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")


def phi(s: float, z: complex) -> complex:
    """Evaluate Phi_s(z) = z cos z + s sin z in complex arithmetic."""
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    z = complex(z)
    return z * cmath.cos(z) + s * cmath.sin(z)


def phi_derivatives(s: float, z: float) -> tuple[float, float]:
    """First and second derivative of Phi_s at real z.

    Phi'_s(z) = (1+s) cos z - z sin z and Phi''_s(z) = -2 sin z - Phi_s(z);
    at z = r_s the second derivative reduces to -2 sin(r_s).
    """
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    cz, sz = math.cos(z), math.sin(z)
    first = (1.0 + s) * cz - z * sz
    second = -2.0 * sz - (z * cz + s * sz)
    return first, second


def smallest_root(s: float | RootQuery, tolerance: float = 1e-13) -> float:
    """Smallest positive zero r_s of Phi_s, for s >= 0.

    Accepts either a bare s or a RootQuery.  r_0 = pi/2 exactly; for s > 0
    bisection runs on -u/tan(u) - s over (pi/2, pi); for s > 1e12 the
    expansion pi - pi/s is returned (bisection loses resolution near pi).
    """
    if isinstance(s, RootQuery):
        s, tolerance = s.s, s.tolerance
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    if s == 0:
        return _HALF_PI
    if s > _LARGE_S:
        return min(max(math.pi - math.pi / s, _HALF_PI), math.pi)

    lo = _HALF_PI + _BRACKET_PAD
    hi = math.pi - _BRACKET_PAD
    flo = -lo / math.tan(lo) - s
    fhi = -hi / math.tan(hi) - s
    if flo > 0 or fhi < 0:
        raise RuntimeError(f"bisection bracket failed for s={s}")  # unreachable for s >= 0
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if -mid / math.tan(mid) - s <= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tolerance:
            break
    return 0.5 * (lo + hi)
