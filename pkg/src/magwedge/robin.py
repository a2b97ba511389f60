"""Quartic existence certificate for the magnetic Robin Laplacian on a wedge.

For aperture ``phi``, coupling ``beta`` and threshold ``theta`` the quartic

    P(x) = (2 phi - pi tanh(phi/2)) x^4 - 8 theta phi x^2 - 16 beta sqrt(pi) x + 8 phi

having a negative value on ``x > 0`` certifies a discrete eigenvalue below
``theta``. A non-negative minimum proves nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

__all__ = [
    "RobinQuartic",
    "RobinVerdict",
    "quartic_min",
    "robin_exists",
    "large_beta_witness",
    "critical_aperture",
    "certificate_margin",
]

SQRT_PI = math.sqrt(math.pi)


def _check_aperture(phi: float) -> float:
    phi = float(phi)
    if not 0.0 < phi < math.pi:
        raise ValueError(f"aperture must lie in (0, pi), got {phi!r}")
    return phi


@dataclass(frozen=True)
class RobinQuartic:
    phi: float
    beta: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "phi", _check_aperture(self.phi))

    @property
    def c4(self) -> float:
        return 2.0 * self.phi - math.pi * math.tanh(0.5 * self.phi)

    @property
    def c2(self) -> float:
        return -8.0 * self.theta * self.phi

    @property
    def c1(self) -> float:
        return -16.0 * self.beta * SQRT_PI

    @property
    def c0(self) -> float:
        return 8.0 * self.phi

    def __call__(self, x):
        x2 = np.multiply(x, x)
        return self.c4 * x2 * x2 + self.c2 * x2 + self.c1 * x + self.c0

    def derivative(self, x):
        return 4.0 * self.c4 * x**3 + 2.0 * self.c2 * x + self.c1

    def critical_points(self) -> list[float]:
        """Real roots of the derivative cubic, polished by Newton steps."""
        # depressed cubic x^3 + p x + q = 0
        p = self.c2 / (2.0 * self.c4)
        q = self.c1 / (4.0 * self.c4)
        disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
        if p < 0 and disc < 0:
            m = 2.0 * math.sqrt(-p / 3.0)
            arg = min(1.0, max(-1.0, 3.0 * q / (p * m)))
            base = math.acos(arg) / 3.0
            roots = [m * math.cos(base - 2.0 * math.pi * k / 3.0) for k in range(3)]
        else:
            sq = math.sqrt(max(disc, 0.0))
            roots = [np.cbrt(-q / 2.0 + sq) + np.cbrt(-q / 2.0 - sq)]
        polished = []
        for x in roots:
            for _ in range(3):
                d2 = 12.0 * self.c4 * x * x + 2.0 * self.c2
                if d2 == 0.0:
                    break
                x -= self.derivative(x) / d2
            polished.append(float(x))
        return polished


@dataclass(frozen=True)
class RobinVerdict:
    exists: bool
    p_min: float
    x_star: float


def quartic_min(q: RobinQuartic) -> tuple[float, float]:
    """Global minimum of ``q`` over ``x > 0`` as ``(x_star, P_min)``.

    When no positive critical point beats the boundary, the infimum ``c0``
    is approached as ``x -> 0+`` and ``x_star = 0.0`` is reported.
    """
    best_x, best_v = 0.0, q.c0
    for x in q.critical_points():
        if x > 0.0:
            v = float(q(x))
            if v < best_v:
                best_x, best_v = x, v
    return best_x, best_v


def certificate_margin(phi: float) -> float:
    return 1e-9 * max(1.0, 8.0 * phi)


def robin_exists(phi: float, beta: float, theta: float) -> RobinVerdict:
    q = RobinQuartic(phi, beta, theta)
    x_star, p_min = quartic_min(q)
    return RobinVerdict(p_min < -certificate_margin(q.phi), p_min, x_star)


def large_beta_witness(phi: float, beta: float, theta: float) -> float:
    """``P(1/beta)``: negative for ``phi < sqrt(pi)`` once ``beta`` is large."""
    if not beta > 0:
        raise ValueError(f"witness needs beta > 0, got {beta!r}")
    return float(RobinQuartic(phi, beta, theta)(1.0 / beta))


def critical_aperture(
    theta: float,
    beta: float = 0.0,
    lo: float = 0.3 * math.pi,
    hi: float = 0.8 * math.pi,
    tol: float = 1e-10,
) -> float:
    """Aperture where the certificate switches off, by bisection on the sign of ``P_min``."""
    def certified(phi: float) -> bool:
        return robin_exists(phi, beta, theta).exists

    if not certified(lo) or certified(hi):
        raise NumericalError(f"no certificate sign change in ({lo:g}, {hi:g})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if certified(mid):
            lo = mid
        else:
            hi = mid
    return lo
