"""Existence certificate for the magnetic delta-interaction on a broken line.

With ``x = 1/sqrt(a)`` (Gaussian width) and ``y = sqrt(2 a c^2) cos(phi/2)``
(shift of the broken line) the trial energy divided by pi is

    F(x, y) = 1 + x^4/4 - x^2 theta - beta x pi^{-1/2} exp(-y^2 tan^2(phi/2)) (1 + erf(y)).

Any point with ``F < 0`` certifies a bound state below ``theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .numerics import erf

__all__ = [
    "DeltaCertificate",
    "f_value",
    "coupling_profile",
    "trial_energy",
    "f_inf",
    "small_beta_certificate",
    "large_beta_certificate",
    "SMALL_BETA_Y",
    "LARGE_BETA_Y",
]

SMALL_BETA_Y = 17.0 * math.sqrt(3.0) / 40.0
LARGE_BETA_Y = 13.0 / 10.0
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


def _check(phi: float, beta: float | None = None) -> None:
    if not 0.0 < phi < math.pi:
        raise ValueError(f"aperture must lie in (0, pi), got {phi!r}")
    if beta is not None and not beta > 0:
        raise ValueError(f"coupling must be positive, got {beta!r}")


def coupling_profile(phi: float, y):
    """``exp(-y^2 tan^2(phi/2)) (1 + erf(y))``, the line-overlap factor."""
    t = math.tan(0.5 * phi)
    return np.exp(-((y * t) ** 2)) * (1.0 + erf(y))


def f_value(phi: float, beta: float, theta: float, x, y):
    """Evaluate ``F(x, y)``; works elementwise on arrays."""
    _check(phi, beta)
    if np.any(np.asarray(x) <= 0) or np.any(np.asarray(y) <= 0):
        raise ValueError("trial parameters x, y must be positive")
    x2 = np.multiply(x, x)
    out = 1.0 + 0.25 * x2 * x2 - x2 * theta - beta * x * _INV_SQRT_PI * coupling_profile(phi, y)
    return float(out) if np.ndim(out) == 0 else out


def trial_energy(phi: float, beta: float, theta: float, a: float, c: float) -> float:
    """Trial energy over pi in the Gaussian width ``a`` and line shift ``c``."""
    _check(phi, beta)
    bulk = 2.0 * (0.5 + 1.0 / (8.0 * a * a) - theta / (2.0 * a))
    line = (
        beta
        / math.sqrt(math.pi * a)
        * math.exp(-2.0 * a * c * c * math.sin(0.5 * phi) ** 2)
        * (1.0 + math.erf(math.sqrt(2.0 * a * c * c) * math.cos(0.5 * phi)))
    )
    return bulk - line


@dataclass(frozen=True)
class DeltaCertificate:
    phi: float
    beta: float
    theta: float
    f_min: float
    x_star: float
    y_star: float
    exists: bool


def f_inf(
    phi: float,
    beta: float,
    theta: float,
    n_grid: int = 128,
    lo: float = 1e-2,
    hi: float = 20.0,
) -> DeltaCertificate:
    """Minimise ``F`` on a log-spaced grid, then refine with Nelder-Mead in log coordinates."""
    _check(phi, beta)
    axis = np.geomspace(lo, hi, n_grid)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    F = f_value(phi, beta, theta, X, Y)
    i, j = np.unravel_index(int(np.argmin(F)), F.shape)
    x0, y0, best = float(axis[i]), float(axis[j]), float(F[i, j])

    def obj(v):
        return f_value(phi, beta, theta, math.exp(v[0]), math.exp(v[1]))

    res = optimize.minimize(
        obj,
        [math.log(x0), math.log(y0)],
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000},
    )
    if res.fun < best and np.all(np.abs(res.x) < 700):
        x0, y0, best = math.exp(res.x[0]), math.exp(res.x[1]), float(res.fun)
    return DeltaCertificate(phi, beta, theta, best, x0, y0, best < -1e-9)


def small_beta_certificate(phi: float, y: float = SMALL_BETA_Y) -> float:
    """``sqrt(2) - exp(-y^2 tan^2(phi/2)) (1 + erf(y))``; negative means certified for small beta."""
    _check(phi)
    return math.sqrt(2.0) - float(coupling_profile(phi, y))


def large_beta_certificate(phi: float, y: float = LARGE_BETA_Y) -> float:
    """``1 - g^2/4`` with ``g = 2 pi^{-1/2} exp(-y^2 tan^2(phi/2)) (1 + erf(y))``."""
    _check(phi)
    g = 2.0 * _INV_SQRT_PI * float(coupling_profile(phi, y))
    return 1.0 - g * g / 4.0
