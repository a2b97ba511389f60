"""Band functions of the 1D fibre operators and the essential-spectrum thresholds.

Two fibre families are discretised with second-order central differences:

* ``robin``: ``-f'' + t^2 f`` on the half-line ``[p, inf)`` with ``f'(p) = -beta f(p)``;
* ``delta``: ``-f'' + t^2 f - beta delta(t - p) f`` on the whole line.

The threshold is the infimum of the lowest eigenvalue over ``p``. It does not
depend on the wedge aperture, so nothing here takes one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .numerics import Tridiag, golden_min, smallest_eig

__all__ = [
    "FiberKind",
    "FiberModel",
    "FiberConfig",
    "ThresholdResult",
    "band_value",
    "band_matrix",
    "threshold",
    "delta_threshold_at_origin",
    "expansion_slope_check",
]


class FiberKind(str, enum.Enum):
    ROBIN = "robin"
    DELTA = "delta"


@dataclass(frozen=True)
class FiberModel:
    kind: FiberKind
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "kind", FiberKind(self.kind))
        if not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta}")
        object.__setattr__(self, "beta", float(self.beta))


@dataclass(frozen=True)
class FiberConfig:
    h: float = 2e-3
    L: float = 12.0
    p_lo: float = -10.0
    p_hi: float = 10.0
    p_step: float = 0.25
    golden_tol: float = 1e-7

    def __post_init__(self):
        if not 0 < self.h <= 1e-2:
            raise ValueError(f"grid step h must lie in (0, 1e-2], got {self.h}")
        if not self.L >= 8:
            raise ValueError(f"truncation margin L must be >= 8, got {self.L}")
        if not self.p_lo < self.p_hi:
            raise ValueError("empty p-scan bracket")
        if not 0 < self.p_step < self.p_hi - self.p_lo:
            raise ValueError(f"bad p-scan step {self.p_step}")
        if not self.golden_tol > 0:
            raise ValueError("golden tolerance must be positive")

    def scan_points(self) -> np.ndarray:
        n = int(round((self.p_hi - self.p_lo) / self.p_step)) + 1
        return np.linspace(self.p_lo, self.p_hi, n)


@dataclass(frozen=True)
class ThresholdResult:
    theta: float
    argmin_p: float
    model: FiberModel
    config: FiberConfig = field(default_factory=FiberConfig)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "argmin_p": self.argmin_p,
            "model": self.model.kind.value,
            "beta": self.model.beta,
            "h": self.config.h,
            "L": self.config.L,
        }


def band_matrix(model: FiberModel, p: float, cfg: FiberConfig) -> tuple[Tridiag, np.ndarray]:
    """Finite-difference matrix for the fibre at ``p`` and the node coordinates.

    A grid node sits exactly on ``p``; the grid step is ``cfg.h`` and the
    domain is extended outward until the margin is met (Dirichlet beyond).
    """
    h = cfg.h
    p = float(p)
    beta = model.beta
    if model.kind is FiberKind.ROBIN:
        length = max(cfg.L, abs(p) + cfg.L)
        n = int(math.ceil(length / h))
        t = p + h * np.arange(n)
        d = 2.0 / h**2 + t**2
        e = np.full(n - 1, -1.0 / h**2)
        # ghost node f_{-1} = f_1 + 2 h beta f_0, then symmetrised by scaling f_0 with sqrt(2)
        d[0] = 2.0 / h**2 - 2.0 * beta / h + p**2
        e[0] = -math.sqrt(2.0) / h**2
    else:
        left = min(0.0, p) - cfg.L
        right = max(0.0, p) + cfg.L
        n_left = int(math.ceil((p - left) / h))
        n_right = int(math.ceil((right - p) / h))
        k = np.arange(-n_left + 1, n_right)
        t = p + h * k
        d = 2.0 / h**2 + t**2
        d[n_left - 1] -= beta / h
        e = np.full(t.size - 1, -1.0 / h**2)
    return Tridiag(d, e), t


def band_value(model: FiberModel, p: float, cfg: FiberConfig | None = None) -> float:
    """Lowest eigenvalue of the discretised fibre operator at ``p``."""
    cfg = cfg or FiberConfig()
    t, _ = band_matrix(model, p, cfg)
    return smallest_eig(t)


def delta_threshold_at_origin(beta: float, cfg: FiberConfig | None = None) -> ThresholdResult:
    """Delta threshold from the single fibre at ``p = 0`` (exact 1 for ``beta <= 0``)."""
    cfg = cfg or FiberConfig()
    model = FiberModel(FiberKind.DELTA, beta)
    if model.beta <= 0:
        return ThresholdResult(1.0, 0.0, model, cfg)
    return ThresholdResult(band_value(model, 0.0, cfg), 0.0, model, cfg)


def threshold(model: FiberModel, cfg: FiberConfig | None = None) -> ThresholdResult:
    """Infimum of the band function: coarse scan over ``p``, then golden section.

    Raises ``NumericalError`` when the coarse minimiser lands on the edge of
    the scan bracket, or when the delta scan disagrees with the value at ``p = 0``.
    """
    cfg = cfg or FiberConfig()
    if model.kind is FiberKind.DELTA and model.beta <= 0:
        return ThresholdResult(1.0, 0.0, model, cfg)

    ps = cfg.scan_points()
    vals = np.array([band_value(model, p, cfg) for p in ps])
    i = int(np.argmin(vals))
    if i == 0 or i == ps.size - 1:
        raise NumericalError(
            f"band-function minimum sits on the scan bracket edge p={ps[i]:g}; "
            "widen the p bracket"
        )
    p_star, v_star = golden_min(
        lambda p: band_value(model, p, cfg), ps[i - 1], ps[i + 1], cfg.golden_tol
    )
    if v_star > vals[i]:
        p_star, v_star = float(ps[i]), float(vals[i])

    if model.kind is FiberKind.DELTA:
        v0 = band_value(model, 0.0, cfg)
        if abs(v0 - v_star) > 1e-6:
            raise NumericalError(
                f"delta band minimum {v_star!r} at p={p_star:g} disagrees with "
                f"value {v0!r} at p=0"
            )
        return ThresholdResult(v0, 0.0, model, cfg)
    return ThresholdResult(v_star, p_star, model, cfg)


def expansion_slope_check(betas, cfg: FiberConfig | None = None) -> float:
    """Least-squares slope of the delta threshold against beta, line pinned at (0, 1)."""
    b = np.asarray(sorted(float(x) for x in betas))
    if b.size < 3:
        raise ValueError(f"need at least 3 couplings for a slope fit, got {b.size}")
    if np.unique(b).size < 3:
        raise ValueError("degenerate fit: fewer than 3 distinct couplings")
    if np.any(b <= 0) or np.any(b > 0.2):
        raise ValueError("couplings must lie in (0, 0.2]")
    theta = np.array([delta_threshold_at_origin(x, cfg).theta for x in b])
    return float(np.dot(b, theta - 1.0) / np.dot(b, b))
