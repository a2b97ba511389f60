"""Shared numerical kernels: erf, Gaussian moments, tridiagonal eigenvalues, golden search."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit
from scipy import special

__all__ = [
    "Tridiag",
    "erf",
    "gaussian_moment",
    "smallest_eig",
    "kth_eig",
    "sturm_count",
    "golden_min",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def erf(x):
    """Error function, scalar or elementwise on arrays."""
    if np.ndim(x) == 0:
        return math.erf(float(x))
    return special.erf(np.asarray(x, dtype=float))


def gaussian_moment(n: int, a: float) -> float:
    """Return E_n(a) = int_0^inf r^n exp(-a r^2) dr = Gamma((n+1)/2) / (2 a^((n+1)/2))."""
    if int(n) != n or n < 0:
        raise ValueError(f"moment order must be a non-negative integer, got {n!r}")
    if not a > 0:
        raise ValueError(f"Gaussian parameter must be positive, got {a!r}")
    k = 0.5 * (int(n) + 1)
    return math.gamma(k) / (2.0 * a**k)


@dataclass(frozen=True)
class Tridiag:
    """Symmetric tridiagonal matrix given by its diagonal and off-diagonal."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(self.diagonal, dtype=np.float64)
        e = np.ascontiguousarray(self.offdiagonal, dtype=np.float64)
        if d.ndim != 1 or e.ndim != 1:
            raise ValueError("diagonal and off-diagonal must be 1-D")
        if d.size < 2:
            raise ValueError(f"tridiagonal size must be >= 2, got {d.size}")
        if e.size != d.size - 1:
            raise ValueError(
                f"off-diagonal length {e.size} does not match diagonal length {d.size}"
            )
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "offdiagonal", e)

    @property
    def size(self) -> int:
        return self.diagonal.size

    def dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.offdiagonal, 1) + np.diag(self.offdiagonal, -1)

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros_like(self.diagonal)
        a = np.abs(self.offdiagonal)
        r[:-1] += a
        r[1:] += a
        return float(np.min(self.diagonal - r)), float(np.max(self.diagonal + r))


@njit(cache=True)
def _count_below(d, e2, x, pivmin):
    # number of negative pivots of LDL^T(T - x I) == number of eigenvalues < x
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, d.size):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def _bisect(d, e2, k, lo, hi, tol, pivmin):
    for _ in range(400):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _count_below(d, e2, mid, pivmin) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _pivmin(t: Tridiag) -> float:
    e2max = float(np.max(t.offdiagonal**2)) if t.offdiagonal.size else 0.0
    return np.finfo(float).tiny * max(1.0, e2max)


def sturm_count(t: Tridiag, x: float) -> int:
    """Number of eigenvalues of ``t`` strictly below ``x``."""
    return int(_count_below(t.diagonal, t.offdiagonal**2, float(x), _pivmin(t)))


def kth_eig(t: Tridiag, k: int, tol: float = 1e-10) -> float:
    """k-th smallest eigenvalue (k = 0 is the ground state) by Sturm-sequence bisection."""
    if not 0 <= k < t.size:
        raise ValueError(f"eigenvalue index {k} out of range for size {t.size}")
    lo, hi = t.gershgorin()
    pad = 1e-12 * max(1.0, abs(lo), abs(hi))
    return float(
        _bisect(t.diagonal, t.offdiagonal**2, int(k), lo - pad, hi + pad, float(tol), _pivmin(t))
    )


def smallest_eig(t: Tridiag, tol: float = 1e-10) -> float:
    return kth_eig(t, 0, tol)


def golden_min(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8
) -> tuple[float, float]:
    """Golden-section search for the minimum of a unimodal ``f`` on ``[lo, hi]``.

    Unimodality is not checked. Returns ``(argmin, f(argmin))`` with the
    bracket shrunk below ``tol``. Near a smooth minimum ``f`` is flat to
    rounding over a width of order sqrt(machine eps), so the argmin cannot
    be pinned down more tightly than that whatever ``tol`` says.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, float(f(x))
