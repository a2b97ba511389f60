"""Order-N Gaussian Ansatz for the magnetic Neumann Laplacian on a wedge.

The trial function is ``exp(-a r^2 / 2) exp(i sum_k r^k b_k(theta))`` on the
sector ``0 < theta < phi``. After the radial integration the energy relative
to the threshold becomes a quadratic functional of the angular profiles,

    I(b) = int_0^phi (b'^T L b' + b^T R b) dtheta - e^T [b]_0^phi + J(a),

with Hankel moment matrices ``L[m,k] = E_{m+k-1}(a)``, ``R[m,k] = m k E_{m+k-1}(a)``
and ``e[k] = E_{k+1}(a)``. Its minimiser solves ``L b'' = R b``. A negative
minimum certifies a bound state below the threshold.

Two engines evaluate the minimum at fixed ``a``: a quadratic finite-element
discretisation (``minimize_direct``) and the exact exponential solution of
the ODE system (``minimize_spectral``). Only ``beta = 0`` is supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, sparse

from .errors import NumericalError, SpectrumError
from .numerics import gaussian_moment, golden_min

__all__ = [
    "NeumannN2Constants",
    "N2",
    "OdeSystem",
    "DirectResult",
    "SpectralResult",
    "j_of_a",
    "n2_condition_lhs",
    "n2_functional_value",
    "n2_value_at",
    "build_ode_system",
    "minimize_direct",
    "direct_energy",
    "minimize_spectral",
    "minimize_fixed_a",
    "minimize_over_a",
    "critical_aperture",
]

MAX_ORDER = 8


def _check_aperture(phi: float) -> float:
    phi = float(phi)
    if not 0.0 < phi < math.pi:
        raise ValueError(f"aperture must lie in (0, pi), got {phi!r}")
    return phi


def j_of_a(phi: float, theta: float, a: float, beta: float = 0.0) -> float:
    """Energy of the bare Gaussian: ``phi/2 - theta phi/(2a) + phi/(8a^2) - beta sqrt(pi/a)``."""
    if not a > 0:
        raise ValueError(f"Gaussian parameter must be positive, got {a!r}")
    return phi / 2.0 - theta * phi / (2.0 * a) + phi / (8.0 * a * a) - beta * math.sqrt(math.pi / a)


@dataclass(frozen=True)
class NeumannN2Constants:
    """Constants of the closed-form N = 2 solution."""

    @property
    def s(self) -> float:
        return math.sqrt(9.0 - 2.0 * math.pi)

    @property
    def _q(self) -> float:
        return math.sqrt(4.0 - math.pi)

    @property
    def mu(self) -> tuple[float, float]:
        s, q = self.s, self._q
        return (s + 1.0) / q, (s - 1.0) / q

    @property
    def lam(self) -> tuple[float, float]:
        s = self.s
        d = 4.0 - math.pi
        return (10.0 - 2.0 * math.pi + 2.0 * s) / d, (10.0 - 2.0 * math.pi - 2.0 * s) / d

    @property
    def nu(self) -> tuple[float, float]:
        s, q = self.s, self._q
        return (
            q * (3.0 - math.pi + s) / (2.0 * (1.0 + s)),
            q * (3.0 - math.pi - s) / (2.0 * (1.0 - s)),
        )

    @property
    def c(self) -> tuple[float, float]:
        """First eigenvector components times sqrt(a); the second component is 1."""
        s, rp = self.s, math.sqrt(math.pi)
        return (-3.0 + s) / rp, (-3.0 - s) / rp

    @property
    def r(self) -> tuple[float, float]:
        s = self.s
        return (s - 1.0) / (2.0 * (3.0 - math.pi + s)), (s + 1.0) / (2.0 * (3.0 - math.pi - s))

    @property
    def delta(self) -> tuple[float, float]:
        return tuple(0.5 + math.sqrt(math.pi) * cj / 4.0 for cj in self.c)

    def gamma(self, i: int, j: int) -> float:
        ci, cj = self.c[i], self.c[j]
        return ci * cj / 2.0 + 0.5 + math.sqrt(math.pi) * (ci + cj) / 4.0

    @staticmethod
    def g(x: float, phi: float) -> float:
        return math.expm1(x * phi)

    def alpha(self, phi: float) -> np.ndarray:
        """Optimal coefficients ``[[a1+, a1-], [a2+, a2-]]`` of ``exp(+-mu_j theta)``."""
        m1, m2 = self.mu
        out = np.empty((2, 2))
        for j, mj in enumerate(self.mu):
            t = math.tanh(0.5 * mj * phi)
            for k, sign in enumerate((1.0, -1.0)):
                out[j, k] = m1**2 * m2**2 * t / (16.0 * mj * self.g(sign * mj, phi) * self.r[j] * self.s)
        return out

    def boundary_gain(self, phi: float) -> float:
        """``mu1^2 mu2^2 (nu1 tanh(mu1 phi/2) + nu2 tanh(mu2 phi/2))``."""
        (m1, m2), (n1, n2) = self.mu, self.nu
        return m1**2 * m2**2 * (n1 * math.tanh(0.5 * m1 * phi) + n2 * math.tanh(0.5 * m2 * phi))


N2 = NeumannN2Constants()


def n2_value_at(phi: float, theta: float, a: float) -> float:
    """Closed-form N = 2 functional at fixed ``a``, coefficients already optimal."""
    return j_of_a(phi, theta, a) - N2.boundary_gain(phi) / (16.0 * N2.s * a * a)


def _n2_denominator(phi: float) -> float:
    return 2.0 * phi * N2.s - N2.boundary_gain(phi)


def n2_functional_value(phi: float, theta: float) -> float:
    """N = 2 functional after optimising ``a``; ``-inf`` if unbounded below."""
    phi = _check_aperture(phi)
    den = _n2_denominator(phi)
    if den <= 0:
        return -math.inf
    return phi / 2.0 - phi**2 * N2.s * theta**2 / den


def n2_condition_lhs(phi: float, theta: float) -> float:
    """Left side of the N = 2 criterion; a value above 1 certifies a bound state.

    The sign of :func:`n2_functional_value` is checked against it.
    """
    phi = _check_aperture(phi)
    den = _n2_denominator(phi)
    lhs = math.inf if den <= 0 else 2.0 * phi * N2.s * theta**2 / den
    value = n2_functional_value(phi, theta)
    if abs(lhs - 1.0) > 1e-12 and (lhs > 1.0) != (value < 0.0):
        raise NumericalError(f"N=2 criterion and functional disagree at phi={phi!r}")
    return lhs


@dataclass(frozen=True)
class OdeSystem:
    """``L b'' = R b`` together with the boundary load vector ``e``."""

    order: int
    a: float
    left: np.ndarray
    right: np.ndarray
    load: np.ndarray

    def matrix(self) -> np.ndarray:
        """``L^{-1} R``."""
        return linalg.solve(self.left, self.right, assume_a="pos")


def build_ode_system(order: int, a: float) -> OdeSystem:
    if int(order) != order or not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be an integer in [1, {MAX_ORDER}], got {order!r}")
    n = int(order)
    mom = np.array([gaussian_moment(k, a) for k in range(2 * n + 1)])
    idx = np.arange(1, n + 1)
    left = mom[idx[:, None] + idx[None, :] - 1]
    right = np.outer(idx, idx) * left
    return OdeSystem(n, float(a), left, right, mom[idx + 1])


@dataclass(frozen=True)
class DirectResult:
    value: float
    theta_grid: np.ndarray
    profiles: np.ndarray  # shape (M + 1, order)
    residual: float


# quadratic Lagrange element on [0, H] with nodes 0, H/2, H
_K2 = np.array([[7.0, -8.0, 1.0], [-8.0, 16.0, -8.0], [1.0, -8.0, 7.0]]) / 3.0
_M2 = np.array([[4.0, 2.0, -1.0], [2.0, 16.0, 2.0], [-1.0, 2.0, 4.0]]) / 30.0


def _assemble(system: OdeSystem, phi: float, m: int) -> sparse.csr_matrix:
    n = system.order
    H = 2.0 * phi / m
    block = np.kron(_K2 / H, system.left) + np.kron(_M2 * H, system.right)
    n_el = m // 2
    local = (2 * np.arange(n_el)[:, None] + np.arange(3)[None, :])[:, :, None] * n + np.arange(n)
    local = local.reshape(n_el, 3 * n)
    rows = np.repeat(local, 3 * n, axis=1).ravel()
    cols = np.tile(local, (1, 3 * n)).ravel()
    vals = np.tile(block.ravel(), n_el)
    size = (m + 1) * n
    return sparse.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()


def _discrete_problem(order, phi, a, m):
    phi = _check_aperture(phi)
    if m < 64 or m % 2:
        raise ValueError(f"grid size must be an even integer >= 64, got {m!r}")
    system = build_ode_system(order, a)
    n = system.order
    A = _assemble(system, phi, m)
    rhs = np.zeros((m + 1) * n)
    rhs[:n] -= system.load
    rhs[-n:] += system.load
    return phi, n, A, rhs


def direct_energy(order: int, phi: float, theta: float, a: float, profiles) -> float:
    """Functional value of piecewise-quadratic profiles given at ``m + 1`` grid nodes."""
    b = np.asarray(profiles, dtype=float)
    phi, _, A, rhs = _discrete_problem(order, phi, a, b.shape[0] - 1)
    v = b.ravel()
    return float(v @ (A @ v) - rhs @ v) + j_of_a(phi, theta, a)


def minimize_direct(order: int, phi: float, theta: float, a: float, m: int = 512) -> DirectResult:
    """Minimise the reduced functional over continuous piecewise-quadratic profiles.

    ``m`` is the number of grid intervals on ``[0, phi]`` (even, at least 64);
    profiles are returned at the ``m + 1`` grid nodes. Refining a grid by an
    integer factor can only lower the value, which stays above the exact minimum.
    """
    phi, n, A, rhs = _discrete_problem(order, phi, a, m)
    u = 3 * n - 1
    ab = np.zeros((u + 1, A.shape[0]))
    for k in range(u + 1):
        ab[u - k, k:] = A.diagonal(k)
    try:
        y = linalg.solveh_banded(ab, rhs)
    except linalg.LinAlgError as exc:
        raise NumericalError(f"finite-element system is not positive definite: {exc}") from exc
    b = 0.5 * y
    residual = float(np.linalg.norm(2.0 * (A @ b) - rhs) / np.linalg.norm(rhs))
    value = j_of_a(phi, theta, a) - 0.25 * float(rhs @ y)
    return DirectResult(value, np.linspace(0.0, phi, m + 1), b.reshape(m + 1, n), residual)


@dataclass(frozen=True)
class SpectralResult:
    value: float
    mu: np.ndarray
    vectors: np.ndarray  # columns, normalised to last component 1
    alpha_plus: np.ndarray
    alpha_minus: np.ndarray

    def profiles(self, theta) -> np.ndarray:
        """Angular profiles ``b_k(theta)``, shape ``(len(theta), order)``."""
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        chi = self.alpha_plus * np.exp(np.outer(th, self.mu)) + self.alpha_minus * np.exp(
            -np.outer(th, self.mu)
        )
        return chi @ self.vectors.T


def minimize_spectral(order: int, phi: float, theta: float, a: float) -> SpectralResult:
    """Exact minimum over solutions ``b = sum_j v_j chi_j`` of the ODE system.

    ``chi_j = alpha_j^+ exp(mu_j theta) + alpha_j^- exp(-mu_j theta)`` with
    ``mu_j^2`` the eigenvalues of ``L^{-1} R``.
    """
    phi = _check_aperture(phi)
    system = build_ode_system(order, a)
    n = system.order
    try:
        lam, vec = linalg.eigh(system.right, system.left)
    except linalg.LinAlgError as exc:
        raise SpectrumError(f"generalized eigenproblem failed: {exc}") from exc
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
        raise SpectrumError(f"non-positive spectrum {lam!r} for order {order}, a={a!r}")
    vec = vec / vec[-1]
    mu = np.sqrt(lam)

    # bounded basis exp(mu (theta - phi)) and exp(-mu theta) on [0, phi]
    def at(th):
        grow, decay = np.exp(mu * (th - phi)), np.exp(-mu * th)
        vals = np.hstack([vec * grow, vec * decay])
        ders = np.hstack([vec * (mu * grow), vec * (-mu * decay)])
        return vals, ders

    v1, d1 = at(phi)
    v0, d0 = at(0.0)
    Q = v1.T @ system.left @ d1 - v0.T @ system.left @ d0
    Q = 0.5 * (Q + Q.T)
    lin = system.load @ (v1 - v0)
    try:
        w = 0.5 * linalg.solve(Q, lin, assume_a="pos")
    except linalg.LinAlgError as exc:
        raise SpectrumError(f"boundary form is singular: {exc}") from exc
    value = j_of_a(phi, theta, a) - 0.5 * float(lin @ w)
    alpha_plus = w[:n] * np.exp(-mu * phi)
    alpha_minus = w[n:]
    return SpectralResult(value, mu, vec, alpha_plus, alpha_minus)


def minimize_fixed_a(
    order: int, phi: float, theta: float, a: float, engine: str = "direct", m: int = 512
) -> float:
    """Functional minimum at fixed ``a``; the spectral engine falls back to direct."""
    if engine == "spectral":
        try:
            return minimize_spectral(order, phi, theta, a).value
        except SpectrumError:
            pass
    elif engine != "direct":
        raise ValueError(f"unknown engine {engine!r}")
    return minimize_direct(order, phi, theta, a, m).value


def minimize_over_a(
    order: int,
    phi: float,
    theta: float,
    engine: str = "direct",
    m: int = 512,
    a_lo: float = 0.05,
    a_hi: float = 5.0,
    tol: float = 1e-6,
) -> tuple[float, float]:
    """``(min_a I, a_star)``: log-spaced coarse scan seeded with ``a = theta``, then golden section."""
    def f(a):
        return minimize_fixed_a(order, phi, theta, a, engine, m)

    grid = np.geomspace(a_lo, a_hi, 25)
    if a_lo < theta < a_hi:
        grid = np.unique(np.append(grid, theta))
    vals = np.array([f(a) for a in grid])
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    a_star, v_star = golden_min(f, lo, hi, tol)
    if v_star > vals[i]:
        a_star, v_star = float(grid[i]), float(vals[i])
    return v_star, a_star


def critical_aperture(
    order: int,
    theta: float,
    tol_phi: float = 1e-4 * math.pi,
    engine: str = "direct",
    m: int = 512,
    lo: float = 0.3 * math.pi,
    hi: float = 0.8 * math.pi,
) -> float:
    """Largest certified aperture by bisection on the sign of ``min_a I``."""
    if int(order) != order or not 1 <= order <= 6:
        raise ValueError(f"order must be an integer in [1, 6], got {order!r}")
    if tol_phi < 1e-4 * math.pi:
        raise ValueError("aperture tolerance must be at least 1e-4 * pi")

    def certified(phi):
        return minimize_over_a(order, phi, theta, engine, m)[0] < 0.0

    if not certified(lo) or certified(hi):
        raise NumericalError(f"no sign change of the Ansatz minimum in ({lo:g}, {hi:g})")
    while hi - lo > tol_phi:
        mid = 0.5 * (lo + hi)
        if certified(mid):
            lo = mid
        else:
            hi = mid
    return lo
