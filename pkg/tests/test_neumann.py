import math

import numpy as np
import pytest
from scipy import linalg

from magwedge import neumann as nm
from magwedge.errors import NumericalError
from magwedge.numerics import golden_min
from magwedge.robin import critical_aperture as robin_critical

PI = math.pi
SP = math.sqrt(PI)
N2 = nm.N2


def printed_matrices(order, a):
    r = math.sqrt(a)
    if order == 2:
        L = np.array([[2 * a, math.sqrt(a * PI)], [math.sqrt(a * PI), 2]])
        R = np.array([[2 * a, 2 * math.sqrt(a * PI)], [2 * math.sqrt(a * PI), 8]])
        return L, R
    if order == 3:
        L = np.array([[2 * a, math.sqrt(a * PI), 2], [2 * a * SP, 4 * r, 3 * SP], [4 * a, 3 * math.sqrt(a * PI), 8]])
        R = np.array([[2 * a, 2 * math.sqrt(a * PI), 6], [4 * a * SP, 16 * r, 18 * SP], [12 * a, 18 * math.sqrt(a * PI), 72]])
        return L, R
    a32 = a**1.5
    L = np.array(
        [
            [4 * a32, 2 * a * SP, 4 * r, 3 * SP],
            [2 * SP * a32, 4 * a, 3 * math.sqrt(a * PI), 8],
            [8 * a32, 6 * a * SP, 16 * r, 15 * SP],
            [6 * SP * a32, 16 * a, 15 * math.sqrt(a * PI), 48],
        ]
    )
    R = np.array(
        [
            [4 * a32, 4 * a * SP, 12 * r, 12 * SP],
            [4 * SP * a32, 16 * a, 18 * math.sqrt(a * PI), 64],
            [24 * a32, 36 * a * SP, 144 * r, 180 * SP],
            [24 * SP * a32, 128 * a, 180 * math.sqrt(a * PI), 768],
        ]
    )
    return L, R


class TestConstants:
    def test_mu_product(self):
        m1, m2 = N2.mu
        assert m1 * m2 == pytest.approx(2.0, abs=1e-14)

    def test_nu_mu_sum(self):
        (m1, m2), (n1, n2) = N2.mu, N2.nu
        assert n1 * m1 + n2 * m2 == pytest.approx(N2.s, abs=1e-12)

    def test_definitions(self):
        s = math.sqrt(9 - 2 * PI)
        q = math.sqrt(4 - PI)
        assert N2.s == s
        assert N2.mu == pytest.approx(((s + 1) / q, (s - 1) / q), rel=1e-15)
        assert N2.nu[0] == pytest.approx(q * (3 - PI + s) / (2 * (1 + s)), rel=1e-15)
        assert N2.nu[1] == pytest.approx(q * (3 - PI - s) / (2 * (1 - s)), rel=1e-15)

    def test_lambda_are_squares(self):
        assert N2.lam == pytest.approx(tuple(m * m for m in N2.mu), rel=1e-14)

    def test_g(self):
        assert N2.g(0.0, 1.0) == 0.0
        assert N2.g(1.5, 0.4) == pytest.approx(math.exp(0.6) - 1, rel=1e-15)


class TestJ:
    def test_plug_in(self):
        for phi in (0.3, 1.0, 2.5):
            assert nm.j_of_a(phi, 0.0, 0.5) == pytest.approx(phi, rel=1e-15)

    def test_product_form(self):
        phi, th, a = 1.3, 0.59, 0.8
        assert nm.j_of_a(phi, th, a) == pytest.approx(phi * (4 * a * a + 1 - 4 * a * th) / (8 * a * a), rel=1e-14)

    @pytest.mark.parametrize("theta", [0.2, 0.5901, 0.95])
    def test_minimum_over_a(self, theta):
        phi = 1.7
        a, v = golden_min(lambda a: nm.j_of_a(phi, theta, a), 0.3, 5.0, 1e-9)
        assert v == pytest.approx(phi * (1 - theta**2) / 2, abs=1e-12)
        assert a == pytest.approx(1 / (2 * theta), rel=1e-4)

    def test_matches_coupled_form(self):
        phi, th, a, beta = 1.1, 0.4, 0.7, 0.3
        expect = phi / 2 - th * phi / (2 * a) + phi / (8 * a * a) - beta * math.sqrt(PI / a)
        assert nm.j_of_a(phi, th, a, beta) == pytest.approx(expect, rel=1e-14)
        assert nm.j_of_a(phi, th, a, 0.0) == pytest.approx(expect + beta * math.sqrt(PI / a), rel=1e-14)

    def test_rejects(self):
        with pytest.raises(ValueError):
            nm.j_of_a(1.0, 0.5, 0.0)


class TestOdeSystem:
    @pytest.mark.parametrize("a", [0.3, 1.0, 2.7])
    def test_n2_printed(self, a):
        sys2 = nm.build_ode_system(2, a)
        L, R = printed_matrices(2, a)
        assert np.allclose(4 * a * a * sys2.left, L, rtol=1e-14, atol=0)
        assert np.allclose(4 * a * a * sys2.right, R, rtol=1e-14, atol=0)

    @pytest.mark.parametrize("order", [2, 3, 4])
    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
    def test_printed_systems_equivalent(self, order, a):
        L, R = printed_matrices(order, a)
        ref = linalg.solve(L, R)
        got = nm.build_ode_system(order, a).matrix()
        assert np.allclose(got, ref, rtol=1e-10, atol=1e-10 * np.abs(ref).max())

    def test_order_one_scalar(self):
        s = nm.build_ode_system(1, 0.8)
        assert s.matrix() == pytest.approx(np.array([[1.0]]), abs=1e-15)

    @pytest.mark.parametrize("order", range(1, 9))
    @pytest.mark.parametrize("a", [0.05, 1.0, 5.0])
    def test_left_positive_definite(self, order, a):
        s = nm.build_ode_system(order, a)
        linalg.cholesky(s.left)
        assert np.array_equal(s.left, s.left.T)
        assert np.array_equal(s.right, s.right.T)

    @pytest.mark.parametrize("order", [0, 9, 2.5])
    def test_rejects_order(self, order):
        with pytest.raises(ValueError):
            nm.build_ode_system(order, 1.0)


class TestN2Closed:
    def test_lhs_examples(self):
        a = nm.n2_condition_lhs(0.55 * PI, 0.5901)
        b = nm.n2_condition_lhs(0.60 * PI, 0.5901)
        assert a > 1 > b
        assert a == pytest.approx(1.048, abs=2e-3)
        assert b == pytest.approx(0.978, abs=2e-3)

    def test_lhs_blows_up_at_zero(self):
        vals = [nm.n2_condition_lhs(p, 0.5901) for p in (1e-1, 1e-2, 1e-3)]
        assert vals[0] < vals[1] < vals[2] and vals[2] > 1e3

    def test_rejects(self):
        for phi in (0.0, PI, -1.0):
            with pytest.raises(ValueError):
                nm.n2_condition_lhs(phi, 0.59)

    def test_probe_agreement(self, theta_neumann):
        for phi in np.linspace(0.05, 0.95, 181) * PI:
            lhs = nm.n2_condition_lhs(phi, theta_neumann)
            assert (lhs > 1) == (nm.n2_functional_value(phi, theta_neumann) < 0)

    @pytest.mark.parametrize("phi", [0.3 * PI, 0.55 * PI, 0.7 * PI])
    def test_value_is_min_over_a(self, phi):
        th = 0.5901
        _, v = golden_min(lambda a: nm.n2_value_at(phi, th, a), 0.05, 5.0, 1e-10)
        assert v == pytest.approx(nm.n2_functional_value(phi, th), abs=1e-12)

    def test_alpha_from_spectral(self):
        phi = 0.5 * PI
        closed = N2.alpha(phi)
        for a in (0.5, 1.0, 2.0):
            r = nm.minimize_spectral(2, phi, 0.59, a)
            order = np.argsort(-r.mu)  # closed form lists the larger exponent first
            assert r.mu[order] == pytest.approx(np.array(N2.mu), rel=1e-12)
            assert np.allclose(r.alpha_plus[order], closed[:, 0], rtol=1e-10, atol=1e-14)
            assert np.allclose(r.alpha_minus[order], closed[:, 1], rtol=1e-10, atol=1e-14)


class TestDirect:
    def test_zero_profiles_give_j(self):
        prof = np.zeros((129, 3))
        assert nm.direct_energy(3, 1.0, 0.59, 0.7, prof) == nm.j_of_a(1.0, 0.59, 0.7)

    @pytest.mark.parametrize("a", [0.3, 0.5901, 1.0, 2.0])
    def test_n2_closed_form(self, a):
        phi = 0.5 * PI
        got = nm.minimize_direct(2, phi, 0.5901, a).value
        assert got == pytest.approx(nm.n2_value_at(phi, 0.5901, a), rel=1e-4)

    def test_residual(self):
        r = nm.minimize_direct(4, 0.59 * PI, 0.5901, 0.8)
        assert r.residual <= 1e-10
        assert r.profiles.shape == (513, 4) and r.theta_grid[-1] == pytest.approx(0.59 * PI)

    def test_energy_of_minimiser(self):
        r = nm.minimize_direct(3, 1.6, 0.5901, 0.9, m=128)
        assert nm.direct_energy(3, 1.6, 0.5901, 0.9, r.profiles) == pytest.approx(r.value, abs=1e-12)
        rng = np.random.default_rng(3)
        for _ in range(5):
            bumped = r.profiles + 1e-3 * rng.normal(size=r.profiles.shape)
            assert nm.direct_energy(3, 1.6, 0.5901, 0.9, bumped) > r.value

    def test_monotone_under_refinement(self):
        vals = [nm.minimize_direct(3, 1.8, 0.5901, 0.7, m).value for m in (64, 128, 256, 512, 1024)]
        assert all(b <= a + 1e-8 for a, b in zip(vals, vals[1:]))
        assert abs(vals[-1] - vals[-2]) <= 1e-5

    def test_order1_matches_quartic_verdict(self, theta_neumann):
        for f in (0.45, 0.50, 0.52, 0.56):
            v, _ = nm.minimize_over_a(1, f * PI, theta_neumann)
            assert (v < 0) == (f < 0.5096)

    @pytest.mark.parametrize("m", [62, 65, 0])
    def test_rejects_grid(self, m):
        with pytest.raises(ValueError):
            nm.minimize_direct(2, 1.0, 0.59, 1.0, m)


class TestSpectral:
    def test_value_is_n2_closed_form(self):
        for a in (0.4, 1.0, 3.0):
            r = nm.minimize_spectral(2, 1.7, 0.5901, a)
            assert r.value == pytest.approx(nm.n2_value_at(1.7, 0.5901, a), rel=1e-12)

    def test_agrees_with_direct_random(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            phi = rng.uniform(0.2, 0.9) * PI
            a = math.exp(rng.uniform(math.log(0.1), math.log(4.0)))
            s = nm.minimize_spectral(2, phi, 0.5901, a).value
            d = nm.minimize_direct(2, phi, 0.5901, a).value
            assert d == pytest.approx(s, rel=1e-6)

    @pytest.mark.parametrize("order", [3, 4, 5])
    def test_agrees_with_direct_higher(self, order):
        s = nm.minimize_spectral(order, 0.59 * PI, 0.5901, 0.8).value
        d = nm.minimize_direct(order, 0.59 * PI, 0.5901, 0.8).value
        assert d == pytest.approx(s, rel=1e-6)
        assert d >= s - 1e-12

    def test_profiles_satisfy_ode(self):
        r = nm.minimize_spectral(3, 1.5, 0.5901, 1.2)
        sys3 = nm.build_ode_system(3, 1.2)
        th = np.linspace(0, 1.5, 7)
        h = 1e-4
        b = r.profiles(th)
        b2 = (r.profiles(th + h) - 2 * b + r.profiles(th - h)) / h**2
        assert np.allclose(b2 @ sys3.left.T, b @ sys3.right.T, atol=1e-5)

    @pytest.mark.parametrize("order", range(1, 9))
    def test_spectrum_positive(self, order):
        for a in np.geomspace(0.05, 5, 9):
            lam = linalg.eigh(nm.build_ode_system(order, a).right, nm.build_ode_system(order, a).left, eigvals_only=True)
            assert np.all(lam > 0)

    def test_engine_switch(self):
        a = nm.minimize_fixed_a(2, 1.7, 0.5901, 1.0, engine="spectral")
        b = nm.minimize_fixed_a(2, 1.7, 0.5901, 1.0, engine="direct")
        assert a == pytest.approx(b, rel=1e-6)
        with pytest.raises(ValueError):
            nm.minimize_fixed_a(2, 1.7, 0.5901, 1.0, engine="magic")


class TestCritical:
    def test_order1_equals_quartic(self, theta_neumann):
        phi = nm.critical_aperture(1, theta_neumann)
        assert phi == pytest.approx(robin_critical(theta_neumann), abs=2e-4 * PI)

    def test_order2_matches_closed_form(self, theta_neumann):
        phi = nm.critical_aperture(2, theta_neumann, engine="spectral")
        lo, hi = 0.5 * PI, 0.65 * PI
        while hi - lo > 1e-9:
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if nm.n2_condition_lhs(mid, theta_neumann) > 1 else (lo, mid)
        assert phi == pytest.approx(lo, abs=1.5e-4 * PI)
        assert 0.580 * PI < phi < 0.586 * PI

    def test_rejects(self, theta_neumann):
        with pytest.raises(ValueError):
            nm.critical_aperture(7, theta_neumann)
        with pytest.raises(ValueError):
            nm.critical_aperture(2, theta_neumann, tol_phi=1e-6)

    def test_no_sign_change(self, theta_neumann):
        with pytest.raises(NumericalError):
            nm.critical_aperture(2, theta_neumann, lo=0.65 * PI, hi=0.8 * PI, engine="spectral")
