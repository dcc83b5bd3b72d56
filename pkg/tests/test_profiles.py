import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from critabs.profiles import (
    Params,
    QuadratureError,
    adaptive_gauss,
    barenblatt_gradient_magnitude,
    barenblatt_mass,
    barenblatt_value,
    compute_constants,
    g_of_a,
    mass_to_amplitude,
    quad_I1_I2,
    subsolution_residual,
    support_radius_of,
    theta_exponent,
    unit_ball_volume,
)

P31 = Params.critical(3, 1)

# beta-function closed forms for p=3, N=1
I1_BETA = 2 * (2 / 3) * 6 ** (2 / 3) * special.beta(2 / 3, 3)
I2_BETA = 4 ** (-5 / 4) * (2 / 3) * 6**1.5 * special.beta(1.5, 3.5)


def test_beta_values_used_as_oracles():
    assert special.beta(2 / 3, 3) == pytest.approx(27 / 40, rel=1e-14)
    assert special.beta(1.5, 3.5) == pytest.approx(5 * math.pi / 128, rel=1e-14)


def test_basic_constants_p3_n1():
    c = compute_constants(P31)
    assert c.eta == 0.25
    assert P31.q == 2.5
    assert c.b0 == pytest.approx(1 / 6, abs=1e-16)
    assert c.theta == pytest.approx(4 / 3, abs=1e-12)


def test_basic_constants_p4_n2():
    prm = Params.critical(4, 2)
    assert prm.eta == 1 / 8
    assert prm.q == pytest.approx(10 / 3, abs=1e-15)
    assert prm.b0 == pytest.approx(0.25, abs=1e-15)


def test_integrals_match_beta_forms():
    i1, i2 = quad_I1_I2(P31, tol=1e-12)
    assert i1 == pytest.approx(I1_BETA, abs=1e-12)
    assert i2 == pytest.approx(I2_BETA, abs=1e-12)
    assert i1 == pytest.approx(2.971735, abs=1e-6)
    assert i2 == pytest.approx(0.212554, abs=1e-6)


@pytest.mark.parametrize("p,N", [(3, 1), (2.5, 1), (4, 2), (3.5, 3)])
def test_integrals_match_direct_radial_quadrature(p, N):
    prm = Params.critical(p, N)
    i1, i2 = quad_I1_I2(prm)
    R = support_radius_of(1.0, prm)
    # I1 = (N+1) int_0^R B_1 r^{N-1} dr, I2 = int_0^R |B_1'|^q r^{N-1} dr
    d1, _ = integrate.quad(lambda r: barenblatt_value(1.0, r, prm) * r ** (N - 1), 0, R,
                           epsabs=1e-13, epsrel=1e-12, limit=200)
    d2, _ = integrate.quad(lambda r: barenblatt_gradient_magnitude(1.0, r, prm) ** prm.q * r ** (N - 1),
                           0, R, epsabs=1e-13, epsrel=1e-12, limit=200)
    assert i1 == pytest.approx((N + 1) * d1, rel=1e-9)
    assert i2 == pytest.approx(d2, rel=1e-9)


def test_a_star_and_a_sub():
    c = compute_constants(P31)
    assert c.a_star == pytest.approx((I1_BETA / I2_BETA) ** 0.75, rel=1e-12)
    assert c.a_star == pytest.approx(7.2301, abs=1e-3)
    assert c.a_sub == pytest.approx(1.6224, abs=1e-4)
    # the bracket: (N+1) p B0^{q/p} eta^{-(q-p+1)/(p-1)} = A^theta
    bracket = 2 * 3 * (1 / 6) ** (2.5 / 3) * 0.25 ** (-0.25)
    assert c.a_sub ** (4 / 3) == pytest.approx(bracket, rel=1e-13)


def test_non_critical_constants_have_no_critical_fields():
    c = compute_constants(Params(3, 1, 2.2))
    assert c.a_sub is None and c.i2 is None and c.a_star is None
    with pytest.raises(ValueError):
        quad_I1_I2(Params(3, 1, 2.2))
    with pytest.raises(ValueError):
        g_of_a(1.0, Params(3, 1, 2.2))


@pytest.mark.parametrize("bad", [dict(p=2, N=1, q=2), dict(p=3, N=0, q=2), dict(p=3, N=1.5, q=2),
                                 dict(p=3, N=1, q=1)])
def test_params_validation(bad):
    with pytest.raises(ValueError):
        Params(**bad)


@settings(max_examples=60, deadline=None)
@given(p=st.floats(2.05, 8.0), N=st.integers(1, 6))
def test_eta_identity(p, N):
    prm = Params.critical(p, N)
    assert prm.eta * (p * (N + 1) - 2 * N) == pytest.approx(1.0, abs=1e-15)
    assert prm.is_critical
    assert theta_exponent(prm) > 0


def test_adaptive_gauss_basic_and_failure():
    val, err = adaptive_gauss(np.sin, 0.0, math.pi)
    assert val == pytest.approx(2.0, abs=1e-13)
    assert adaptive_gauss(np.sin, 1.0, 1.0) == (0.0, 0.0)
    with pytest.raises(QuadratureError):
        adaptive_gauss(lambda x: np.abs(x - 0.3) ** -0.9, 0.0, 1.0, tol=1e-14, max_intervals=20)


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_barenblatt_values():
    assert barenblatt_value(1.0, 0.0, P31) == 1.0
    assert barenblatt_value(1.0, 6 ** (2 / 3), P31) == pytest.approx(0.0, abs=1e-15)
    assert barenblatt_value(1.0, 1.0, P31) == pytest.approx(25 / 36, rel=1e-14)
    assert support_radius_of(1.0, P31) == pytest.approx(6 ** (2 / 3), rel=1e-14)
    assert np.all(barenblatt_value(1.0, np.linspace(3.31, 10, 5), P31) == 0)


def test_gradient_values():
    assert barenblatt_gradient_magnitude(1.0, 0.0, P31) == 0.0
    assert barenblatt_gradient_magnitude(1.0, 4.0, P31) == 0.0
    assert barenblatt_gradient_magnitude(1.0, 1.0, P31) == pytest.approx(5 / 12, rel=1e-14)


@pytest.mark.parametrize("p,N,A,gap", [(3, 1, 1.0, 1e-5), (3, 1, 7.23, 1e-5), (3, 2, 0.4, 1e-5),
                                       (2.5, 2, 0.7, 1e-2), (4, 3, 2.0, 1e-2)])
def test_gradient_matches_centered_difference(p, N, A, gap):
    # for p != 3 the profile is less regular at the interface, so the
    # finite difference needs a wider gap there
    prm = Params.critical(p, N)
    h = 1e-6
    R = support_radius_of(A, prm)
    r = np.linspace(0.05 * R, R - gap, 200)
    fd = -(barenblatt_value(A, r + h, prm) - barenblatt_value(A, r - h, prm)) / (2 * h)
    exact = barenblatt_gradient_magnitude(A, r, prm)
    keep = exact > 1e-3 * exact.max()
    assert np.max(np.abs(fd[keep] - exact[keep]) / exact[keep]) <= 1e-5


@pytest.mark.parametrize("A", [0.5, 1.0, 7.23])
def test_mass_matches_direct_quadrature(A):
    R = support_radius_of(A, P31)
    direct, _ = integrate.quad(lambda r: 2 * barenblatt_value(A, r, P31), 0, R, epsabs=1e-14, epsrel=1e-13)
    assert barenblatt_mass(A, P31) == pytest.approx(direct, rel=1e-8)


def test_mass_examples():
    assert barenblatt_mass(1.0, P31) == pytest.approx(2.971735, abs=1e-6)
    assert barenblatt_mass(0.0, P31) == 0.0
    assert barenblatt_mass(1e-12, P31) < 1e-30
    # power law with exponent 8/3; the quadrature oracle gives 18.8693
    assert barenblatt_mass(2.0, P31) == pytest.approx(I1_BETA * 2 ** (8 / 3), rel=1e-12)
    assert barenblatt_mass(2.0, P31) == pytest.approx(18.8693, abs=1e-4)


@pytest.mark.parametrize("N", [2, 3])
def test_mass_in_higher_dimension(N):
    prm = Params.critical(3, N)
    R = support_radius_of(1.3, prm)
    area = N * unit_ball_volume(N)
    direct, _ = integrate.quad(lambda r: area * r ** (N - 1) * barenblatt_value(1.3, r, prm), 0, R,
                               epsabs=1e-14, epsrel=1e-13)
    assert barenblatt_mass(1.3, prm) == pytest.approx(direct, rel=1e-8)


def test_mass_to_amplitude_inverse():
    assert mass_to_amplitude(I1_BETA, P31) == pytest.approx(1.0, rel=1e-12)
    assert mass_to_amplitude(0.0, P31) == 0.0
    thetas = np.geomspace(1e-6, 1e6, 400)
    amps = np.array([mass_to_amplitude(t, P31) for t in thetas])
    assert np.all(np.diff(amps) > 0)
    for A in (0.1, 1.0, 5.0, 40.0):
        assert mass_to_amplitude(barenblatt_mass(A, P31), P31) == pytest.approx(A, rel=1e-12)


def test_g_of_a():
    c = compute_constants(P31)
    assert g_of_a(c.a_star, P31) == pytest.approx(0.0, abs=1e-9)
    assert g_of_a(1.0, P31) == pytest.approx(2 * (I1_BETA - I2_BETA), rel=1e-12)
    assert g_of_a(1.0, P31) == pytest.approx(5.5184, abs=1e-4)
    assert g_of_a(2 * c.a_star, P31) < 0


@pytest.mark.parametrize("p,N", [(3, 1), (2.5, 2), (4, 1)])
def test_g_single_sign_change(p, N):
    prm = Params.critical(p, N)
    a_star = compute_constants(prm).a_star
    a = np.linspace(4 * a_star / 1000, 4 * a_star, 1000)
    g = g_of_a(a, prm)
    assert np.all(g[a < a_star * (1 - 1e-9)] > 0)
    assert np.all(g[a > a_star * (1 + 1e-9)] < 0)


def test_g_matches_profile_norms():
    # G(B_a) = (N+1)|B_a|_1 - |grad B_a|_q^q computed by scipy on the profile
    a = 3.0
    R = support_radius_of(a, P31)
    mass, _ = integrate.quad(lambda r: 2 * barenblatt_value(a, r, P31), 0, R, epsabs=1e-13)
    grad, _ = integrate.quad(lambda r: 2 * barenblatt_gradient_magnitude(a, r, P31) ** 2.5, 0, R,
                             epsabs=1e-13)
    assert g_of_a(a, P31) == pytest.approx(2 * mass - grad, rel=1e-9)


def test_subsolution_residual_signs():
    c = compute_constants(P31)
    A = c.a_sub / 2
    R = support_radius_of(A, P31)
    assert np.all(subsolution_residual(A, 1.0, np.linspace(0, R, 200), P31) <= 0)
    outside = subsolution_residual(A, 3.0, np.linspace(R, 2 * R, 50), P31)
    assert np.all(np.abs(outside) <= 1e-15)
    assert np.all(outside[1:] == 0)
    big = 10 * c.a_sub
    assert np.max(subsolution_residual(big, 1.0, np.linspace(0, support_radius_of(big, P31), 1000), P31)) > 0
    with pytest.raises(ValueError):
        subsolution_residual(A, 0.5, 1.0, P31)


@settings(max_examples=50, deadline=None)
@given(frac=st.floats(0.01, 0.99), s=st.floats(1.0, 1e3), x=st.floats(0.0, 1.5))
def test_subsolution_residual_below_threshold(frac, s, x):
    A = frac * compute_constants(P31).a_sub
    r = x * support_radius_of(A, P31)
    assert subsolution_residual(A, s, r, P31) <= 1e-12
