import cmath
import math

import mpmath
import numpy as np
import pytest
from scipy import special as sp

from klooster.special import (
    LANDAU_C0,
    F_imag,
    G_imag,
    RegimeError,
    bessel_I,
    bessel_J,
    bessel_J_imag_order,
    bessel_J_series,
    cgamma,
    rgamma,
    xi_k,
)


def test_lanczos_gamma_against_mpmath():
    for z in (0.5, 1, 2.5, 7.3, -0.5 + 0.2j, 0.25 + 3j, 1 - 8j, -2.5 + 1j, 0.5 + 0.1j):
        ref = complex(mpmath.gamma(z))
        assert abs(cgamma(z) - ref) <= 1e-12 * abs(ref)
        assert abs(rgamma(z) - 1 / ref) <= 1e-12 * abs(1 / ref)
    assert rgamma(0) == 0 and rgamma(-3) == 0
    with pytest.raises(ValueError):
        cgamma(-2)


def test_closed_forms():
    assert abs(bessel_J(0.5, math.pi)) < 1e-16
    for u in (0.1, 1, 5, 20):
        for order, ref in ((0.5, sp.jv(0.5, u)), (-0.5, sp.jv(-0.5, u)), (1.5, sp.jv(1.5, u))):
            assert abs(bessel_J(order, u) - ref) < 1e-14


@pytest.mark.parametrize("u", [0.1, 1, 5, 20, 29.9])
def test_series_matches_half_integer_closed_forms(u):
    for order in (0.5, -0.5, 1.5):
        closed = bessel_J(order, u)
        series = bessel_J_series(order, u).real
        assert abs(series - closed) <= 1e-10 * abs(closed)


@pytest.mark.parametrize("order", [0, 0.3, 1, 2.25, 5, 9.5])
def test_real_order_against_scipy(order):
    for u in np.linspace(0.05, 50, 200):
        assert abs(bessel_J(order, u) - sp.jv(order, u)) < 1e-12


def test_real_order_regime():
    with pytest.raises(RegimeError):
        bessel_J(0.3, 60)
    with pytest.raises(RegimeError):
        bessel_J(-0.7, 3)
    with pytest.raises(ValueError):
        bessel_J(1, 0)
    assert abs(bessel_J(-1, 2.0) + sp.jv(1, 2.0)) < 1e-14


def test_landau_bound_grid():
    worst = 0.0
    for beta in np.linspace(0.5, 10, 20):
        for u in np.linspace(0.05, 50, 400):
            j = bessel_J(beta, u)
            assert abs(j) <= 1
            worst = max(worst, abs(j) * u ** (1 / 3))
    assert worst <= LANDAU_C0


def test_derivative_recurrence():
    h = 1e-5
    for beta in (1, 1.5, 2, 2.5, 3.25, 4, 6):
        for u in np.linspace(0.5, 20, 12):
            d = (bessel_J(beta - 1, u + h) - bessel_J(beta - 1, u - h)) / (2 * h)
            assert abs(2 * d - (bessel_J(beta - 2, u) - bessel_J(beta, u))) < 1e-8


def test_bessel_I():
    u = 1.0
    series = sum((u / 2) ** (0.5 + 2 * j) / (math.factorial(j) * math.gamma(j + 1.5)) for j in range(30))
    assert abs(bessel_I(0.5, u) - series) < 1e-15
    assert abs(bessel_I(0.5, u) * math.sqrt(u) - math.sqrt(2 / math.pi) * math.sinh(u)) < 1e-15
    assert bessel_I(0.5, 1e-12) < 1e-5
    vals = [bessel_I(0.5, u) for u in np.linspace(1e-3, 50, 500)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    for u in (1e-6, 1e-3, 0.5, 3, 40):
        assert abs(bessel_I(0.5, u) - sp.iv(0.5, u)) <= 1e-13 * sp.iv(0.5, u)
        assert abs(bessel_I(1.5, u) - sp.iv(1.5, u)) <= 1e-12 * sp.iv(1.5, u)
    with pytest.raises(ValueError):
        bessel_I(2.5, 1)


def test_imaginary_order_against_mpmath():
    for r in (0.1, 0.7, 2.0, 4.0):
        for u in (0.3, 3.0, 11.0, 20.0):
            ref = complex(mpmath.besselj(2j * r, u))
            assert abs(bessel_J_imag_order(r, u) - ref) < 1e-12 * max(1, abs(ref))


def test_imaginary_order_zero_is_J0():
    for u in (0.2, 1, 7, 19):
        assert abs(bessel_J_imag_order(0, u) - bessel_J(0, u)) < 1e-12


def test_imaginary_order_conjugation():
    for r in np.linspace(-4, 4, 9):
        for u in np.linspace(0.1, 20, 9):
            assert abs(bessel_J_imag_order(r, u).conjugate() - bessel_J_imag_order(-r, u)) < 1e-12


def test_imaginary_order_regime():
    with pytest.raises(RegimeError):
        bessel_J_imag_order(4.5, 1)
    with pytest.raises(RegimeError):
        bessel_J_imag_order(1, 21)


def test_F_and_G():
    for r in (0.3, 1.0, 3.5):
        for u in (0.5, 4.0, 15.0):
            jp = complex(mpmath.besselj(2j * r, u))
            jm = complex(mpmath.besselj(-2j * r, u))
            F = (jp + jm) / (2 * cmath.cos(1j * math.pi * r))
            G = (jp - jm) / (2 * cmath.sin(1j * math.pi * r))
            assert abs(F.imag) < 1e-12 and abs(G.imag) < 1e-12
            assert abs(F_imag(r, u) - F.real) < 1e-12
            assert abs(G_imag(r, u) - G.real) < 1e-12
    # removable point r = 0 and evenness
    assert abs(G_imag(0, 2.0) - G_imag(1e-4, 2.0)) < 1e-6
    assert G_imag(0.8, 3.0) == pytest.approx(G_imag(-0.8, 3.0), abs=1e-13)


def test_xi_k():
    for k in (0.5, 1.5):
        small = [abs(xi_k(k, r)) for r in np.linspace(-1, 1, 41)]
        assert max(small) < 100
        for r in np.linspace(0.1, 5, 11):
            assert abs(xi_k(k, r) - xi_k(k, -r)) < 1e-12 * abs(xi_k(k, r))
        ratios = [abs(xi_k(k, r)) / (r ** k * math.exp(math.pi * r)) for r in np.linspace(1, 10, 19)]
        assert max(ratios) / min(ratios) < 3
