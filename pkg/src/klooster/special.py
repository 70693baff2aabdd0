"""Bessel functions and Gamma-function helpers for the test-function transforms.

J_nu is summed from its power series. For u <= 4 plain complex doubles are
enough (at most ~2 digits lost to cancellation); beyond that the partial sums
run in mpmath floats whose precision grows with u so the alternating series
keeps ~16 significant digits. Only the series coefficients are computed this
way. The leading 1/Gamma(1 + nu) comes from the Lanczos approximation below.
"""

from __future__ import annotations

import cmath
import math

import mpmath

REAL_ORDER_U_MAX = 50.0
IMAG_ORDER_U_MAX = 20.0
IMAG_ORDER_R_MAX = 4.0
LANDAU_C0 = 0.7857

_MAX_TERMS = 200
_DOUBLE_U_MAX = 4.0

# g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


class RegimeError(ValueError):
    """Argument outside the range where the series is trusted."""


def _log_gamma_lanczos(z: complex) -> complex:
    # Re z >= 1/2
    z = z - 1
    x = _LANCZOS[0]
    for i in range(1, 9):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def cgamma(z: complex) -> complex:
    """Complex Gamma function (Lanczos, reflected for Re z < 1/2)."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == int(z.real):
        raise ValueError(f"Gamma has a pole at {z}")
    if z.real < 0.5:
        s = cmath.sin(math.pi * z)
        return math.pi / (s * cgamma(1 - z))
    return cmath.exp(_log_gamma_lanczos(z))


def rgamma(z: complex) -> complex:
    """1/Gamma(z); zero at the non-positive integers."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == int(z.real):
        return 0j
    if z.real < 0.5:
        return cmath.sin(math.pi * z) * cgamma(1 - z) / math.pi
    return cmath.exp(-_log_gamma_lanczos(z))


def _pochhammer_sum(nu: complex, u: float) -> complex:
    """sum_j (-u^2/4)^j / (j! (1+nu)_j)."""
    x = -(u * u) / 4.0
    if u <= _DOUBLE_U_MAX:
        term = 1 + 0j
        acc = 1 + 0j
        for j in range(1, _MAX_TERMS):
            term *= x / (j * (j + nu))
            acc += term
            if abs(term) < 1e-18 * abs(acc):
                return acc
        return acc
    # Largest term is ~ e^u, so carry that many extra digits.
    dps = 20 + int(u / math.log(10)) + 1
    with mpmath.workdps(dps):
        nu_m = mpmath.mpc(nu)
        x_m = -mpmath.mpf(u) ** 2 / 4
        term = mpmath.mpc(1)
        acc = mpmath.mpc(1)
        tiny = mpmath.mpf(10) ** (-dps + 2)
        big = mpmath.mpf(1)
        for j in range(1, _MAX_TERMS):
            term *= x_m / (j * (j + nu_m))
            acc += term
            big = max(big, abs(term))
            if abs(term) < tiny * big and abs(term) < 1e-18 * abs(acc):
                break
        return complex(acc)


def bessel_J_series(nu: complex, u: float) -> complex:
    """J_nu(u) for u > 0 from the power series; nu may be complex."""
    if u <= 0:
        raise ValueError("u must be positive")
    nu = complex(nu)
    if nu.imag == 0 and nu.real < 0 and nu.real == int(nu.real):
        n = -int(nu.real)
        return (-1) ** n * bessel_J_series(n, u)
    lead = cmath.exp(nu * math.log(u / 2)) * rgamma(1 + nu)
    return lead * _pochhammer_sum(nu, u)


def bessel_J(order: float, u: float) -> float:
    """J_order(u), real order, u > 0. Closed forms at -1/2, 1/2, 3/2."""
    if u <= 0:
        raise ValueError("u must be positive")
    if order == 0.5:
        return math.sqrt(2 / (math.pi * u)) * math.sin(u)
    if order == -0.5:
        return math.sqrt(2 / (math.pi * u)) * math.cos(u)
    if order == 1.5:
        return math.sqrt(2 / (math.pi * u)) * (math.sin(u) / u - math.cos(u))
    if u > REAL_ORDER_U_MAX:
        raise RegimeError(f"J series regime is u <= {REAL_ORDER_U_MAX}, got {u}")
    if order < -0.5 and order != int(order):
        raise RegimeError(f"order {order} below -1/2")
    return bessel_J_series(order, u).real


def bessel_I(order: float, u: float) -> float:
    """I_order(u) for order 1/2 or 3/2, u > 0."""
    if u <= 0:
        raise ValueError("u must be positive")
    if order == 0.5:
        if u < 1e-4:
            # sinh(u)/sqrt(u) without cancellation
            return math.sqrt(2 / math.pi) * math.sqrt(u) * (1 + u * u / 6)
        return math.sqrt(2 / (math.pi * u)) * math.sinh(u)
    if order == 1.5:
        if u < 1e-2:
            # cosh u - sinh u / u = u^2/3 + u^4/30 + ...
            return math.sqrt(2 / (math.pi * u)) * (u * u / 3 + u ** 4 / 30 + u ** 6 / 840)
        return math.sqrt(2 / (math.pi * u)) * (math.cosh(u) - math.sinh(u) / u)
    raise ValueError(f"unsupported I order {order}")


def _check_imag_regime(r: float, u: float) -> None:
    if abs(r) > IMAG_ORDER_R_MAX or not 0 < u <= IMAG_ORDER_U_MAX:
        raise RegimeError(f"imaginary-order regime is |r| <= 4, 0 < u <= 20; got r={r}, u={u}")


def bessel_J_imag_order(r: float, u: float) -> complex:
    """J_{2ir}(u)."""
    _check_imag_regime(r, u)
    return bessel_J_series(2j * r, u)


def F_imag(r: float, u: float) -> float:
    """F_{2ir}(u) = Re J_{2ir}(u) / cosh(pi r)."""
    return bessel_J_imag_order(r, u).real / math.cosh(math.pi * r)


_R_SMALL = 1e-7


def G_imag(r: float, u: float) -> float:
    """G_{2ir}(u) = Im J_{2ir}(u) / sinh(pi r); even in r."""
    if abs(r) < _R_SMALL:
        r = _R_SMALL  # the removable singularity at r = 0 is O(r^2)-flat
    return bessel_J_imag_order(r, u).imag / math.sinh(math.pi * r)


def xi_k(k: float, r: float) -> complex:
    """2 i pi^2 e^{(1+k) pi i/2} / (Gamma(1/2 - k/2 + ir) Gamma(1/2 - k/2 - ir))."""
    s = 0.5 - k / 2
    return (2j * math.pi ** 2 * cmath.exp(0.5j * (1 + k) * math.pi)
            * rgamma(complex(s, r)) * rgamma(complex(s, -r)))
