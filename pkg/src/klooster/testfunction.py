"""The compactly supported weight phi_{a,x,T} and its Bessel transforms.

phi vanishes outside [a/(2x+2T), a/(x-T)] and equals 1 on [a/(2x), a/x].
The ``linear`` profile uses straight ramps. The ``smooth`` profile keeps the
ramp slope exactly on the middle of each ramp and blends into it over the
sub-windows set by T' = T x^-delta. The blend is a degree-8 polynomial
derivative profile, so phi is C^4.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from .special import (
    F_imag,
    G_imag,
    IMAG_ORDER_U_MAX,
    RegimeError,
    bessel_J,
    bessel_J_series,
    cgamma,
    rgamma,
    xi_k,
)

DEFAULT_DELTA = 1 / 3

# Blend profile g on [0, 1]: g(0) = 0, g(1) = 1, g', g'', g''' vanish at both
# ends and the integral is 1, so the ramp keeps the area of the linear one.
_SMOOTHSTEP7 = Polynomial([0, 0, 0, 0, 35, -84, 70, -20])
_BUMP = Polynomial([0, 0, 0, 0, 1, -4, 6, -4, 1])          # t^4 (1-t)^4, area 1/630
_BLEND = _SMOOTHSTEP7 + 315 * _BUMP
_BLEND_INT = _BLEND.integ()


@dataclass(frozen=True)
class TestFunction:
    a: float
    x: float
    T: float
    delta: float = DEFAULT_DELTA
    profile: str = "smooth"
    knots: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        a, x, T, d = self.a, self.x, self.T, self.delta
        if not (a > 0 and x > 0 and 0 < T <= x / 3):
            raise ValueError(f"need a > 0, x > 0, 0 < T <= x/3; got a={a}, x={x}, T={T}")
        if not 0 < d < 0.5:
            raise ValueError(f"delta must lie in (0, 1/2), got {d}")
        if self.profile not in ("linear", "smooth"):
            raise ValueError(f"unknown profile {self.profile!r}")
        Tp = self.Tprime
        if self.profile == "smooth" and not 2 * Tp < T:
            raise ValueError("smooth profile needs T' < T/2 (x^delta > 2)")
        if self.profile == "linear":
            knots = (a / (2 * x + 2 * T), a / (2 * x), a / x, a / (x - T))
        else:
            knots = (a / (2 * x + 2 * T), a / (2 * x + 2 * T - 2 * Tp), a / (2 * x + 2 * Tp),
                     a / (2 * x), a / x, a / (x - Tp), a / (x - T + Tp), a / (x - T))
        object.__setattr__(self, "knots", knots)

    __test__ = False  # not a pytest class

    @property
    def Tprime(self) -> float:
        return self.T * self.x ** (-self.delta)

    @property
    def support(self) -> tuple[float, float]:
        return self.knots[0], self.knots[-1]

    @property
    def plateau(self) -> tuple[float, float]:
        return self.a / (2 * self.x), self.a / self.x

    @property
    def rise_slope(self) -> float:
        return 2 * self.x * (self.x + self.T) / (self.a * self.T)

    @property
    def fall_slope(self) -> float:
        return -self.x * (self.x - self.T) / (self.a * self.T)

    def __call__(self, u: float) -> float:
        k = self.knots
        if u <= k[0] or u >= k[-1]:
            return 0.0
        p0, p3 = self.plateau
        if p0 <= u <= p3:
            return 1.0
        if self.profile == "linear":
            if u < p0:
                return (u - k[0]) / (p0 - k[0])
            return (k[3] - u) / (k[3] - k[2])
        if u < p0:
            v = self._ramp(u, k[0], k[1], k[2], k[3], self.rise_slope)
        else:
            v = 1.0 - self._ramp(u, k[4], k[5], k[6], k[7], -self.fall_slope)
        return min(1.0, max(0.0, v))  # rounding at the ramp ends

    @staticmethod
    def _ramp(u, q0, q1, q2, q3, s):
        # integral of the derivative profile from q0 to u
        if u <= q1:
            w = q1 - q0
            return s * w * _BLEND_INT((u - q0) / w)
        head = s * (q1 - q0)
        if u <= q2:
            return head + s * (u - q1)
        w = q3 - q2
        t = (u - q2) / w
        # mirrored blend: int_0^t g(1 - v) dv = 1 - G(1 - t)
        return head + s * (q2 - q1) + s * w * (1.0 - _BLEND_INT(1.0 - t))

    def derivative(self, u: float) -> float:
        k = self.knots
        if u <= k[0] or u >= k[-1]:
            return 0.0
        p0, p3 = self.plateau
        if p0 <= u <= p3:
            return 0.0
        if self.profile == "linear":
            return self.rise_slope if u < p0 else self.fall_slope
        if u < p0:
            return self._dramp(u, k[0], k[1], k[2], k[3], self.rise_slope)
        return self._dramp(u, k[4], k[5], k[6], k[7], self.fall_slope)

    @staticmethod
    def _dramp(u, q0, q1, q2, q3, s):
        if u <= q1:
            return s * _BLEND((u - q0) / (q1 - q0))
        if u <= q2:
            return s
        return s * _BLEND(1.0 - (u - q2) / (q3 - q2))


def default_T(x: float, delta: float = DEFAULT_DELTA) -> float:
    """T = x^(1 - delta), capped at x/3."""
    return min(x / 3, x ** (1 - delta))


def build_phi(a: float, x: float, T: float | None = None, delta: float = DEFAULT_DELTA,
              profile: str = "smooth") -> TestFunction:
    if T is None:
        T = default_T(x, delta)
    return TestFunction(a, x, T, delta, profile)


# --- quadrature --------------------------------------------------------------

@dataclass(frozen=True)
class Quad:
    value: complex
    error: float


def _integrate(f: Callable[[float], complex], tf: TestFunction, complex_valued: bool,
               epsabs: float = 1e-13, epsrel: float = 1e-12) -> Quad:
    """Integrate f over supp(phi), piece by piece between knots."""
    vals_re, vals_im, err = [], [], 0.0
    for lo, hi in zip(tf.knots[:-1], tf.knots[1:]):
        if hi <= lo:
            continue
        pts = None
        if hi > 5:
            # split oscillatory pieces roughly every half period
            pts = list(np.arange(math.ceil(lo / math.pi) * math.pi, hi, math.pi)) or None
        lim = 200
        r, e = integrate.quad(lambda u: f(u).real, lo, hi, epsabs=epsabs, epsrel=epsrel,
                              limit=lim, points=pts)
        vals_re.append(r)
        err += e
        if complex_valued:
            r, e = integrate.quad(lambda u: f(u).imag, lo, hi, epsabs=epsabs, epsrel=epsrel,
                                  limit=lim, points=pts)
            vals_im.append(r)
            err += e
    return Quad(complex(math.fsum(vals_re), math.fsum(vals_im)), err)


def phi_tilde(tf: TestFunction, r: complex, tol: float = 1e-13) -> Quad:
    """int_0^oo J_{r-1}(u) phi(u) du/u. r may be complex."""
    order = complex(r) - 1
    if tf.support[1] > IMAG_ORDER_U_MAX and order.imag != 0:
        raise RegimeError("support of phi exceeds the Bessel series regime")
    if order.imag == 0:
        o = order.real
        return _integrate(lambda u: complex(bessel_J(o, u) * tf(u) / u), tf, False, tol)
    return _integrate(lambda u: bessel_J_series(order, u) * tf(u) / u, tf, True, tol)


def _check_hat(tf: TestFunction, k: float, r: float) -> None:
    if k not in (0.5, 1.5):
        raise ValueError(f"k must be 1/2 or 3/2, got {k}")
    if abs(r) > 4:
        raise RegimeError(f"|r| <= 4 required, got {r}")
    if tf.support[1] > IMAG_ORDER_U_MAX:
        raise RegimeError("support of phi exceeds u = 20")


def phi_hat(tf: TestFunction, k: float, r: float, tol: float = 1e-13) -> Quad:
    """phi-hat(r) through the F/G form:
    xi_k(r) ch(pi r)/ch(2 pi r) int (G cos(k pi/2) - F sin(k pi/2)) phi(u)/u du.
    """
    _check_hat(tf, k, r)
    ck, sk = math.cos(k * math.pi / 2), math.sin(k * math.pi / 2)
    q = _integrate(lambda u: complex((G_imag(r, u) * ck - F_imag(r, u) * sk) * tf(u) / u),
                   tf, False, tol)
    pref = xi_k(k, r) * math.cosh(math.pi * r) / math.cosh(2 * math.pi * r)
    return Quad(pref * q.value.real, abs(pref) * q.error)


def phi_hat_from_tilde(tf: TestFunction, k: float, r: float, tol: float = 1e-13) -> Quad:
    """phi-hat(r) rebuilt from the complex-order transforms phi-tilde(1 +- 2ir)."""
    _check_hat(tf, k, r)
    if r == 0:
        raise ValueError("r = 0 is a removable singularity of this form; use phi_hat")
    tp = phi_tilde(tf, complex(1, 2 * r), tol)
    tm = phi_tilde(tf, complex(1, -2 * r), tol)
    ck, sk = math.cos(k * math.pi / 2), math.sin(k * math.pi / 2)
    ch, sh = math.cosh(math.pi * r), math.sinh(math.pi * r)
    s = 0.5 - k / 2
    den = sh * (math.cosh(2 * math.pi * r) + math.cos(math.pi * k))
    pref = (math.pi ** 2 * cmath.exp(0.5j * (1 + k) * math.pi)
            * rgamma(complex(s, r)) * rgamma(complex(s, -r)) / den)
    body = ck * ch * (tp.value - tm.value) - 1j * sk * sh * (tp.value + tm.value)
    return Quad(pref * body, abs(pref) * (tp.error + tm.error) * (ch + sh))


def phi_hat_quarter(tf: TestFunction, k: float, tol: float = 1e-13) -> Quad:
    """phi-hat(i/4): e^{pi i/4} int cos(u) phi u^{-3/2} (k = 1/2) or
    (1/2) e^{3 pi i/4} int sin(u) phi u^{-3/2} (k = 3/2)."""
    if k == 0.5:
        trig, pref = math.cos, cmath.exp(0.25j * math.pi)
    elif k == 1.5:
        trig, pref = math.sin, 0.5 * cmath.exp(0.75j * math.pi)
    else:
        raise ValueError(f"k must be 1/2 or 3/2, got {k}")
    q = _integrate(lambda u: complex(trig(u) * tf(u) * u ** -1.5), tf, False, tol)
    return Quad(pref * q.value.real, abs(pref) * q.error)


# --- leading terms of the small-u asymptotics --------------------------------

def tilde_main_constant(t: float) -> float:
    """2^{2t}(2^{2t} - 1) / (2t Gamma(1 - 2t))."""
    return 2 ** (2 * t) * (2 ** (2 * t) - 1) / (2 * t * cgamma(1 - 2 * t).real)


def hat_quarter_main_term(k: float, x_over_a: float) -> complex:
    """2 e^{pi i/4}(sqrt2 - 1)(x/a)^{1/2} for k = 1/2;
    e^{3 pi i/4}(1 - 1/sqrt2)(a/x)^{1/2} for k = 3/2."""
    if k == 0.5:
        return 2 * cmath.exp(0.25j * math.pi) * (math.sqrt(2) - 1) * math.sqrt(x_over_a)
    if k == 1.5:
        return cmath.exp(0.75j * math.pi) * (1 - 1 / math.sqrt(2)) / math.sqrt(x_over_a)
    raise ValueError(f"k must be 1/2 or 3/2, got {k}")
