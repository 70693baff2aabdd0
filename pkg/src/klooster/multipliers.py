"""Multiplier systems on Gamma_0(N): eta, theta, trivial, with character twists
and conjugation.

All values are exact :class:`~klooster.arith.Phase` objects. The eta
multiplier has two independent implementations (Rademacher's Dedekind-sum
formula and Knopp's closed formula) that must agree.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .arith import (
    ONE,
    Phase,
    dedekind_displayed,
    dedekind_fast,
    epsilon,
    kronecker,
    sign_phase,
)


@dataclass(frozen=True)
class GammaElement:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self} is not 1")

    def __matmul__(self, other: "GammaElement") -> "GammaElement":
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return GammaElement(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def __neg__(self) -> "GammaElement":
        return GammaElement(-self.a, -self.b, -self.c, -self.d)

    def act(self, tau: complex) -> complex:
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    @classmethod
    def from_cd(cls, c: int, d: int, a: int | None = None) -> "GammaElement":
        """Complete a bottom row (c, d) with gcd 1; a defaults to d^-1 mod c."""
        if math.gcd(c, d) != 1:
            raise ValueError(f"bottom row ({c}, {d}) is not primitive")
        if a is None:
            a = pow(d, -1, abs(c)) if abs(c) > 1 else (1 if c == 0 else 0)
            if c == 0:
                a = d  # d = +-1
        num = a * d - 1
        if c == 0:
            if num != 0:
                raise ValueError("c = 0 needs a*d = 1")
            return cls(a, 0, 0, d)
        if num % c:
            raise ValueError(f"a={a} is not an inverse of d={d} mod c={c}")
        return cls(a, num // c, c, d)


T = GammaElement(1, 1, 0, 1)
S = GammaElement(0, -1, 1, 0)
I2 = GammaElement(1, 0, 0, 1)
MINUS_I = GammaElement(-1, 0, 0, -1)


class Base(str, Enum):
    ETA = "eta"
    THETA = "theta"
    TRIVIAL = "trivial"


def fundamental_twist(D: int) -> int:
    """Normalise a twist parameter to a fundamental discriminant.

    An odd |D| names the character (./|D|): the fundamental discriminant is
    whichever of +-|D| is 1 mod 4. Even values are taken as given.
    """
    if D in (0, 1):
        return 1
    if D % 2:
        return abs(D) if abs(D) % 4 == 1 else -abs(D)
    return D


def is_fundamental_discriminant(D: int) -> bool:
    if D == 1:
        return True
    if D % 4 == 1:
        return _squarefree(abs(D))
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(abs(m))
    return False


def _squarefree(n: int) -> bool:
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


@dataclass(frozen=True)
class MultiplierSpec:
    """Descriptor of chi_D * nu_base, optionally conjugated.

    ``twist`` is the fundamental discriminant D of the character
    d -> kronecker(D, d) (1 means no twist). ``weight`` is metadata: it is
    used for nu(-I) bookkeeping in checks, never inside the formulas.
    """

    base: Base = Base.ETA
    twist: int = 1
    conjugated: bool = False
    weight: Fraction = Fraction(1, 2)
    level: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", Base(self.base))
        object.__setattr__(self, "weight", Fraction(self.weight))
        if self.level < 1:
            raise ValueError("level must be positive")
        if self.base is Base.THETA and self.level % 4:
            raise ValueError("theta multiplier needs 4 | level")
        if self.base is Base.TRIVIAL:
            if self.weight != 0:
                raise ValueError("trivial multiplier has weight 0")
        elif self.weight not in {Fraction(s, 2) for s in (-3, -1, 1, 3)}:
            raise ValueError(f"unsupported weight {self.weight}")
        if not is_fundamental_discriminant(self.twist):
            raise ValueError(f"twist {self.twist} is not a fundamental discriminant")
        if self.twist != 1 and self.level % abs(self.twist):
            # chi_D must be a character mod the level, otherwise S(m,n,c,nu)
            # depends on the representative d mod c.
            raise ValueError(f"twist {self.twist} is not periodic modulo level {self.level}")

    @classmethod
    def eta(cls, level: int = 1, twist: int = 1, conjugated: bool = False) -> "MultiplierSpec":
        w = Fraction(-1, 2) if conjugated else Fraction(1, 2)
        return cls(Base.ETA, fundamental_twist(twist), conjugated, w, level)

    @classmethod
    def theta(cls, level: int = 4, twist: int = 1, conjugated: bool = False) -> "MultiplierSpec":
        w = Fraction(-1, 2) if conjugated else Fraction(1, 2)
        return cls(Base.THETA, fundamental_twist(twist), conjugated, w, level)

    @classmethod
    def trivial(cls, level: int = 1) -> "MultiplierSpec":
        return cls(Base.TRIVIAL, 1, False, Fraction(0), level)

    @classmethod
    def mock_theta_gamma(cls) -> "MultiplierSpec":
        """(./3) times conj(nu_eta) on Gamma_0(3), the multiplier of G(n)."""
        return cls.eta(level=3, twist=-3, conjugated=True)

    def conj(self) -> "MultiplierSpec":
        return MultiplierSpec(self.base, self.twist, not self.conjugated, -self.weight, self.level)

    def fingerprint(self) -> str:
        return (f"{self.base.value},conj={int(self.conjugated)},twist={self.twist},"
                f"k={self.weight},N={self.level}")

    @classmethod
    def from_fingerprint(cls, fp: str) -> "MultiplierSpec":
        base, *rest = fp.split(",")
        kv = dict(item.split("=", 1) for item in rest)
        return cls(Base(base), int(kv["twist"]), kv["conj"] == "1",
                   Fraction(kv["k"]), int(kv["N"]))


# --- eta multiplier ---------------------------------------------------------

def _require_positive_c(g: GammaElement) -> None:
    if g.c <= 0:
        raise ValueError(f"formula needs c > 0, got c={g.c}; normalise first")


def eval_eta_rademacher(g: GammaElement, dedekind=dedekind_fast) -> Phase:
    """nu_eta(g) = e(-1/8) e(-s(d,c)/2) e((a+d)/(24c)) for c > 0."""
    _require_positive_c(g)
    s = dedekind(g.d, g.c)
    return Phase(Fraction(-1, 8) - s / 2 + Fraction(g.a + g.d, 24 * g.c))


def eval_eta_rademacher_displayed(g: GammaElement) -> Phase:
    return eval_eta_rademacher(g, dedekind=dedekind_displayed)


def eval_eta_knopp(g: GammaElement) -> Phase:
    """Knopp's closed form for nu_eta(g), c > 0: a 24th root of unity."""
    _require_positive_c(g)
    a, b, c, d = g.a, g.b, g.c, g.d
    if c % 2:
        sym = kronecker(d, c)
        num = (a + d) * c - b * d * (c * c - 1) - 3 * c
    else:
        sym = kronecker(c, d)
        num = (a + d) * c - b * d * (c * c - 1) + 3 * d - 3 - 3 * c * d
    return sign_phase(sym) * Phase(Fraction(num % 24, 24))


# nu_eta(-I) = e^{-pi i/2}; nu_eta(-g) = i nu_eta(g) for c > 0.
_ETA_MINUS_I = Phase(Fraction(3, 4))
_QUARTER = Phase(Fraction(1, 4))


def eval_eta(g: GammaElement, formula=eval_eta_knopp) -> Phase:
    """nu_eta on all of SL2(Z), normalising c <= 0 first."""
    if g.c > 0:
        return formula(g)
    if g.c < 0:
        # nu(-h) = i nu(h) for h = -g with positive lower-left entry.
        return _QUARTER * formula(-g)
    # g = +-T^b
    if g.d == 1:
        return Phase(Fraction(g.b, 24))
    return _ETA_MINUS_I * Phase(Fraction(-g.b, 24))


# --- theta multiplier -------------------------------------------------------

def eval_theta(g: GammaElement) -> Phase:
    """nu_theta(g) = (c/d) epsilon_d^{-1} on Gamma_0(4)."""
    if g.c % 4:
        raise ValueError(f"{g} is not in Gamma_0(4)")
    return sign_phase(kronecker(g.c, g.d)) / epsilon(g.d)


# --- composite --------------------------------------------------------------

class ZeroCharacter(ValueError):
    """The twisting character vanishes at this element."""


def eval(nu: MultiplierSpec, g: GammaElement) -> Phase:  # noqa: A001
    if g.c % nu.level:
        raise ValueError(f"{g} is not in Gamma_0({nu.level})")
    if nu.base is Base.ETA:
        p = eval_eta(g)
    elif nu.base is Base.THETA:
        p = eval_theta(g)
    else:
        p = ONE
    if nu.conjugated:
        p = p.conj()
    if nu.twist != 1:
        chi = kronecker(nu.twist, g.d)
        if chi == 0:
            raise ZeroCharacter(f"kronecker({nu.twist}, {g.d}) = 0")
        p = p * sign_phase(chi)
    return p


@dataclass(frozen=True)
class AlphaData:
    alpha: Fraction
    _spec: MultiplierSpec = field(repr=False, compare=False)

    def tilde(self, n: int) -> Fraction:
        """n - alpha."""
        return n - self.alpha


def alpha(nu: MultiplierSpec) -> AlphaData:
    """alpha in [0, 1) with e(-alpha) = nu(T)."""
    a = eval(nu, T).conj().q
    return AlphaData(a, nu)


# --- cocycle ----------------------------------------------------------------

def _j(g: GammaElement, tau: complex) -> complex:
    z = g.c * tau + g.d
    return z / abs(z)


def _jpow(g: GammaElement, tau: complex, k: float) -> complex:
    # principal argument in (-pi, pi]
    z = g.c * tau + g.d
    arg = cmath.phase(z)
    if arg == -math.pi:
        arg = math.pi
    return cmath.exp(1j * k * arg)


def cocycle_w(g1: GammaElement, g2: GammaElement, k: float, tau: complex = 1j) -> complex:
    """w_k(g1, g2) = j(g2, tau)^k j(g1, g2 tau)^k j(g1 g2, tau)^-k."""
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    k = float(k)
    return (_jpow(g2, tau, k) * _jpow(g1, g2.act(tau), k)
            / _jpow(g1 @ g2, tau, k))


def cocycle_residual(nu: MultiplierSpec, g1: GammaElement, g2: GammaElement,
                     tau: complex = 1j) -> float:
    """|nu(g1 g2) - w_k(g1, g2) nu(g1) nu(g2)|."""
    lhs = eval(nu, g1 @ g2).value()
    rhs = cocycle_w(g1, g2, nu.weight, tau) * eval(nu, g1).value() * eval(nu, g2).value()
    return abs(lhs - rhs)
