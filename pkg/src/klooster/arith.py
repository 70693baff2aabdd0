"""Exact integer and rational kernels.

Everything here works on Python ints and :class:`fractions.Fraction`, so no
floating point enters until :meth:`Phase.value` is called.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

Rational = Fraction


def kronecker(a: int, b: int) -> int:
    """Extended Kronecker symbol (a/b), for any integers a and b.

    Conventions: (a/0) = 1 iff a = +-1, (a/-1) = -1 iff a < 0, and
    (a/2) = 0 for even a, otherwise +1 or -1 as a = +-1 or +-3 mod 8.
    """
    if b == 0:
        return 1 if a in (1, -1) else 0
    if a % 2 == 0 and b % 2 == 0:
        return 0
    sign = 1
    if b < 0:
        b = -b
        if a < 0:
            sign = -sign
    v = (b & -b).bit_length() - 1
    b >>= v
    if v % 2 and a % 8 in (3, 5):
        sign = -sign
    # b is now odd and positive: Jacobi symbol with a reduced mod b.
    a %= b
    while a:
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                sign = -sign
        a, b = b, a
        if a % 4 == 3 and b % 4 == 3:
            sign = -sign
        a %= b
    return sign if b == 1 else 0


def modinv(a: int, m: int) -> int:
    """Inverse of a modulo m in [0, m). Raises ValueError if gcd(a, m) != 1."""
    if m == 1:
        return 0
    return pow(a, -1, m)


def totient(n: int) -> int:
    result = n
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


def _check_coprime(d: int, c: int) -> None:
    if c <= 0:
        raise ValueError(f"modulus must be positive, got c={c}")
    if math.gcd(d, c) != 1:
        raise ValueError(f"Dedekind sum needs gcd(d, c) = 1, got d={d}, c={c}")


def dedekind_direct(d: int, c: int) -> Fraction:
    """Classical Dedekind sum s(d, c) = sum_{r mod c} ((r/c)) ((dr/c)), O(c)."""
    _check_coprime(d, c)
    # With gcd(d, c) = 1 neither r/c nor dr/c is an integer for 0 < r < c, so
    # ((r/c)) ((dr/c)) = (2r - c)(2(dr mod c) - c) / (4c^2).
    acc = sum((2 * r - c) * (2 * (d * r % c) - c) for r in range(1, c))
    return Fraction(acc, 4 * c * c)


def dedekind_displayed(d: int, c: int) -> Fraction:
    """The variant sum_{r=1}^{c-1} (r/c) (dr/c - floor(dr/c) - 1).

    It differs from :func:`dedekind_direct` by the d-independent amount
    -(c - 1)/4, so it only reproduces the eta multiplier when 8 | c - 1.
    Kept for the cross-check against Knopp's formula.
    """
    _check_coprime(d, c)
    # (r/c)(dr/c - floor(dr/c) - 1) = r (dr mod c)/c^2 - r/c
    acc = sum(r * (d * r % c) for r in range(1, c))
    return Fraction(acc, c * c) - Fraction(c - 1, 2)


def dedekind_fast(d: int, c: int) -> Fraction:
    """Classical Dedekind sum via reciprocity, O(log c) steps.

    Uses s(-d, c) = -s(d, c), periodicity in d, and
    s(d, c) + s(c, d) = -1/4 + (d/c + c/d + 1/(dc))/12 for coprime d, c > 0.
    """
    _check_coprime(d, c)
    sign = 1
    d %= c
    total = Fraction(0)
    while d != 0:
        # s(d, c) = -1/4 + (d/c + c/d + 1/(dc))/12 - s(c mod d, d)
        total += sign * (Fraction(-1, 4) + Fraction(d * d + c * c + 1, 12 * d * c))
        sign = -sign
        c, d = d, c % d
    # c == 1 here and s(0, 1) = 0.
    return total


@dataclass(frozen=True, order=True)
class Phase:
    """The unit complex number e(q) = exp(2 pi i q), stored as q mod 1."""

    q: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        q = Fraction(self.q)
        object.__setattr__(self, "q", q - math.floor(q))

    @classmethod
    def of(cls, x: int | Fraction | str) -> "Phase":
        return cls(Fraction(x))

    def __mul__(self, other: "Phase") -> "Phase":
        return Phase(self.q + other.q)

    def __truediv__(self, other: "Phase") -> "Phase":
        return Phase(self.q - other.q)

    def __pow__(self, k: int) -> "Phase":
        return Phase(self.q * k)

    def conj(self) -> "Phase":
        return Phase(-self.q)

    @property
    def denominator(self) -> int:
        return self.q.denominator

    def value(self) -> complex:
        # Exact for the eighth roots of unity, which show up constantly.
        q8 = self.q * 8
        if q8.denominator == 1:
            return _EIGHTH_ROOTS[int(q8)]
        return cmath.exp(2j * math.pi * float(self.q))

    def __repr__(self) -> str:
        return f"e({self.q})"


_R = math.sqrt(0.5)
_EIGHTH_ROOTS = (1 + 0j, complex(_R, _R), 1j, complex(-_R, _R),
                 -1 + 0j, complex(-_R, -_R), -1j, complex(_R, -_R))

ONE = Phase()


def sign_phase(s: int) -> Phase:
    """Phase of +1 or -1."""
    if s == 1:
        return ONE
    if s == -1:
        return Phase(Fraction(1, 2))
    raise ValueError(f"not a unit sign: {s}")


def epsilon(d: int) -> Phase:
    """epsilon_d: 1 when d = 1 mod 4, i when d = 3 mod 4 (d odd)."""
    if d % 2 == 0:
        raise ValueError(f"epsilon_d needs odd d, got {d}")
    return ONE if d % 4 == 1 else Phase(Fraction(1, 4))
