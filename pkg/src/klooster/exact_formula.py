"""Rademacher-type exact formula for the coefficients G(n) of the sixth-order
mock theta function gamma(q) = sum_n q^{n^2} (q;q)_n / (q^3;q^3)_n.

G(n) = Re[ 2 pi e(-1/8) (24n-1)^{-1/4}
           sum_{3 | c} S(0, n, c, nu)/c I_{1/2}(pi sqrt(24n-1)/(6c)) ]
with nu = (./3) conj(nu_eta) on Gamma_0(3).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import multipliers as mult
from .kloosterman import SumCache, _Neumaier, admissible_moduli, sums_table
from .multipliers import MultiplierSpec
from .special import bessel_I

NU = MultiplierSpec.mock_theta_gamma()
_E_MINUS_EIGHTH = cmath.exp(-0.25j * math.pi)


@dataclass(frozen=True)
class ExactFormulaResult:
    n: int
    cutoff: int
    value: float
    imag: float
    nearest_int: int
    distance: float
    last_decade_mass: float


def _check_tilde() -> None:
    # 24 n~ = 24 n - 1
    al = mult.alpha(NU).alpha
    if al * 24 != 1:
        raise AssertionError(f"alpha of {NU.fingerprint()} is {al}, expected 1/24")


def _weights(n: int, cs: np.ndarray) -> np.ndarray:
    z = math.pi * math.sqrt(24 * n - 1) / 6
    return np.array([bessel_I(0.5, z / c) / c for c in cs])


def _prefactor(n: int) -> complex:
    return 2 * math.pi * _E_MINUS_EIGHTH / (24 * n - 1) ** 0.25


def series_terms(ns: list[int], cutoff: int, workers: int = 1,
                 cache: SumCache | None = None, c_min: int = 1):
    """Per-modulus terms for every n: (moduli, terms[len(c), len(ns)])."""
    _check_tilde()
    cs = admissible_moduli(3, c_min, cutoff)
    vals, _ = sums_table(NU, [(0, n) for n in ns], cs, workers, cache)
    terms = np.empty_like(vals)
    for j, n in enumerate(ns):
        terms[:, j] = _prefactor(n) * vals[:, j] * _weights(n, cs)
    return cs, terms


def _summarize(n: int, cutoff: int, cs: np.ndarray, col: np.ndarray) -> ExactFormulaResult:
    re, im, last = _Neumaier(), _Neumaier(), _Neumaier()
    for c, t in zip(cs, col):
        re.add(t.real)
        im.add(t.imag)
        if c > cutoff / 10:
            last.add(t.real)
    value = re.s + re.c
    nearest = round(value)
    return ExactFormulaResult(n, cutoff, value, im.s + im.c, nearest,
                              abs(value - nearest), last.s + last.c)


def mock_theta_coefficients(ns: list[int], cutoff: int = 10_000, workers: int = 1,
                            cache: SumCache | None = None) -> list[ExactFormulaResult]:
    if cutoff < 3:
        raise ValueError("cutoff must be at least 3")
    if any(n < 1 for n in ns):
        raise ValueError("n must be positive")
    cs, terms = series_terms(ns, cutoff, workers, cache)
    return [_summarize(n, cutoff, cs, terms[:, j]) for j, n in enumerate(ns)]


def mock_theta_coefficient(n: int, cutoff: int = 10_000, workers: int = 1,
                           cache: SumCache | None = None) -> ExactFormulaResult:
    return mock_theta_coefficients([n], cutoff, workers, cache)[0]


def tail_R3(n: int, x_start: float, x_end: float, workers: int = 1,
            cache: SumCache | None = None) -> float:
    """Real part of the formula restricted to 3 | c in (x_start, x_end]."""
    if x_start >= x_end:
        return 0.0
    cs, terms = series_terms([n], int(math.floor(x_end)), workers, cache,
                             c_min=int(math.floor(x_start)) + 1)
    acc = _Neumaier()
    for t in terms[:, 0]:
        acc.add(t.real)
    return acc.s + acc.c


def qseries_oracle(n_max: int) -> list[int]:
    """G(0..n_max) from gamma(q) = sum_k q^{k^2} (q;q)_k / (q^3;q^3)_k."""
    N = n_max + 1
    total = [0] * N
    k = 0
    term = [0] * N
    term[0] = 1  # (q;q)_0 / (q^3;q^3)_0
    while k * k < N:
        for i in range(N - k * k):
            total[i + k * k] += term[i]
        k += 1
        # multiply by (1 - q^k)
        for i in range(N - 1, k - 1, -1):
            term[i] -= term[i - k]
        # divide by (1 - q^{3k})
        step = 3 * k
        for i in range(step, N):
            term[i] += term[i - step]
    return total
