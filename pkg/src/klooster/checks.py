"""Property checks shared by ``klooster verify`` and the acceptance tests.

Each check returns a :class:`CheckResult`; none of them raises on failure.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import multipliers as mult
from .arith import modinv
from .exact_formula import mock_theta_coefficients, qseries_oracle
from .kloosterman import (
    KloostermanQuery,
    SumCache,
    admissible_moduli,
    growth_fit,
    kloosterman_sum,
    partial_sums,
    sums_table,
)
from .multipliers import GammaElement, MultiplierSpec
from .special import LANDAU_C0, bessel_J, bessel_J_imag_order, bessel_J_series
from .testfunction import (
    build_phi,
    hat_quarter_main_term,
    phi_hat_quarter,
    phi_tilde,
    tilde_main_constant,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def random_gamma0(level: int, rng: random.Random, bound: int = 60) -> GammaElement:
    """A random element of Gamma_0(level); about one in ten has c = 0."""
    if rng.random() < 0.1:
        s = rng.choice((1, -1))
        return GammaElement(s, s * rng.randint(-bound, bound), 0, s)
    while True:
        c = level * rng.choice((1, -1)) * rng.randint(1, bound)
        d = rng.randint(-bound * level, bound * level)
        if math.gcd(c, d) == 1:
            break
    a = modinv(d, abs(c)) if abs(c) > 1 else 0
    b = (a * d - 1) // c
    k = rng.randint(-5, 5)  # left-multiply by T^k
    return GammaElement(a + k * c, b + k * d, c, d)


# --- 1 ----------------------------------------------------------------------

def multiplier_cross_formula(c_max: int = 200) -> CheckResult:
    def run():
        total = mismatch = displayed = 0
        for c in range(1, c_max + 1):
            for d in range(-c, c + 1):
                if math.gcd(c, d) != 1:
                    continue
                a = modinv(d, c) if c > 1 else 0
                b = (a * d - 1) // c
                for g in (GammaElement(a, b, c, d), GammaElement(a + c, b + d, c, d)):
                    total += 1
                    knopp = mult.eval_eta_knopp(g)
                    if mult.eval_eta_rademacher(g) != knopp:
                        mismatch += 1
                    if mult.eval_eta_rademacher_displayed(g) != knopp:
                        displayed += 1
        return mismatch == 0, (f"{mismatch} mismatches in {total} elements "
                               f"(displayed Dedekind variant: {displayed})")
    return _timed("1 multiplier cross-formula", run)


# --- 2 ----------------------------------------------------------------------

COCYCLE_SPECS = (
    MultiplierSpec.eta(1),
    MultiplierSpec.eta(1, conjugated=True),
    MultiplierSpec.theta(4),
    MultiplierSpec.mock_theta_gamma(),
)


def cocycle_consistency(pairs: int = 1000, tol: float = 1e-12, seed: int = 2024) -> CheckResult:
    def run():
        rng = random.Random(seed)
        worst = {}
        for nu in COCYCLE_SPECS:
            w = 0.0
            for _ in range(pairs):
                g1 = random_gamma0(nu.level, rng)
                g2 = random_gamma0(nu.level, rng)
                tau = complex(rng.uniform(-2, 2), rng.uniform(0.1, 2))
                w = max(w, mult.cocycle_residual(nu, g1, g2, tau))
            worst[nu.fingerprint()] = w
        ok = all(v < tol for v in worst.values())
        return ok, "max residual " + "; ".join(f"{k}: {v:.1e}" for k, v in worst.items())
    return _timed("2 cocycle consistency", run)


# --- 3 ----------------------------------------------------------------------

def conjugation_identity(c_max: int = 500, tol: float = 1e-9) -> CheckResult:
    def run():
        nu = MultiplierSpec.mock_theta_gamma()
        grid = [(m, n) for m in (0, 1, 5) for n in (0, 1, 5)]
        cs = admissible_moduli(nu.level, 1, c_max)
        lhs, _ = sums_table(nu, grid, cs)
        rhs, _ = sums_table(nu.conj(), [(1 - m, 1 - n) for m, n in grid], cs)
        rel = np.abs(np.conj(lhs) - rhs) / (1 + np.abs(lhs))
        worst = float(rel.max())
        return worst < tol, f"max relative deviation {worst:.1e} over {rel.size} sums"
    return _timed("3 conjugation identity", run)


# --- 4 ----------------------------------------------------------------------

CLASSICAL_PAIRS = ((0, 0), (1, 1), (1, -1), (2, 5), (-3, 7), (4, 0))


def brute_classical(m: int, n: int, c: int) -> tuple[complex, int]:
    """Two-loop sum over a, d mod c with a d = 1 mod c."""
    r = np.arange(c)
    A, D = np.meshgrid(r, r, indexing="ij")
    mask = (A * D) % c == 1 % c
    ph = ((m * A + n * D) % c)[mask] / c
    return complex(np.exp(2j * np.pi * ph).sum()), int(mask.sum())


def classical_reduction(c_max: int = 200, tol: float = 1e-10) -> CheckResult:
    def run():
        nu = MultiplierSpec.trivial(1)
        worst, bad_count, bad_phi = 0.0, 0, 0
        for c in range(1, c_max + 1):
            for m, n in CLASSICAL_PAIRS:
                v = kloosterman_sum(KloostermanQuery(m, n, nu, c))
                ref, cnt = brute_classical(m, n, c)
                worst = max(worst, abs(v.value - ref))
                bad_count += v.term_count != cnt
            phi = sum(1 for d in range(c) if math.gcd(d, c) == 1)
            if abs(kloosterman_sum(KloostermanQuery(0, 0, nu, c)).value - phi) > tol:
                bad_phi += 1
        ok = worst < tol and bad_count == 0 and bad_phi == 0
        return ok, (f"max |S - brute| {worst:.1e}, term-count mismatches {bad_count}, "
                    f"S(0,0,c) != phi(c) at {bad_phi} moduli")
    return _timed("4 classical reduction", run)


# --- 5 ----------------------------------------------------------------------

def exact_formula_integrality(n_max: int = 25, cutoff: int = 10_000, stable_cutoff: int = 20_000,
                              dist_tol: float = 1e-2, imag_tol: float = 1e-6, workers: int = 1,
                              cache: SumCache | None = None) -> CheckResult:
    def run():
        ns = list(range(1, n_max + 1))
        first = mock_theta_coefficients(ns, cutoff, workers, cache)
        second = mock_theta_coefficients(ns, stable_cutoff, workers, cache)
        oracle = qseries_oracle(n_max)
        far = [r.n for r in first if r.distance >= dist_tol]
        imag = max(abs(r.imag) / max(1.0, abs(r.value)) for r in first)
        moved = [r.n for r, s in zip(first, second) if r.nearest_int != s.nearest_int]
        q_bad = [r.n for r in first if r.nearest_int != oracle[r.n]]
        worst = max(first, key=lambda r: r.distance)
        ok = not far and imag < imag_tol and not moved
        detail = (f"max distance {worst.distance:.4f} (n={worst.n}); "
                  f"n with distance >= {dist_tol}: {far or 'none'}; max rel |Im| {imag:.1e}; "
                  f"rounding changed at X={stable_cutoff}: {moved or 'none'}; "
                  f"q-series disagreements: {q_bad or 'none'}")
        return ok, detail
    return _timed("5 exact formula integrality", run)


# --- 6 ----------------------------------------------------------------------

TRANSFORM_A = 4 * math.pi


def transform_constants(a: float = TRANSFORM_A, tol: float = 0.05) -> CheckResult:
    def run():
        parts, ok = [], True
        xa = 1e5
        tf = build_phi(a, xa * a)
        for k, const in ((0.5, 2 * (math.sqrt(2) - 1)), (1.5, 1 - 1 / math.sqrt(2))):
            main = hat_quarter_main_term(k, xa)
            ratio = (phi_hat_quarter(tf, k).value / main).real
            ok &= abs(ratio - 1) < tol
            parts.append(f"hat(i/4) k={k}: ratio {ratio:.4f} (constant {const:.4f})")
        xa = 1e4
        tf = build_phi(a, xa * a)
        for t in (0.05, 0.1):
            main = tilde_main_constant(t) * xa ** (2 * t)
            ratio = phi_tilde(tf, 1 - 2 * t).value.real / main
            ok &= abs(ratio - 1) < tol
            parts.append(f"tilde(1-2t) t={t}: ratio {ratio:.4f}")
        return ok, "; ".join(parts)
    return _timed("6 transform leading constants", run)


# --- 7 ----------------------------------------------------------------------

LANDAU_ORDERS = (0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0)


def bessel_layer() -> CheckResult:
    def run():
        us = np.linspace(0.01, 30, 3000)
        rel = 0.0
        for u in us:
            closed = math.sqrt(2 / (math.pi * u)) * math.sin(u)
            series = bessel_J_series(0.5, u).real
            rel = max(rel, abs(series - closed) / abs(closed))
        landau = 0.0
        for beta in LANDAU_ORDERS:
            for u in np.linspace(0.05, 50, 1000):
                landau = max(landau, abs(bessel_J(beta, u)) * u ** (1 / 3))
        rec, deriv = 0.0, 0.0
        h = 1e-5
        for nu_ in (0.75, 1.25, 2.5, 4.0):
            for u in (0.5, 3.0, 9.0, 17.0):
                jm, j0, jp = (bessel_J(nu_ + s, u) for s in (-1, 0, 1))
                rec = max(rec, abs(jm + jp - 2 * nu_ / u * j0))
                cd = (bessel_J(nu_, u + h) - bessel_J(nu_, u - h)) / (2 * h)
                deriv = max(deriv, abs(cd - (jm - jp) / 2))
        conj = 0.0
        for r in (0.1, 0.7, 1.5, 3.0, 4.0):
            for u in (0.2, 2.0, 8.0, 15.0, 20.0):
                conj = max(conj, abs(bessel_J_imag_order(r, u).conjugate()
                                     - bessel_J_imag_order(-r, u)))
        ok = rel < 1e-10 and landau <= LANDAU_C0 and rec < 1e-8 and deriv < 1e-8 and conj < 1e-12
        return ok, (f"J_1/2 rel err {rel:.1e}; max |J| u^(1/3) {landau:.4f} <= {LANDAU_C0}; "
                    f"recurrence {rec:.1e}; derivative {deriv:.1e}; conjugation {conj:.1e}")
    return _timed("7 Bessel layer", run)


# --- 8 ----------------------------------------------------------------------

def cancellation_growth(X_max: int = 100_000, X_min: int = 1000, bound: float = 0.45,
                        workers: int = 1, cache: SumCache | None = None) -> CheckResult:
    def run():
        series = partial_sums(MultiplierSpec.mock_theta_gamma(), 0, 1, X_max, workers, cache)
        slope, r2 = growth_fit(series, X_min)
        return slope < bound, f"growth exponent {slope:.3f} (r^2 {r2:.2f}) over [{X_min}, {X_max}]"
    return _timed("8 cancellation growth", run)


# --- suite ------------------------------------------------------------------

def run_all(workers: int = 1, cache: SumCache | None = None, quick: bool = False,
            report: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    """Every criterion; ``quick`` shrinks the two long sweeps."""
    jobs = [
        lambda: multiplier_cross_formula(),
        lambda: cocycle_consistency(),
        lambda: conjugation_identity(),
        lambda: classical_reduction(),
        lambda: exact_formula_integrality(
            cutoff=1000 if quick else 10_000, stable_cutoff=2000 if quick else 20_000,
            workers=workers, cache=cache),
        lambda: transform_constants(),
        lambda: bessel_layer(),
        lambda: cancellation_growth(X_max=16_000 if quick else 100_000,
                                    workers=workers, cache=cache),
    ]
    out = []
    for job in jobs:
        r = job()
        out.append(r)
        if report:
            report(r)
    return out


def format_table(results: list[CheckResult]) -> str:
    w = max(len(r.name) for r in results)
    rows = [f"{'check':<{w}}  result  seconds  detail"]
    for r in results:
        rows.append(f"{r.name:<{w}}  {'PASS' if r.passed else 'FAIL':<6}  {r.seconds:7.1f}  {r.detail}")
    return "\n".join(rows)


__all__ = [
    "CheckResult",
    "bessel_layer",
    "cancellation_growth",
    "classical_reduction",
    "cocycle_consistency",
    "conjugation_identity",
    "exact_formula_integrality",
    "format_table",
    "multiplier_cross_formula",
    "random_gamma0",
    "run_all",
    "transform_constants",
]
