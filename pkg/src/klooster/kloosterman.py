"""Generalized Kloosterman sums S(m, n, c, nu) and sweeps over c.

Two evaluation paths exist. :func:`kloosterman_terms` builds every term as an
exact :class:`~klooster.arith.Phase` through :mod:`klooster.multipliers`; it
is the reference. :func:`kloosterman_sum` and the sweeps use the compiled
kernel, which carries the same phases as integers over 24c.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernel
from . import multipliers as mult
from .arith import Phase, kronecker
from .multipliers import Base, GammaElement, MultiplierSpec
from .special import bessel_I, bessel_J

log = logging.getLogger(__name__)

_BASE_CODE = {Base.TRIVIAL: _kernel.BASE_TRIVIAL, Base.ETA: _kernel.BASE_ETA,
              Base.THETA: _kernel.BASE_THETA}


class CacheCorruptError(RuntimeError):
    def __init__(self, path: Path, lineno: int, line: str):
        super().__init__(f"{path}:{lineno}: malformed cache record {line!r}")
        self.path = path
        self.lineno = lineno


@dataclass(frozen=True)
class KloostermanQuery:
    m: int
    n: int
    nu: MultiplierSpec
    c: int

    def __post_init__(self) -> None:
        if self.c < 1:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.c % self.nu.level:
            raise ValueError(f"level {self.nu.level} does not divide c={self.c}")


@dataclass(frozen=True)
class KloostermanValue:
    value: complex
    term_count: int
    max_phase_den: int
    skipped: int = 0
    phases: tuple[Phase, ...] | None = field(default=None, repr=False)


def _alpha24(nu: MultiplierSpec) -> int:
    a = mult.alpha(nu).alpha * 24
    if a.denominator != 1:
        raise ValueError(f"alpha of {nu.fingerprint()} is not in (1/24)Z")
    return int(a)


def kloosterman_terms(q: KloostermanQuery) -> KloostermanValue:
    """Reference evaluation with exact rational phases for every term."""
    nu, c = q.nu, q.c
    al = mult.alpha(nu)
    mt, nt = al.tilde(q.m), al.tilde(q.n)
    phases = []
    skipped = 0
    for d in range(c):
        if math.gcd(d, c) != 1:
            continue
        a = pow(d, -1, c) if c > 1 else 0
        g = GammaElement(a, (a * d - 1) // c, c, d)
        try:
            nu_g = mult.eval(nu, g)
        except mult.ZeroCharacter:
            skipped += 1
            continue
        phases.append(nu_g.conj() * Phase(Fraction(mt * a + nt * d, c)))
    value = complex(math.fsum(p.value().real for p in phases),
                    math.fsum(p.value().imag for p in phases))
    max_den = max((p.denominator for p in phases), default=1)
    return KloostermanValue(value, len(phases), max_den, skipped, tuple(phases))


def _pair_arrays(nu: MultiplierSpec, pairs: Sequence[tuple[int, int]]):
    a24 = _alpha24(nu)
    ms = np.array([24 * m - a24 for m, _ in pairs], dtype=np.int64)
    ns = np.array([24 * n - a24 for _, n in pairs], dtype=np.int64)
    return ms, ns


def _twist_table(D: int) -> np.ndarray:
    # kronecker(D, d) depends only on d mod |D| for fundamental D
    D = int(D)
    if D == 1:
        return np.ones(1, dtype=np.int8)
    return np.array([kronecker(D, r) for r in range(abs(D))], dtype=np.int8)


def _kernel_args(nu: MultiplierSpec):
    return _BASE_CODE[nu.base], bool(nu.conjugated), _twist_table(nu.twist)


def kloosterman_sum(q: KloostermanQuery) -> KloostermanValue:
    """S(m, n, c, nu) through the compiled kernel."""
    ms, ns = _pair_arrays(q.nu, [(q.m, q.n)])
    re = np.empty(1)
    im = np.empty(1)
    count, skipped = _kernel.sums_for_c(q.c, *_kernel_args(q.nu), ms, ns, re, im)
    # Phases live in (1/24c)Z; the exact maximum needs the per-term numerators,
    # so report the common denominator bound here.
    return KloostermanValue(complex(re[0], im[0]), int(count), 24 * q.c, int(skipped))


def admissible_moduli(level: int, c_min: int, c_max: int) -> np.ndarray:
    """Multiples of level in [c_min, c_max]."""
    first = max(level, -(-c_min // level) * level)
    if first > c_max:
        return np.empty(0, dtype=np.int64)
    return np.arange(first, c_max + 1, level, dtype=np.int64)


# --- cache ------------------------------------------------------------------

class SumCache:
    """Append-only text cache, one record per line:
    ``fingerprint,m,n,c,re,im,term_count``.

    The fingerprint itself contains commas, so records are parsed from the
    right.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._data: dict[tuple[str, int, int, int], tuple[float, float, int]] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with self.path.open() as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    fp, m, n, c, re, im, cnt = line.rsplit(",", 6)
                    MultiplierSpec.from_fingerprint(fp)
                    self._data[(fp, int(m), int(n), int(c))] = (float(re), float(im), int(cnt))
                except (ValueError, KeyError) as exc:
                    raise CacheCorruptError(self.path, lineno, line) from exc

    def get(self, fp: str, m: int, n: int, c: int):
        return self._data.get((fp, m, n, c))

    def put_many(self, records: Iterable[tuple[str, int, int, int, float, float, int]]) -> None:
        lines = []
        for fp, m, n, c, re, im, cnt in records:
            key = (fp, m, n, c)
            if key in self._data:
                continue
            self._data[key] = (re, im, cnt)
            lines.append(f"{fp},{m},{n},{c},{re:.17g},{im:.17g},{cnt}\n")
        if lines:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a") as fh:
                fh.writelines(lines)

    def __len__(self) -> int:
        return len(self._data)


def default_cache_path() -> Path | None:
    d = os.environ.get("KLOOSTER_CACHE_DIR")
    return Path(d) / "sums.csv" if d else None


# --- sweeps -----------------------------------------------------------------

def _compute(cs: np.ndarray, nu: MultiplierSpec, pairs, workers: int):
    ms, ns = _pair_arrays(nu, pairs)
    out_re = np.zeros((len(cs), len(pairs)))
    out_im = np.zeros((len(cs), len(pairs)))
    counts = np.zeros(len(cs), dtype=np.int64)
    skipped = np.zeros(len(cs), dtype=np.int64)
    args = _kernel_args(nu)
    if len(cs) == 0:
        return out_re, out_im, counts, skipped
    workers = max(1, min(workers, len(cs)))
    if workers == 1:
        _kernel.sweep(cs, *args, ms, ns, out_re, out_im, counts, skipped)
    else:
        # interleaved chunks balance the O(c) cost; each row is written by one thread
        idx = [np.arange(i, len(cs), workers) for i in range(workers)]

        def run(ix):
            r = np.zeros((len(ix), len(pairs)))
            i_ = np.zeros((len(ix), len(pairs)))
            cn = np.zeros(len(ix), dtype=np.int64)
            sk = np.zeros(len(ix), dtype=np.int64)
            _kernel.sweep(cs[ix], *args, ms, ns, r, i_, cn, sk)
            return ix, r, i_, cn, sk

        with ThreadPoolExecutor(workers) as pool:
            for ix, r, i_, cn, sk in pool.map(run, idx):
                out_re[ix], out_im[ix], counts[ix], skipped[ix] = r, i_, cn, sk
    return out_re, out_im, counts, skipped


def sums_table(nu: MultiplierSpec, pairs: Sequence[tuple[int, int]], cs: np.ndarray,
               workers: int = 1, cache: SumCache | None = None):
    """S(m, n, c, nu) for every c in cs and every (m, n) in pairs.

    Returns (values[len(cs), len(pairs)] complex, term_counts[len(cs)]).
    Cached entries are reused; missing ones are computed and appended.
    """
    cs = np.asarray(cs, dtype=np.int64)
    pairs = list(pairs)
    values = np.zeros((len(cs), len(pairs)), dtype=complex)
    counts = np.zeros(len(cs), dtype=np.int64)
    fp = nu.fingerprint()
    todo = []
    for i, c in enumerate(cs):
        hit = None
        if cache is not None:
            recs = [cache.get(fp, m, n, int(c)) for m, n in pairs]
            if all(r is not None for r in recs):
                hit = recs
        if hit is None:
            todo.append(i)
        else:
            values[i] = [complex(r[0], r[1]) for r in hit]
            counts[i] = hit[0][2]
    if todo:
        tix = np.array(todo, dtype=np.int64)
        log.info("computing %d of %d moduli for %s", len(tix), len(cs), fp)
        re, im, cn, _ = _compute(cs[tix], nu, pairs, workers)
        values[tix] = re + 1j * im
        counts[tix] = cn
        if cache is not None:
            cache.put_many(
                (fp, m, n, int(cs[i]), float(re[k, j]), float(im[k, j]), int(cn[k]))
                for k, i in enumerate(tix) for j, (m, n) in enumerate(pairs))
    return values, counts


class _Neumaier:
    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x: float) -> float:
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t
        return t + self.c


@dataclass
class PartialSumSeries:
    nu: MultiplierSpec
    m: int
    n: int
    c: np.ndarray          # admissible moduli, ascending
    s: np.ndarray          # S(m, n, c, nu)
    running: np.ndarray    # sum_{c' <= c} S/c'

    def __len__(self) -> int:
        return len(self.c)

    def at(self, X: float) -> complex:
        """Running sum over all admissible c <= X."""
        i = np.searchsorted(self.c, X, side="right")
        return complex(self.running[i - 1]) if i else 0j

    def sample_points(self, sample: str = "all", step: int | None = None) -> np.ndarray:
        """Row indices for ``all``, ``dyadic`` (last c <= level * 2^j), or ``grid``
        (last c <= k * step); the final row is always included."""
        if sample == "all" or len(self.c) == 0:
            return np.arange(len(self.c))
        if sample == "dyadic":
            xs = []
            X = self.nu.level
            while X <= self.c[-1]:
                xs.append(X)
                X *= 2
            targets = np.array(xs)
        elif sample == "grid":
            if not step or step < 1:
                raise ValueError("grid sampling needs a positive step")
            targets = np.arange(step, self.c[-1] + 1, step)
        else:
            raise ValueError(f"unknown sample kind {sample!r}")
        ix = np.searchsorted(self.c, targets, side="right") - 1
        # the last row always closes the sample
        return np.unique(np.append(ix[ix >= 0], len(self.c) - 1))


def running_sums(cs: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Compensated prefix sums of s/c in ascending order of c."""
    re, im = _Neumaier(), _Neumaier()
    out = np.empty(len(cs), dtype=complex)
    for i, (c, v) in enumerate(zip(cs, s)):
        q = v / c
        out[i] = complex(re.add(q.real), im.add(q.imag))
    return out


def partial_sums(nu: MultiplierSpec, m: int, n: int, X_max: int, workers: int = 1,
                 cache: SumCache | None = None) -> PartialSumSeries:
    """All S(m, n, c, nu)/c partial sums for level | c <= X_max."""
    cs = admissible_moduli(nu.level, 1, X_max)
    vals, _ = sums_table(nu, [(m, n)], cs, workers, cache)
    s = vals[:, 0] if len(cs) else np.zeros(0, dtype=complex)
    return PartialSumSeries(nu, m, n, cs, s, running_sums(cs, s))


@dataclass(frozen=True)
class WindowResult:
    total: float
    ratio: float
    count: int


def windowed_average(nu: MultiplierSpec, m: int, n: int, y: float, x: float,
                     workers: int = 1, cache: SumCache | None = None) -> WindowResult:
    """sum_{level | c in [y, x]} |S(m,n,c,nu)|/c, and its ratio to sqrt(x) - sqrt(y)."""
    if not 0 < y < x:
        raise ValueError("need 0 < y < x")
    if x - y < x ** (2 / 3):
        raise ValueError(f"window [{y}, {x}] narrower than x^(2/3)")
    cs = admissible_moduli(nu.level, math.ceil(y), math.floor(x))
    vals, _ = sums_table(nu, [(m, n)], cs, workers, cache)
    total = math.fsum(abs(v) / c for v, c in zip(vals[:, 0], cs))
    return WindowResult(total, total / (math.sqrt(x) - math.sqrt(y)), len(cs))


@dataclass(frozen=True)
class BesselTailResult:
    value: complex
    c_start: int
    c_max: int
    terms: int
    last_decade: complex


def bessel_tail(nu: MultiplierSpec, m: int, n: int, alpha: float, kind: str = "J",
                beta: Fraction | float = Fraction(1, 2), c_max: int = 10_000,
                workers: int = 1, cache: SumCache | None = None) -> BesselTailResult:
    """Truncated sum_{level | alpha sqrt|m~ n~| < c <= c_max} S/c B_beta(4 pi sqrt|m~ n~|/c)."""
    beta = Fraction(beta)
    if beta not in (Fraction(1, 2), Fraction(3, 2)):
        raise ValueError(f"beta must be 1/2 or 3/2, got {beta}")
    if kind not in ("I", "J"):
        raise ValueError(f"kind must be I or J, got {kind!r}")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    al = mult.alpha(nu)
    mn = abs(al.tilde(m) * al.tilde(n))
    root = math.sqrt(mn)
    c_start = math.floor(alpha * root) + 1
    cs = admissible_moduli(nu.level, c_start, c_max)
    if len(cs) == 0:
        return BesselTailResult(0j, c_start, c_max, 0, 0j)
    vals, _ = sums_table(nu, [(m, n)], cs, workers, cache)
    fn = bessel_J if kind == "J" else bessel_I
    re, im = _Neumaier(), _Neumaier()
    lre, lim = _Neumaier(), _Neumaier()
    for c, v in zip(cs, vals[:, 0]):
        t = v / c * fn(float(beta), 4 * math.pi * root / c)
        re.add(t.real)
        im.add(t.imag)
        if c > c_max / 10:
            lre.add(t.real)
            lim.add(t.imag)
    return BesselTailResult(complex(re.s + re.c, im.s + im.c), c_start, c_max, len(cs),
                            complex(lre.s + lre.c, lim.s + lim.c))


def dyadic_points(X_min: float, X_max: float) -> list[float]:
    xs = []
    X = X_min
    while X <= X_max * (1 + 1e-12):
        xs.append(X)
        X *= 2
    return xs


def growth_fit(series: PartialSumSeries | Sequence[tuple[float, complex]],
               X_min: float) -> tuple[float, float]:
    """Least-squares slope of log|running sum| against log X at dyadic X >= X_min.

    Accepts a series or explicit (X, value) samples. Returns (exponent, r^2).
    """
    if isinstance(series, PartialSumSeries):
        if len(series) == 0:
            raise ValueError("empty series")
        pts = [(X, series.at(X)) for X in dyadic_points(X_min, float(series.c[-1]))]
    else:
        pts = [(X, v) for X, v in series if X >= X_min]
    if len(pts) < 4:
        raise ValueError(f"growth fit needs >= 4 dyadic points, got {len(pts)}")
    lx = np.log([p[0] for p in pts])
    ly = np.log([max(abs(p[1]), 1e-300) for p in pts])
    slope, icept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2
