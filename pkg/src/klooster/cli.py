"""Command-line front end: ``klooster <command> [flags]``.

Settings resolve as flags > ``--config`` JSON file > defaults. The resolved
config is echoed into every JSON record and, for CSV output, into a sidecar
``<output>.json``. Exit codes: 0 success, 1 a verify check failed, 2 invalid
config, 3 numeric regime violation, 4 cache corruption. Errors are reported
as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import checks
from .exact_formula import mock_theta_coefficient
from .kloosterman import (
    CacheCorruptError,
    KloostermanQuery,
    PartialSumSeries,
    SumCache,
    bessel_tail,
    default_cache_path,
    kloosterman_sum,
    partial_sums,
    windowed_average,
)
from .multipliers import MultiplierSpec, fundamental_twist
from .special import RegimeError
from .testfunction import build_phi, phi_hat, phi_hat_quarter, phi_tilde

log = logging.getLogger("klooster")

COMMANDS = ("sum", "partial", "window", "tail", "exact", "phi", "verify")
CSV_HEADER = "c,s_re,s_im,run_re,run_im"

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_REGIME, EXIT_CACHE = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str = "verify"
    # multiplier
    base: str = "eta"
    twist: int = 1
    conjugate: bool = False
    weight: str | None = None
    level: int = 1
    # indices and ranges
    m: int = 0
    n: int = 1
    c: int | None = None
    xmax: int | None = None
    sample: str = "all"
    step: int | None = None
    y: float | None = None
    x: float | None = None
    alpha: float = 1.0
    kind: str = "J"
    beta: str = "1/2"
    cmax: int = 10_000
    cutoff: int = 10_000
    # test function
    a: float | None = None
    T: float | None = None
    delta: float = 1 / 3
    profile: str = "smooth"
    transform: str = "quarter"
    k: float = 0.5
    r: float = 0.0
    # plumbing
    output: str | None = None
    cache: str | None = None
    workers: int = 1
    quick: bool = False

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    # --- validation -----------------------------------------------------

    def multiplier(self) -> MultiplierSpec:
        try:
            twist = fundamental_twist(int(self.twist))
            if self.base == "eta":
                nu = MultiplierSpec.eta(self.level, twist, self.conjugate)
            elif self.base == "theta":
                nu = MultiplierSpec.theta(self.level, twist, self.conjugate)
            elif self.base == "trivial":
                if self.twist != 1 or self.conjugate:
                    raise ConfigError("trivial multiplier takes no twist or conjugation")
                nu = MultiplierSpec.trivial(self.level)
            else:
                raise ConfigError(f"unknown multiplier {self.base!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.weight is not None and Fraction(self.weight) != nu.weight:
            raise ConfigError(f"weight {self.weight} does not match {nu.fingerprint()}")
        return nu

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        cmd = self.command
        if cmd in ("sum", "partial", "window", "tail"):
            nu = self.multiplier()
        if cmd == "sum":
            _need(self, "c")
            if self.c < 1 or self.c % nu.level:
                raise ConfigError(f"c={self.c} must be a positive multiple of the level {nu.level}")
        elif cmd == "partial":
            _need(self, "xmax")
            if self.xmax < 1:
                raise ConfigError("xmax must be positive")
            if self.sample not in ("all", "dyadic", "grid"):
                raise ConfigError(f"unknown sample kind {self.sample!r}")
            if self.sample == "grid" and not (self.step and self.step > 0):
                raise ConfigError("grid sampling needs --step > 0")
        elif cmd == "window":
            _need(self, "y", "x")
            if not 0 < self.y < self.x or self.x - self.y < self.x ** (2 / 3):
                raise ConfigError("window needs 0 < y < x and x - y >= x^(2/3)")
        elif cmd == "tail":
            if self.kind not in ("I", "J"):
                raise ConfigError("kind must be I or J")
            if Fraction(self.beta) not in (Fraction(1, 2), Fraction(3, 2)):
                raise ConfigError("beta must be 1/2 or 3/2")
            if self.alpha <= 0 or self.cmax < 1:
                raise ConfigError("alpha and cmax must be positive")
        elif cmd == "exact":
            if self.n < 1 or self.cutoff < 3:
                raise ConfigError("exact needs n >= 1 and cutoff >= 3")
        elif cmd == "phi":
            _need(self, "a", "x")
            if self.transform not in ("quarter", "tilde", "hat"):
                raise ConfigError(f"unknown transform {self.transform!r}")
            if self.k not in (0.5, 1.5) and self.transform != "tilde":
                raise ConfigError("k must be 1/2 or 3/2")
            try:
                self.test_function()
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc

    def test_function(self):
        return build_phi(self.a, self.x, self.T, self.delta, self.profile)


def _need(cfg: ExperimentConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise ConfigError(f"{cfg.command} needs {', '.join('--' + n for n in missing)}")


# --- artifacts ----------------------------------------------------------------

def _g(x: float) -> str:
    return format(float(x), ".17g")


def emit_csv(series: PartialSumSeries, path: str | Path | None = None,
             rows: Sequence[int] | None = None) -> str:
    """Write the series as CSV (to ``path`` or return it as text)."""
    ix = range(len(series)) if rows is None else rows
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for i in ix:
        s, run = series.s[i], series.running[i]
        buf.write(f"{int(series.c[i])},{_g(s.real)},{_g(s.imag)},{_g(run.real)},{_g(run.imag)}\n")
    text = buf.getvalue()
    if path is not None:
        p = Path(path)
        try:
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write CSV to {p}: {exc}") from exc
    return text


def _record(cfg: ExperimentConfig, result: Any) -> str:
    return json.dumps({"config": asdict(cfg), "result": result}, sort_keys=True)


def _write(cfg: ExperimentConfig, text: str) -> None:
    if cfg.output:
        p = Path(cfg.output)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text + ("" if text.endswith("\n") else "\n"))
    else:
        sys.stdout.write(text + ("" if text.endswith("\n") else "\n"))


def _cplx(z: complex) -> dict[str, float]:
    return {"re": float(z.real), "im": float(z.imag)}


# --- commands -----------------------------------------------------------------

def _cache(cfg: ExperimentConfig) -> SumCache | None:
    if cfg.cache:
        return SumCache(cfg.cache)
    p = default_cache_path()
    return SumCache(p) if p else None


def _cmd_sum(cfg):
    nu = cfg.multiplier()
    v = kloosterman_sum(KloostermanQuery(cfg.m, cfg.n, nu, cfg.c))
    _write(cfg, _record(cfg, {"multiplier": nu.fingerprint(), "m": cfg.m, "n": cfg.n, "c": cfg.c,
                              "value": _cplx(v.value), "term_count": v.term_count,
                              "max_phase_den": v.max_phase_den, "skipped": v.skipped}))
    return EXIT_OK


def _cmd_partial(cfg):
    series = partial_sums(cfg.multiplier(), cfg.m, cfg.n, cfg.xmax, cfg.workers, _cache(cfg))
    rows = series.sample_points(cfg.sample, cfg.step)
    if cfg.output:
        emit_csv(series, cfg.output, rows)
        Path(cfg.output + ".json").write_text(cfg.to_json() + "\n")
    else:
        sys.stdout.write(emit_csv(series, None, rows))
    return EXIT_OK


def _cmd_window(cfg):
    w = windowed_average(cfg.multiplier(), cfg.m, cfg.n, cfg.y, cfg.x, cfg.workers, _cache(cfg))
    _write(cfg, _record(cfg, {"total": w.total, "ratio": w.ratio, "count": w.count}))
    return EXIT_OK


def _cmd_tail(cfg):
    t = bessel_tail(cfg.multiplier(), cfg.m, cfg.n, cfg.alpha, cfg.kind, Fraction(cfg.beta),
                    cfg.cmax, cfg.workers, _cache(cfg))
    _write(cfg, _record(cfg, {"value": _cplx(t.value), "c_start": t.c_start, "c_max": t.c_max,
                              "terms": t.terms, "last_decade": _cplx(t.last_decade)}))
    return EXIT_OK


def _cmd_exact(cfg):
    r = mock_theta_coefficient(cfg.n, cfg.cutoff, cfg.workers, _cache(cfg))
    _write(cfg, _record(cfg, dataclasses.asdict(r)))
    return EXIT_OK


def _cmd_phi(cfg):
    tf = cfg.test_function()
    if cfg.transform == "quarter":
        q = phi_hat_quarter(tf, cfg.k)
    elif cfg.transform == "tilde":
        q = phi_tilde(tf, cfg.r)
    else:
        q = phi_hat(tf, cfg.k, cfg.r)
    _write(cfg, _record(cfg, {"value": _cplx(q.value), "error": q.error,
                              "support": list(tf.support), "T": tf.T}))
    return EXIT_OK


def _cmd_verify(cfg):
    def show(r):
        log.info(r.line())

    results = checks.run_all(cfg.workers, _cache(cfg), cfg.quick, show)
    print(checks.format_table(results))
    if cfg.output:
        _write(cfg, _record(cfg, [dataclasses.asdict(r) for r in results]))
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


_DISPATCH = {"sum": _cmd_sum, "partial": _cmd_partial, "window": _cmd_window, "tail": _cmd_tail,
             "exact": _cmd_exact, "phi": _cmd_phi, "verify": _cmd_verify}


def run(cfg: ExperimentConfig) -> int:
    cfg.validate()
    return _DISPATCH[cfg.command](cfg)


# --- argument parsing ---------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", help="JSON config file (flags override it)")
    common.add_argument("--output", "-o", help="output path (default stdout)")
    common.add_argument("--cache", help="cache file (default $KLOOSTER_CACHE_DIR/sums.csv)")
    common.add_argument("--workers", type=int, help="threads for the Kloosterman sweep")
    common.add_argument("-v", "--verbose", action="store_true", default=False)

    mult = argparse.ArgumentParser(add_help=False, argument_default=S)
    mult.add_argument("--multiplier", dest="base", choices=("eta", "theta", "trivial"))
    mult.add_argument("--twist", type=int, help="odd |D| or a fundamental discriminant D")
    mult.add_argument("--conjugate", action="store_true")
    mult.add_argument("--weight", help="optional consistency check, e.g. -1/2")
    mult.add_argument("--level", type=int)
    mult.add_argument("--m", type=int)
    mult.add_argument("--n", type=int)

    p = argparse.ArgumentParser(prog="klooster", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sum", parents=[common, mult], argument_default=S,
                       help="one Kloosterman sum S(m, n, c, nu)")
    s.add_argument("--c", type=int)

    s = sub.add_parser("partial", parents=[common, mult], argument_default=S,
                       help="partial sums of S/c as CSV")
    s.add_argument("--xmax", type=int)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--dyadic", dest="sample", action="store_const", const="dyadic")
    g.add_argument("--grid", dest="step", type=int, metavar="STEP")

    s = sub.add_parser("window", parents=[common, mult], argument_default=S,
                       help="sum of |S|/c over a window [y, x]")
    s.add_argument("--y", type=float)
    s.add_argument("--x", type=float)

    s = sub.add_parser("tail", parents=[common, mult], argument_default=S,
                       help="Bessel-weighted tail of the Kloosterman series")
    s.add_argument("--alpha", type=float)
    s.add_argument("--kind", choices=("I", "J"))
    s.add_argument("--beta")
    s.add_argument("--cmax", type=int)

    s = sub.add_parser("exact", parents=[common], argument_default=S,
                       help="exact-formula value of a mock theta coefficient")
    s.add_argument("--n", type=int)
    s.add_argument("--cutoff", type=int)

    s = sub.add_parser("phi", parents=[common], argument_default=S,
                       help="Bessel transforms of the test function")
    s.add_argument("--a", type=float)
    s.add_argument("--x", type=float)
    s.add_argument("--T", type=float)
    s.add_argument("--delta", type=float)
    s.add_argument("--profile", choices=("linear", "smooth"))
    s.add_argument("--transform", choices=("quarter", "tilde", "hat"))
    s.add_argument("--k", type=float)
    s.add_argument("--r", type=float)

    s = sub.add_parser("verify", parents=[common], argument_default=S,
                       help="run the property suite and print a pass/fail table")
    s.add_argument("--quick", action="store_true")
    return p


def resolve_config(argv: Sequence[str] | None = None) -> tuple[ExperimentConfig, bool]:
    """Merge defaults, an optional config file and the flags."""
    args = vars(_parser().parse_args(argv))
    verbose = args.pop("verbose", False)
    merged: dict[str, Any] = {}
    path = args.pop("config", None)
    if path:
        try:
            merged.update(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if "step" in args:
        args["sample"] = "grid"
    merged.update(args)
    return ExperimentConfig.from_dict(merged), verbose


def _fail(code: int, kind: str, message: str, **extra: Any) -> int:
    rec = {"error": kind, "exit_code": code, "message": message, **extra}
    sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg, verbose = resolve_config(argv)
        logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                            format="%(message)s", stream=sys.stderr)
        return run(cfg)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "invalid_config", str(exc))
    except TypeError as exc:  # wrong field types in a config file
        return _fail(EXIT_CONFIG, "invalid_config", str(exc))
    except RegimeError as exc:
        return _fail(EXIT_REGIME, "numeric_regime", str(exc))
    except CacheCorruptError as exc:
        return _fail(EXIT_CACHE, "cache_corrupt", str(exc), path=str(exc.path), line=exc.lineno)


if __name__ == "__main__":
    sys.exit(main())
