"""Generalized Kloosterman sums for half-integral weight multipliers,
their partial sums, and the Rademacher-type exact formula for a sixth-order
mock theta function."""

from .arith import Phase, kronecker
from .multipliers import GammaElement, MultiplierSpec
from .kloosterman import (
    KloostermanQuery,
    KloostermanValue,
    SumCache,
    kloosterman_sum,
    kloosterman_terms,
    partial_sums,
)

__all__ = [
    "GammaElement",
    "KloostermanQuery",
    "KloostermanValue",
    "MultiplierSpec",
    "Phase",
    "SumCache",
    "kloosterman_sum",
    "kloosterman_terms",
    "kronecker",
    "partial_sums",
]
__version__ = "0.1.0"
