"""Engines for schurext."""

from .admissibility import admissible_chordal, admissible_sampled
from .completion_engine import CompletionEngine, CompletionResult, GramFactorization
from .schur_engine import SchurEngine, TwoSidedFactorization
from .cones import BlockElement, DiagonalTuple, cmin_member, dmax_decompose, verify_pmn

__all__ = [
    'admissible_chordal',
    'admissible_sampled',
    'CompletionEngine',
    'CompletionResult',
    'GramFactorization',
    'SchurEngine',
    'TwoSidedFactorization',
    'BlockElement',
    'DiagonalTuple',
    'cmin_member',
    'dmax_decompose',
    'verify_pmn'
]
