"""Entities module for schurext."""

from .errors import (SchurExtError, NonConvergence, NotPSD, AsymmetricInput, DomainError,
                     NotChordalError, UnspecifiedEntry, DimensionMismatch, NotAdmissible,
                     CompletionFailure, InputError, ConfigError)
from .pattern import Pattern, CliqueTree, is_chordal, clique_tree, fill_in, completion_sequence
from .multiplier import PartialBlockMultiplier, BlockMultiplier, ScalarKernel, schur_apply

__all__ = [
    'SchurExtError',
    'NonConvergence',
    'NotPSD',
    'AsymmetricInput',
    'DomainError',
    'NotChordalError',
    'UnspecifiedEntry',
    'DimensionMismatch',
    'NotAdmissible',
    'CompletionFailure',
    'InputError',
    'ConfigError',
    'Pattern',
    'CliqueTree',
    'is_chordal',
    'clique_tree',
    'fill_in',
    'completion_sequence',
    'PartialBlockMultiplier',
    'BlockMultiplier',
    'ScalarKernel',
    'schur_apply'
]
