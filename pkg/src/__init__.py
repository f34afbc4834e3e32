"""
schurext: positive completion and factorization of operator-valued Schur multipliers.
"""

from .entities import *
from .engine import *

__all__ = ['entities', 'engine', 'utils']
