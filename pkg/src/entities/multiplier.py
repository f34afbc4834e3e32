"""
Partially defined operator-valued Schur multipliers.

A multiplier assigns a d x d block to each pair of a Pattern. Its Schur
action on a scalar kernel k is (phi k)(x, y) = k(x, y) phi(x, y); with the
all-ones kernel this gives back the assembled nd x nd block matrix.
"""

import logging
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from src.entities.errors import AsymmetricInput, DimensionMismatch, UnspecifiedEntry
from src.entities.pattern import Pair, Pattern
from src.utils.linalg import HermitianMatrix, as_complex_matrix, frobenius

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12

FILL_ZERO = "zero"
FILL_FAIL = "fail"


class PartialBlockMultiplier:
    """
    Map phi: pattern -> M_d, defined exactly on the pattern's pairs.

    Hermitian symmetry phi(y, x) = phi(x, y)* is enforced: mismatches up to
    1e-12 (relative to max(1, block norm)) are repaired by mirroring the block
    with x < y (diagonal blocks are symmetrized); anything larger is rejected.
    """

    def __init__(self, pattern: Pattern, d: int, blocks: Mapping[Pair, object]):
        if d < 1:
            raise DimensionMismatch("block dimension", ">= 1", d)
        self.pattern = pattern
        self.d = d

        keys = set(blocks.keys())
        missing = sorted(pattern.pairs - keys)
        if missing:
            raise UnspecifiedEntry(missing[0])
        extra = sorted(keys - pattern.pairs)
        if extra:
            raise DimensionMismatch(f"block {extra[0]} outside pattern", "pattern pair", extra[0])

        raw = {pair: as_complex_matrix(blocks[pair], d, d) for pair in pattern.pairs}
        self._blocks: Dict[Pair, np.ndarray] = {}
        for (x, y), block in raw.items():
            if x > y:
                continue
            mirror = raw[(y, x)]
            mismatch = frobenius(mirror - block.conj().T)
            if mismatch > SYMMETRY_TOL * max(1.0, frobenius(block)):
                raise AsymmetricInput(mismatch)
            if x == y:
                if mismatch > 0.0:
                    block = (block + block.conj().T) / 2.0
                block.flags.writeable = False
                self._blocks[(x, x)] = block
            else:
                block.flags.writeable = False
                adjoint = block.conj().T.copy()
                adjoint.flags.writeable = False
                self._blocks[(x, y)] = block
                self._blocks[(y, x)] = adjoint

    @classmethod
    def from_upper(cls, pattern: Pattern, d: int, upper: Mapping[Pair, object]) -> "PartialBlockMultiplier":
        """Build from blocks on pairs x <= y; the lower triangle is the adjoint."""
        blocks = {}
        for (x, y), block in upper.items():
            if x > y:
                x, y = y, x
                block = as_complex_matrix(block).conj().T
            blocks[(x, y)] = block
            if x != y:
                blocks[(y, x)] = as_complex_matrix(block).conj().T
        return cls(pattern, d, blocks)

    @property
    def n(self) -> int:
        return self.pattern.n

    @property
    def blocks(self) -> Dict[Pair, np.ndarray]:
        return dict(self._blocks)

    def block(self, x: int, y: int) -> np.ndarray:
        try:
            return self._blocks[(x, y)]
        except KeyError:
            raise UnspecifiedEntry((x, y)) from None

    def assemble(self, fill: str = FILL_FAIL, points: Optional[List[int]] = None) -> HermitianMatrix:
        """
        Block matrix [phi(x, y)] over `points` (all of X by default).

        Args:
            fill: "zero" puts zero blocks on unspecified pairs, "fail" raises
            points: Ordered subset of indices to assemble over

        Returns:
            HermitianMatrix: the |points| d x |points| d block matrix
        """
        if fill not in (FILL_ZERO, FILL_FAIL):
            raise ValueError(f"unknown fill mode {fill!r}")
        points = list(range(self.n)) if points is None else list(points)
        d = self.d
        out = np.zeros((len(points) * d, len(points) * d), dtype=np.complex128)
        for a, x in enumerate(points):
            for b, y in enumerate(points):
                block = self._blocks.get((x, y))
                if block is None:
                    if fill == FILL_FAIL:
                        raise UnspecifiedEntry((x, y))
                    continue
                out[a * d:(a + 1) * d, b * d:(b + 1) * d] = block
        return HermitianMatrix(out)

    def restrict(self, p: Pattern) -> "PartialBlockMultiplier":
        """Copy the blocks on p's pairs; every pair of p must be specified here."""
        if p.n != self.n:
            raise DimensionMismatch("pattern size", self.n, p.n)
        return PartialBlockMultiplier(p, self.d, {pair: self.block(*pair) for pair in p.pairs})

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, d={self.d}, pairs={len(self.pattern.pairs)})"


class BlockMultiplier(PartialBlockMultiplier):
    """Multiplier defined on all of X x X."""

    def __init__(self, pattern: Pattern, d: int, blocks: Mapping[Pair, object]):
        if not pattern.is_full:
            raise UnspecifiedEntry(pattern.missing_pairs()[0])
        super().__init__(pattern, d, blocks)

    @classmethod
    def from_matrix(cls, matrix, n: int, d: int) -> "BlockMultiplier":
        """Split an nd x nd Hermitian matrix into d x d blocks."""
        a = matrix.entries if isinstance(matrix, HermitianMatrix) else as_complex_matrix(matrix, n * d, n * d)
        blocks = {(x, y): a[x * d:(x + 1) * d, y * d:(y + 1) * d]
                  for x in range(n) for y in range(n)}
        return cls(Pattern.full(n), d, blocks)

    @classmethod
    def identity(cls, n: int, d: int) -> "BlockMultiplier":
        return cls.from_matrix(np.eye(n * d), n, d)

    def inflate(self, m: int) -> "BlockMultiplier":
        """psi^(m)((i,x),(j,y)) = psi(x,y); its Schur action is the m-ampliation."""
        return BlockMultiplier.from_matrix(np.tile(self.assemble().entries, (m, m)), m * self.n, self.d)


class ScalarKernel:
    """n x n scalar kernel k acting through the Schur product."""

    def __init__(self, entries, n: Optional[int] = None):
        a = as_complex_matrix(entries)
        if a.shape[0] != a.shape[1]:
            raise DimensionMismatch("square kernel", (a.shape[0], a.shape[0]), a.shape)
        if n is not None and a.shape[0] != n:
            raise DimensionMismatch("kernel size", n, a.shape[0])
        a.flags.writeable = False
        self.entries = a

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def ones(cls, n: int) -> "ScalarKernel":
        return cls(np.ones((n, n)))

    @classmethod
    def identity(cls, n: int) -> "ScalarKernel":
        return cls(np.eye(n))

    @classmethod
    def outer(cls, g: np.ndarray) -> "ScalarKernel":
        g = np.asarray(g, dtype=np.complex128).reshape(-1, 1)
        return cls(g @ g.conj().T)

    @property
    def is_hermitian(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.conj().T))


def schur_product(assembled: np.ndarray, k: np.ndarray, d: int) -> np.ndarray:
    """Entrywise product of an nd x nd block matrix with k inflated to d x d blocks."""
    return assembled * np.kron(k, np.ones((d, d)))


def schur_apply(phi: PartialBlockMultiplier, k: ScalarKernel) -> np.ndarray:
    """
    Inflated Schur action: block (x, y) of the output is k[x, y] phi(x, y).

    Partial multipliers are assembled with zero fill, which is exact whenever
    k is supported in phi's pattern.

    Raises:
        DimensionMismatch: if k.n differs from phi.n
    """
    if k.n != phi.n:
        raise DimensionMismatch("kernel size", phi.n, k.n)
    fill = FILL_FAIL if phi.pattern.is_full else FILL_ZERO
    return schur_product(phi.assemble(fill=fill).entries, k.entries, phi.d)


def zero_test_kernels(n: int) -> Iterable[Tuple[Pair, ScalarKernel]]:
    """Basis kernels e_x e_y*; S_phi vanishes on all of them iff phi = 0."""
    for x in range(n):
        for y in range(n):
            e = np.zeros((n, n))
            e[x, y] = 1.0
            yield (x, y), ScalarKernel(e)
