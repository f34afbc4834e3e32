"""
Admissibility of partially defined Schur multipliers.

On chordal patterns the test is exact: phi is admissible iff every maximal
clique block [phi(x, y)]_{x, y in clique} is positive. On other patterns only
sampled falsification is available: PSD kernels supported inside the pattern
are pushed through S_phi and the outputs are eigen-checked.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import networkx as nx
import numpy as np

from src.entities.errors import NotChordalError
from src.entities.multiplier import FILL_ZERO, PartialBlockMultiplier, schur_product
from src.entities.pattern import clique_tree, is_chordal
from src.utils.linalg import DEFAULT_PSD_TOL, HermitianMatrix, complex_gaussian, psd_check

logger = logging.getLogger(__name__)

MAX_TERMS = 3


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    clique: Optional[Tuple[int, ...]] = None
    min_eig: float = 0.0

    def __bool__(self) -> bool:
        return self.admissible


@dataclass(frozen=True)
class SampledVerdict:
    violation: bool
    kernel: Optional[np.ndarray] = None
    witness: Optional[np.ndarray] = None
    min_eig: float = 0.0
    trial: int = -1  # -1 for the deterministic diagonal kernels

    def __bool__(self) -> bool:
        return not self.violation


def admissible_chordal(phi: PartialBlockMultiplier, tol: float = DEFAULT_PSD_TOL) -> AdmissibilityVerdict:
    """
    Exact admissibility test for multipliers on chordal patterns.

    Returns:
        AdmissibilityVerdict: Admissible, or the first failing clique (in
        clique-tree order) together with its minimum eigenvalue

    Raises:
        NotChordalError: if the pattern is not chordal
    """
    verdict = is_chordal(phi.pattern)
    if not verdict.chordal:
        raise NotChordalError(list(verdict.cycle))

    tree = clique_tree(phi.pattern)
    worst = np.inf
    for clique in tree.cliques:
        points = sorted(clique)
        check = psd_check(phi.assemble(points=points), tol)
        worst = min(worst, check.min_eig)
        if not check.positive:
            logger.info("clique %s rejected, min eigenvalue %.3e", points, check.min_eig)
            return AdmissibilityVerdict(admissible=False, clique=tuple(points), min_eig=check.min_eig)
    return AdmissibilityVerdict(admissible=True, min_eig=float(worst))


def _sample_kernel(cliques, n: int, rng: np.random.Generator) -> np.ndarray:
    """Sum of g g* with each g supported on a random subset of a random clique."""
    k = np.zeros((n, n), dtype=np.complex128)
    for _ in range(int(rng.integers(1, MAX_TERMS + 1))):
        clique = cliques[int(rng.integers(len(cliques)))]
        mask = rng.random(len(clique)) < 0.7
        if not mask.any():
            mask[int(rng.integers(len(clique)))] = True
        support = [v for v, keep in zip(clique, mask) if keep]
        g = np.zeros(n, dtype=np.complex128)
        g[support] = complex_gaussian(len(support), rng)
        k += np.outer(g, g.conj())
    return k


def admissible_sampled(phi: PartialBlockMultiplier, trials: int = 1000, seed: int = 0,
                       tol: float = DEFAULT_PSD_TOL) -> SampledVerdict:
    """
    Sampled falsification of positivity of S_phi on kernels supported in the pattern.

    The diagonal kernels K = e_x e_x* run first; then each trial t draws its
    own generator from (seed, t). Kernels are sums of rank-one terms on
    clique-contained index sets, so for non-chordal patterns the cone is only
    partially explored.

    Returns:
        SampledVerdict: no violation, or the offending kernel and a witness
    """
    n, d = phi.n, phi.d
    assembled = phi.assemble(fill=FILL_ZERO).entries

    for x in range(n):
        check = psd_check(HermitianMatrix(phi.block(x, x)), tol)
        if not check.positive:
            k = np.zeros((n, n), dtype=np.complex128)
            k[x, x] = 1.0
            logger.info("diagonal kernel e_%d e_%d* violates positivity", x, x)
            return SampledVerdict(violation=True, kernel=k, witness=check.witness,
                                  min_eig=check.min_eig)

    cliques = [sorted(c) for c in nx.find_cliques(phi.pattern.to_graph())]
    cliques.sort()
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        k = _sample_kernel(cliques, n, rng)
        check = psd_check(HermitianMatrix(schur_product(assembled, k, d)), tol)
        if not check.positive:
            logger.info("trial %d found a violating kernel (min eigenvalue %.3e)", t, check.min_eig)
            return SampledVerdict(violation=True, kernel=k, witness=check.witness,
                                  min_eig=check.min_eig, trial=t)
    logger.info("no violation in %d sampled kernels", trials)
    return SampledVerdict(violation=False)
