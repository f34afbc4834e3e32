"""
Dense complex Hermitian linear algebra kernel.

Every other module goes through this file for spectral work: a cyclic Jacobi
eigensolver for complex Hermitian matrices, PSD certification with witness
vectors, Gram and rank-one factorizations, and the spectral pseudo-inverse.
All tolerances are relative to max(1, ||M||_F).
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.entities.errors import AsymmetricInput, DimensionMismatch, NonConvergence, NotPSD

logger = logging.getLogger(__name__)

EIG_TOL = 1e-12
MAX_SWEEPS = 100
POLISH_FACTOR = 1e-2
DEFAULT_PSD_TOL = 1e-9
PINV_TOL = 1e-12
ASYMMETRY_REJECT = 1e-6


def as_complex_matrix(entries, rows: Optional[int] = None, cols: Optional[int] = None) -> np.ndarray:
    """
    Convert input to a 2-D complex128 array, checking shape and finiteness.

    Args:
        entries: Anything numpy can turn into a 2-D array
        rows: Expected row count (optional)
        cols: Expected column count (optional)

    Returns:
        np.ndarray: A fresh complex128 copy
    """
    a = np.array(entries, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch("matrix rank", 2, a.ndim)
    if rows is not None and a.shape[0] != rows:
        raise DimensionMismatch("row count", rows, a.shape[0])
    if cols is not None and a.shape[1] != cols:
        raise DimensionMismatch("column count", cols, a.shape[1])
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def frobenius(a: np.ndarray) -> float:
    """Frobenius norm, rescaled by the largest modulus so tiny entries do not underflow."""
    if a.size == 0:
        return 0.0
    peak = float(np.max(np.abs(a)))
    if peak == 0.0 or not np.isfinite(peak):
        return float(np.linalg.norm(a))
    return peak * float(np.linalg.norm(a / peak))


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value of a (0 for empty input)."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class HermitianMatrix:
    """
    Dense complex square matrix with exact conjugate symmetry.

    The constructor symmetrizes via (M + M*)/2 and records the norm of the
    correction it applied. Input with ||M - M*||_F > 1e-6 ||M||_F is rejected.
    """

    def __init__(self, entries, reject_tol: float = ASYMMETRY_REJECT):
        a = as_complex_matrix(entries)
        if a.shape[0] != a.shape[1]:
            raise DimensionMismatch("square matrix", (a.shape[0], a.shape[0]), a.shape)
        if a.shape[0] < 1:
            raise DimensionMismatch("matrix dimension", ">= 1", 0)

        correction = frobenius(a - a.conj().T)
        if correction > reject_tol * frobenius(a):
            raise AsymmetricInput(correction)
        if correction > 0.0:
            a = (a + a.conj().T) / 2.0

        self._entries = _readonly(a)
        self.correction = correction

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Read-only complex128 view of the matrix."""
        return self._entries

    @property
    def norm(self) -> float:
        return frobenius(self._entries)

    @property
    def scale(self) -> float:
        return max(1.0, self.norm)

    def __repr__(self) -> str:
        return f"HermitianMatrix(dim={self.dim}, norm={self.norm:.4g})"


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray   # ascending
    vectors: np.ndarray  # orthonormal columns
    sweeps: int = 0


@dataclass(frozen=True)
class PsdVerdict:
    positive: bool
    min_eig: float
    witness: Optional[np.ndarray] = None

    def __bool__(self) -> bool:
        return self.positive


def _round_robin_rounds(n: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Cyclic pair ordering of 0..n-1 as n-1 rounds of disjoint pairs.

    Every unordered pair appears exactly once per sweep. Pairs within one
    round touch disjoint rows/columns, so their rotations commute and are
    applied together.
    """
    m = n if n % 2 == 0 else n + 1
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p >= n or q >= n:
                continue
            ps.append(min(p, q))
            qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_diagonal_norm(a: np.ndarray) -> float:
    return frobenius(a - np.diag(np.diag(a)))


def _round_unitary(a: np.ndarray, p: np.ndarray, q: np.ndarray,
                   floor: float) -> Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """
    Unitary U of one round, annihilating a[p, q] for every pair with |a[p, q]| > floor.

    On each (p, q) plane U = diag(1, conj(phase)) @ [[c, s], [-s, c]]. Returns
    None when the whole round is below the floor.
    """
    apq = a[p, q]
    r = np.abs(apq)
    active = r > floor
    if not active.any():
        return None
    if not active.all():
        p, q, apq, r = p[active], q[active], apq[active], r[active]

    # real divides only; complex division by a tiny modulus overflows
    phase = apq.real / r + 1j * (apq.imag / r)
    theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
    t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
    c = 1.0 / np.hypot(t, 1.0)
    s = t * c

    u = np.eye(a.shape[0], dtype=np.complex128)
    u[p, p] = c
    u[p, q] = s
    u[q, p] = -s * np.conj(phase)
    u[q, q] = c * np.conj(phase)
    return u, p, q


def eigh(m: HermitianMatrix, tol: float = EIG_TOL, max_sweeps: int = MAX_SWEEPS) -> EigenDecomposition:
    """
    Full spectral decomposition by cyclic Jacobi rotations.

    The iteration runs on M / ||M||_F. Sweeps continue until the off-diagonal
    mass is below POLISH_FACTOR * tol, which leaves the residual at rounding
    level; only mass above tol counts as non-convergence.

    Args:
        m: Hermitian input
        tol: Convergence bound on the off-diagonal Frobenius mass relative to ||M||_F
        max_sweeps: Sweep budget before NonConvergence is raised

    Returns:
        EigenDecomposition: ascending eigenvalues, orthonormal eigenvectors

    Raises:
        NonConvergence: if the budget runs out or the iteration leaves the finite range
    """
    a = np.array(m.entries, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    norm = frobenius(a)

    sweeps = 0
    if n > 1 and norm > 0.0 and _off_diagonal_norm(a) > tol * POLISH_FACTOR * norm:
        a /= norm
        target = tol * POLISH_FACTOR
        floor = np.finfo(float).eps * target
        rounds = _round_robin_rounds(n)
        off = _off_diagonal_norm(a)
        while off > target:
            if sweeps >= max_sweeps:
                if off > tol:
                    raise NonConvergence(sweeps, off * norm)
                break
            for p, q in rounds:
                step = _round_unitary(a, p, q, floor)
                if step is None:
                    continue
                u, p_act, q_act = step
                a = u.conj().T @ a @ u
                v = v @ u
                a[p_act, q_act] = 0.0
                a[q_act, p_act] = 0.0
            a = (a + a.conj().T) / 2.0
            sweeps += 1
            off = _off_diagonal_norm(a)
            if not np.isfinite(off):
                raise NonConvergence(sweeps, off)
        a *= norm

    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(v))):
        raise NonConvergence(sweeps, float("nan"))
    values = np.diag(a).real.copy()
    order = np.argsort(values, kind="stable")
    logger.debug("eigh: dim=%d sweeps=%d", n, sweeps)
    return EigenDecomposition(values=_readonly(values[order]),
                              vectors=_readonly(v[:, order].copy()),
                              sweeps=sweeps)


def psd_check(m: HermitianMatrix, tol: float = DEFAULT_PSD_TOL,
              decomposition: Optional[EigenDecomposition] = None) -> PsdVerdict:
    """
    Certify positive semidefiniteness up to tol * max(1, ||M||_F).

    A decomposition of m already at hand can be passed in and is used as is.

    Returns:
        PsdVerdict: positive flag, minimum eigenvalue and, when indefinite,
        a unit eigenvector for the minimum eigenvalue as witness
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    dec = decomposition if decomposition is not None else eigh(m)
    min_eig = float(dec.values[0])
    if min_eig >= -tol * m.scale:
        return PsdVerdict(positive=True, min_eig=min_eig)
    return PsdVerdict(positive=False, min_eig=min_eig, witness=dec.vectors[:, 0].copy())


def _positive_spectrum(m: HermitianMatrix, tol: float,
                       decomposition: Optional[EigenDecomposition]) -> Tuple[np.ndarray, np.ndarray]:
    dec = decomposition if decomposition is not None else eigh(m)
    min_eig = float(dec.values[0])
    threshold = tol * m.scale
    if min_eig < -threshold:
        raise NotPSD(min_eig)
    order = np.argsort(-dec.values, kind="stable")
    values = dec.values[order]
    vectors = dec.vectors[:, order]
    keep = values > threshold
    return values[keep], vectors[:, keep]


def gram_factor(m: HermitianMatrix, tol: float = DEFAULT_PSD_TOL,
                decomposition: Optional[EigenDecomposition] = None) -> np.ndarray:
    """
    Factor a PSD matrix as M = G G*.

    G has one column per eigenvalue above the tolerance threshold, ordered by
    decreasing eigenvalue; smaller eigenvalues are clamped to zero.
    """
    values, vectors = _positive_spectrum(m, tol, decomposition)
    return vectors * np.sqrt(values)[None, :]


def rank_one_decompose(m: HermitianMatrix, tol: float = DEFAULT_PSD_TOL,
                       decomposition: Optional[EigenDecomposition] = None) -> List[np.ndarray]:
    """Write a PSD matrix as a sum of rank-one terms R_j R_j*."""
    g = gram_factor(m, tol, decomposition)
    return [g[:, j].copy() for j in range(g.shape[1])]


def pseudo_inverse(m: HermitianMatrix, tol: float = PINV_TOL) -> HermitianMatrix:
    """Moore-Penrose inverse; eigenvalues with |lambda| <= tol * ||M||_F map to 0."""
    dec = eigh(m)
    cutoff = tol * m.norm
    keep = np.abs(dec.values) > cutoff
    inv = np.zeros_like(dec.values)
    inv[keep] = 1.0 / dec.values[keep]
    p = (dec.vectors * inv[None, :]) @ dec.vectors.conj().T
    return HermitianMatrix(p)


def complex_gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianMatrix:
    """GUE-style draw: Gaussian real/imaginary parts, symmetrized, scale 1."""
    g = complex_gaussian((dim, dim), rng)
    return HermitianMatrix((g + g.conj().T) / 2.0)


def random_psd(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> HermitianMatrix:
    rank = dim if rank is None else rank
    g = complex_gaussian((dim, rank), rng)
    return HermitianMatrix(g @ g.conj().T)
