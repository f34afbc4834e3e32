"""
Matrix cones over V = M_k with the diagonal algebra D_k acting.

An element of M_n(M_k) is stored as an nk x nk Hermitian matrix with k x k
blocks. Membership in C_n^min is tested by sampling compressions C* X C with
C a column of diagonal matrices, and exactly by the global eigencheck (the
two agree for M_k over D_k). D_n^max membership is certified constructively by
splitting X into rank-one pieces R R*, each equal to [D_i J D_j*] with
D_i = diag(R_i) and J the all-ones k x k matrix.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.entities.errors import DimensionMismatch, NotPSD
from src.utils.linalg import (DEFAULT_PSD_TOL, EigenDecomposition, HermitianMatrix, complex_gaussian, eigh,
                              frobenius, psd_check, random_hermitian, random_psd, rank_one_decompose)

logger = logging.getLogger(__name__)

PMN_DESK_BOUND = 64
CMIN_VIOLATION_TOL = 1e-10
CERTIFICATE_TOL = 1e-8


class BlockElement:
    """Element of M_n(M_k)_h held as an nk x nk Hermitian matrix."""

    def __init__(self, n: int, k: int, x):
        self.n = n
        self.k = k
        self.x = x if isinstance(x, HermitianMatrix) else HermitianMatrix(x)
        if self.x.dim != n * k:
            raise DimensionMismatch("block element dimension", n * k, self.x.dim)

    def block(self, i: int, j: int) -> np.ndarray:
        k = self.k
        return self.x.entries[i * k:(i + 1) * k, j * k:(j + 1) * k]

    def __repr__(self) -> str:
        return f"BlockElement(n={self.n}, k={self.k})"


@dataclass(frozen=True)
class DiagonalTuple:
    """C = (D_1, ..., D_n)^t in M_{n,1}(D_k); diags[i] is the diagonal of D_i."""
    diags: np.ndarray  # shape (n, k)

    @property
    def n(self) -> int:
        return self.diags.shape[0]

    @property
    def k(self) -> int:
        return self.diags.shape[1]

    def column(self) -> np.ndarray:
        """The nk x k matrix stacking D_1, ..., D_n."""
        return np.vstack([np.diag(row) for row in self.diags])


@dataclass(frozen=True)
class DmaxCertificate:
    n: int
    k: int
    summands: Tuple[Tuple[DiagonalTuple, HermitianMatrix], ...]

    def reconstruct(self) -> HermitianMatrix:
        """sum over summands of [D_i core D_j*]_{i,j}"""
        total = np.zeros((self.n * self.k, self.n * self.k), dtype=np.complex128)
        for tup, core in self.summands:
            c = tup.column()
            total += c @ core.entries @ c.conj().T
        return HermitianMatrix(total)


@dataclass(frozen=True)
class CminVerdict:
    member: bool
    min_value: float
    diagonal_tuple: Optional[DiagonalTuple] = None
    eta: Optional[np.ndarray] = None

    def __bool__(self) -> bool:
        return self.member


@dataclass
class PmnReport:
    n: int
    k: int
    trials: int = 0
    breaches: int = 0
    max_err: float = 0.0
    psd_trials: int = 0
    breach_trials: List[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "trials": self.trials, "breaches": self.breaches,
                "max_err": self.max_err, "psd_trials": self.psd_trials}


def random_tuple(n: int, k: int, rng: np.random.Generator) -> DiagonalTuple:
    return DiagonalTuple(diags=complex_gaussian((n, k), rng))


def cmin_member(x: BlockElement, trials: int = 1000, seed: int = 0) -> CminVerdict:
    """
    Sampled test of C* X C in M_k^+ for C in M_{n,1}(D_k).

    Each trial draws a complex Gaussian DiagonalTuple and a unit vector eta
    and evaluates Re(C* X C eta, eta) = (X xi, xi) with xi = C eta. Values
    below -1e-10 max(1, ||X||_F) ||xi||^2 are violations.
    """
    a = x.x.entries
    scale = x.x.scale
    lowest = np.inf
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        tup = random_tuple(x.n, x.k, rng)
        eta = complex_gaussian(x.k, rng)
        eta /= np.linalg.norm(eta)
        xi = tup.column() @ eta
        value = float(np.real(np.vdot(xi, a @ xi)))
        lowest = min(lowest, value)
        if value < -CMIN_VIOLATION_TOL * scale * float(np.vdot(xi, xi).real):
            logger.debug("C_min violation at trial %d, value %.3e", t, value)
            return CminVerdict(member=False, min_value=value, diagonal_tuple=tup, eta=eta)
    return CminVerdict(member=True, min_value=float(lowest))


def witness_tuple(x: BlockElement, tol: float = DEFAULT_PSD_TOL) -> Optional[Tuple[DiagonalTuple, np.ndarray]]:
    """
    Turn the psd_check witness xi into (C, eta) with D_i eta = xi_i.

    eta = (1, ..., 1)/sqrt(k) and D_i = sqrt(k) diag(xi_i). Returns None when
    X is PSD.
    """
    check = psd_check(x.x, tol)
    if check.positive:
        return None
    xi = check.witness.reshape(x.n, x.k)
    eta = np.ones(x.k, dtype=np.complex128) / np.sqrt(x.k)
    return DiagonalTuple(diags=xi * np.sqrt(x.k)), eta


def cmin_member_exact(x: BlockElement, tol: float = DEFAULT_PSD_TOL,
                      decomposition: Optional[EigenDecomposition] = None) -> CminVerdict:
    """Membership in C_n^min(M_k; D_k), which is global positivity of X."""
    check = psd_check(x.x, tol, decomposition)
    return CminVerdict(member=check.positive, min_value=check.min_eig)


def dmax_decompose(x: BlockElement, tol: float = DEFAULT_PSD_TOL,
                   decomposition: Optional[EigenDecomposition] = None) -> DmaxCertificate:
    """
    Constructive D_n^max certificate for a PSD block element.

    Raises:
        NotPSD: if X is not PSD
    """
    ones = HermitianMatrix(np.ones((x.k, x.k)))
    summands = []
    for r in rank_one_decompose(x.x, tol, decomposition):
        summands.append((DiagonalTuple(diags=r.reshape(x.n, x.k)), ones))
    return DmaxCertificate(n=x.n, k=x.k, summands=tuple(summands))


def certificate_error(x: BlockElement, cert: DmaxCertificate) -> float:
    return frobenius(cert.reconstruct().entries - x.x.entries)


def verify_pmn(n: int, k: int, trials: int = 500, seed: int = 0,
               tol: float = DEFAULT_PSD_TOL) -> PmnReport:
    """
    Three-way check of M_k = omin_{D_k}(M_k) = omax_{D_k}(M_k) on random draws.

    Even trials draw PSD matrices G G* of random rank, odd trials GUE matrices.
    For each X: psd_check, cmin_member_exact and a validated dmax_decompose
    certificate must give the same verdict. All three read one eigendecomposition
    of X; the certificate is still checked against X itself.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if n * k > PMN_DESK_BOUND:
        raise ValueError(f"n*k = {n * k} exceeds the desk bound {PMN_DESK_BOUND}")

    report = PmnReport(n=n, k=k)
    dim = n * k
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        if t % 2 == 0:
            x = BlockElement(n, k, random_psd(dim, rng, rank=int(rng.integers(1, dim + 1))))
        else:
            x = BlockElement(n, k, random_hermitian(dim, rng))

        dec = eigh(x.x)
        positive = psd_check(x.x, tol, dec).positive
        member = cmin_member_exact(x, tol, dec).member
        try:
            cert = dmax_decompose(x, tol, dec)
            err = certificate_error(x, cert)
            certified = err <= CERTIFICATE_TOL * x.x.scale
            report.max_err = max(report.max_err, err)
        except NotPSD:
            certified = False

        report.trials += 1
        report.psd_trials += int(positive)
        if not (positive == member == certified):
            report.breaches += 1
            report.breach_trials.append(t)
            logger.warning("equivalence breach at trial %d: psd=%s cmin=%s dmax=%s",
                           t, positive, member, certified)
    logger.info("verify_pmn n=%d k=%d: %d trials, %d breaches, max error %.3e",
                n, k, report.trials, report.breaches, report.max_err)
    return report


def dmax_sample(generators: Sequence[HermitianMatrix], n: int, count: int, seed: int = 0,
                terms: int = 2, tol: float = DEFAULT_PSD_TOL) -> List[BlockElement]:
    """
    Random elements of D_n^max with V+ the cone generated by `generators`.

    Each output is sum over `terms` summands of [D_i x D_j*] with x a random
    nonnegative combination of the generators and (D_i) a random
    DiagonalTuple.

    Raises:
        NotPSD: if a generator is not PSD
    """
    if not generators:
        raise ValueError("at least one generator is required")
    k = generators[0].dim
    for g in generators:
        if g.dim != k:
            raise DimensionMismatch("generator dimension", k, g.dim)
        check = psd_check(g, tol)
        if not check.positive:
            raise NotPSD(check.min_eig)

    outputs = []
    for c in range(count):
        rng = np.random.default_rng([seed, c])
        total = np.zeros((n * k, n * k), dtype=np.complex128)
        for _ in range(terms):
            weights = rng.exponential(size=len(generators))
            core = sum(w * g.entries for w, g in zip(weights, generators))
            col = random_tuple(n, k, rng).column()
            total += col @ core @ col.conj().T
        outputs.append(BlockElement(n, k, total))
    return outputs
