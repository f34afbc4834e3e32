"""
Two-sided factorization of full block multipliers and positivity checks.

phi(x, y) = sum_i A_i(x) B_i(y) is read off a balanced singular value split
Phi = (U S^1/2)(S^1/2 V*) of the assembled matrix, computed with the Jacobi
kernel on the Hermitian doubling [[0, Phi], [Phi*, 0]]. When the assembled
matrix is PSD the symmetric Gram factorization B_i = A_i* is returned instead.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from src.entities.errors import NotPSD, UnspecifiedEntry
from src.entities.multiplier import BlockMultiplier, PartialBlockMultiplier, ScalarKernel, schur_apply
from src.utils.linalg import (DEFAULT_PSD_TOL, HermitianMatrix, complex_gaussian, eigh, frobenius,
                              gram_factor, operator_norm, psd_check)

logger = logging.getLogger(__name__)

FACTORIZATION_TOL = 1e-8
MAX_AMPLIATION = 3


@dataclass(frozen=True)
class TwoSidedFactorization:
    d: int
    m: int
    a: np.ndarray  # (m, n, d, d): a[i, x] = A_i(x)
    b: np.ndarray  # (m, n, d, d): b[i, y] = B_i(y)
    row_bound: float
    col_bound: float
    symmetric: bool = False  # B_i = A_i*

    @property
    def n(self) -> int:
        return self.a.shape[1]

    def reconstruct(self, x: int, y: int) -> np.ndarray:
        out = np.zeros((self.d, self.d), dtype=np.complex128)
        for i in range(self.m):
            out += self.a[i, x] @ self.b[i, y]
        return out


@dataclass
class PositivityReport:
    verdicts: Dict[str, bool] = field(default_factory=dict)
    falsifiers: Dict[str, str] = field(default_factory=dict)
    min_eig: float = 0.0
    j_falsifies: bool = False  # S_phi(J) = assembled matrix fails the PSD check

    @property
    def agreement(self) -> Dict[str, Dict[str, bool]]:
        keys = sorted(self.verdicts)
        return {p: {q: self.verdicts[p] == self.verdicts[q] for q in keys} for p in keys}

    @property
    def consistent(self) -> bool:
        return len(set(self.verdicts.values())) <= 1

    def to_json(self) -> dict:
        return {"verdicts": dict(self.verdicts), "falsifiers": dict(self.falsifiers),
                "agreement": self.agreement, "consistent": self.consistent,
                "min_eig": self.min_eig, "j_falsifies": self.j_falsifies}


def _split_rows(left: np.ndarray, n: int, d: int, m: int) -> np.ndarray:
    """(nd x md) -> (m, n, d, d) with out[i, x] = block (x, i)."""
    out = np.zeros((m, n, d, d), dtype=np.complex128)
    for i in range(m):
        for x in range(n):
            out[i, x] = left[x * d:(x + 1) * d, i * d:(i + 1) * d]
    return out


def _split_cols(right: np.ndarray, n: int, d: int, m: int) -> np.ndarray:
    """(md x nd) -> (m, n, d, d) with out[i, y] = block (i, y)."""
    out = np.zeros((m, n, d, d), dtype=np.complex128)
    for i in range(m):
        for y in range(n):
            out[i, y] = right[i * d:(i + 1) * d, y * d:(y + 1) * d]
    return out


def _pad_columns(a: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros((a.shape[0], width), dtype=np.complex128)
    out[:, :a.shape[1]] = a
    return out


class SchurEngine:
    def __init__(self, tol: float = DEFAULT_PSD_TOL, reconstruction_tol: float = FACTORIZATION_TOL):
        """
        Initialize the Schur engine.

        Args:
            tol: Relative tolerance for PSD decisions and singular value cutoffs
            reconstruction_tol: Relative bound on factorization error
        """
        self.tol = tol
        self.reconstruction_tol = reconstruction_tol

    def _require_full(self, phi: PartialBlockMultiplier) -> None:
        if not phi.pattern.is_full:
            raise UnspecifiedEntry(phi.pattern.missing_pairs()[0])

    def singular_split(self, phi_matrix: np.ndarray):
        """
        Balanced split Phi = L R with L = U S^1/2 and R = S^1/2 V*.

        The SVD comes from eigh of the doubling [[0, Phi], [Phi*, 0]], whose
        eigenpairs with lambda = sigma > 0 are (u, v)/sqrt(2).
        """
        size = phi_matrix.shape[0]
        doubled = np.zeros((2 * size, 2 * size), dtype=np.complex128)
        doubled[:size, size:] = phi_matrix
        doubled[size:, :size] = phi_matrix.conj().T
        h = HermitianMatrix(doubled)
        dec = eigh(h)
        keep = dec.values > self.tol * h.scale
        sigma = dec.values[keep][::-1]
        vecs = dec.vectors[:, keep][:, ::-1] * np.sqrt(2.0)
        u, v = vecs[:size], vecs[size:]
        root = np.sqrt(sigma)
        return u * root[None, :], (v * root[None, :]).conj().T

    def factorize(self, phi: BlockMultiplier) -> TwoSidedFactorization:
        """
        Factor phi(x, y) = sum_i A_i(x) B_i(y) with row and column bounds.

        row_bound = max_x ||sum_i A_i(x) A_i(x)*||^1/2 and
        col_bound = max_y ||sum_i B_i(y)* B_i(y)||^1/2.

        Raises:
            UnspecifiedEntry: if the pattern is not full
        """
        self._require_full(phi)
        n, d = phi.n, phi.d
        assembled = phi.assemble()

        symmetric = psd_check(assembled, self.tol).positive
        if symmetric:
            left = gram_factor(assembled, self.tol)
            right = left.conj().T
        else:
            left, right = self.singular_split(assembled.entries)

        r = left.shape[1]
        m = math.ceil(r / d)
        left = _pad_columns(left, m * d)
        right = _pad_columns(right.T, m * d).T

        a = _split_rows(left, n, d, m)
        b = _split_cols(right, n, d, m)
        row_bound = max(operator_norm(left[x * d:(x + 1) * d, :]) for x in range(n))
        col_bound = max(operator_norm(right[:, y * d:(y + 1) * d]) for y in range(n))

        error = frobenius(left @ right - assembled.entries)
        if error > self.reconstruction_tol * assembled.scale:
            logger.warning("factorization error %.3e exceeds tolerance", error)
        logger.info("factorized n=%d d=%d: m=%d, bounds %.4g x %.4g%s", n, d, m,
                    row_bound, col_bound, " (symmetric)" if symmetric else "")
        return TwoSidedFactorization(d=d, m=m, a=a, b=b, row_bound=row_bound,
                                     col_bound=col_bound, symmetric=symmetric)

    @staticmethod
    def cb_norm_upper(fac: TwoSidedFactorization) -> float:
        return fac.row_bound * fac.col_bound

    def cb_norm_lower_sampled(self, phi: BlockMultiplier, trials: int = 1000, seed: int = 0) -> float:
        """max of ||S_phi(T)||_op / ||T||_op over T = I, J and random complex T."""
        self._require_full(phi)
        n = phi.n
        test_matrices = [np.eye(n), np.ones((n, n))]
        for t in range(trials):
            rng = np.random.default_rng([seed, t])
            test_matrices.append(complex_gaussian((n, n), rng))
        best = 0.0
        for t_matrix in test_matrices:
            denom = operator_norm(t_matrix)
            if denom > 0.0:
                best = max(best, operator_norm(schur_apply(phi, ScalarKernel(t_matrix))) / denom)
        return best

    def positivity_equivalences(self, phi: BlockMultiplier, trials: int = 100,
                                max_ampliation: int = MAX_AMPLIATION, seed: int = 0) -> PositivityReport:
        """
        Evaluate the four equivalent forms of positivity of phi.

        (a) assembled matrix PSD; (b) S_phi maps PSD kernels to PSD, tested
        with e_x e_x*, J and random G G*; (c) the m-ampliations for
        m = 2..max_ampliation do the same; (d) a symmetric Gram factorization
        exists. Falsifiers name the kernel that broke (b) and (c).
        """
        self._require_full(phi)
        n = phi.n
        report = PositivityReport()

        assembled = phi.assemble()
        check = psd_check(assembled, self.tol)
        report.verdicts["a"] = check.positive
        report.min_eig = check.min_eig

        report.verdicts["b"] = True
        candidates = []
        for x in range(n):
            e = np.zeros((n, n))
            e[x, x] = 1.0
            candidates.append((f"e_{x}", e))
        candidates.append(("J", np.ones((n, n))))
        for t in range(trials):
            rng = np.random.default_rng([seed, t])
            g = complex_gaussian((n, int(rng.integers(1, n + 1))), rng)
            candidates.append((f"random_{t}", g @ g.conj().T))
        for name, k in candidates:
            if not psd_check(HermitianMatrix(schur_apply(phi, ScalarKernel(k))), self.tol).positive:
                report.verdicts["b"] = False
                report.falsifiers["b"] = name
                break
        j_out = HermitianMatrix(schur_apply(phi, ScalarKernel.ones(n)))
        report.j_falsifies = not psd_check(j_out, self.tol).positive

        report.verdicts["c"] = True
        for m in range(2, max_ampliation + 1):
            inflated = phi.inflate(m)
            kernels = [("J", np.ones((m * n, m * n)))]
            for t in range(max(1, trials // 10)):
                rng = np.random.default_rng([seed, m, t])
                g = complex_gaussian((m * n, int(rng.integers(1, m * n + 1))), rng)
                kernels.append((f"random_{t}", g @ g.conj().T))
            for name, k in kernels:
                out = HermitianMatrix(schur_apply(inflated, ScalarKernel(k)))
                if not psd_check(out, self.tol).positive:
                    report.verdicts["c"] = False
                    report.falsifiers["c"] = f"m={m}:{name}"
                    break
            if not report.verdicts["c"]:
                break

        try:
            left = gram_factor(assembled, self.tol)
            error = frobenius(left @ left.conj().T - assembled.entries)
            report.verdicts["d"] = error <= self.reconstruction_tol * assembled.scale
        except NotPSD:
            report.verdicts["d"] = False

        if not report.consistent:
            logger.warning("positivity verdicts disagree: %s", report.verdicts)
        return report
