import unittest
from fractions import Fraction
from itertools import combinations

import numpy as np
from numpy.testing import assert_allclose

from src.entities.errors import AsymmetricInput, DimensionMismatch, NonConvergence, NotPSD
from src.utils.linalg import (HermitianMatrix, complex_gaussian, eigh, gram_factor, pseudo_inverse,
                              psd_check, random_hermitian, random_psd, rank_one_decompose)


def _det(rows):
    """Exact determinant by fraction Gaussian elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] / a[col][col]
            for c in range(col, n):
                a[r][c] -= factor * a[col][c]
    return det


def _psd_by_minors(m):
    """A real symmetric matrix is PSD iff every principal minor is >= 0."""
    n = len(m)
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            if _det([[Fraction(m[i][j]) for j in idx] for i in idx]) < 0:
                return False
    return True


class TestHermitianMatrix(unittest.TestCase):
    def test_symmetrizes_small_asymmetry(self):
        h = HermitianMatrix([[1.0, 2.0 + 1e-12], [2.0, 1.0]])
        self.assertGreater(h.correction, 0.0)
        self.assertTrue(np.array_equal(h.entries, h.entries.conj().T))

    def test_rejects_large_asymmetry(self):
        with self.assertRaises(AsymmetricInput):
            HermitianMatrix([[1.0, 2.0], [0.0, 1.0]])

    def test_exact_input_left_untouched(self):
        a = np.array([[2.0, 1j], [-1j, 3.0]])
        h = HermitianMatrix(a)
        self.assertEqual(h.correction, 0.0)
        self.assertTrue(np.array_equal(h.entries, a))

    def test_entries_are_read_only(self):
        h = HermitianMatrix(np.eye(2))
        with self.assertRaises(ValueError):
            h.entries[0, 0] = 5.0

    def test_rejects_non_square_and_non_finite(self):
        with self.assertRaises(DimensionMismatch):
            HermitianMatrix(np.ones((2, 3)))
        with self.assertRaises(ValueError):
            HermitianMatrix([[1.0, np.nan], [np.nan, 1.0]])


class TestEigh(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_diagonal_input(self):
        dec = eigh(HermitianMatrix(np.diag([3.0, -1.0, 2.0])))
        assert_allclose(dec.values, [-1.0, 2.0, 3.0])

    def test_two_by_two_by_hand(self):
        # eigenvalues of [[1, t], [t, 1]] are 1 - t and 1 + t
        dec = eigh(HermitianMatrix([[1.0, 0.9], [0.9, 1.0]]))
        assert_allclose(dec.values, [0.1, 1.9], atol=1e-14)

    def test_residual_and_orthonormality(self):
        for dim in (1, 2, 3, 5, 8, 13, 21, 32):
            for _ in range(5):
                h = random_hermitian(dim, self.rng)
                dec = eigh(h)
                a = h.entries
                scale = h.scale
                residual = np.linalg.norm(a @ dec.vectors - dec.vectors * dec.values[None, :])
                self.assertLessEqual(residual, 1e-12 * scale)
                gram = dec.vectors.conj().T @ dec.vectors
                self.assertLessEqual(np.linalg.norm(gram - np.eye(dim)), 1e-12 * dim)
                self.assertTrue(np.all(np.diff(dec.values) >= 0.0))

    def test_matches_numpy(self):
        for dim in (4, 9, 16):
            h = random_hermitian(dim, self.rng)
            assert_allclose(eigh(h).values, np.linalg.eigvalsh(h.entries), atol=1e-10 * h.scale)

    def test_zero_matrix(self):
        dec = eigh(HermitianMatrix(np.zeros((3, 3))))
        assert_allclose(dec.values, np.zeros(3))
        assert_allclose(dec.vectors, np.eye(3))

    def test_sweep_budget_exhausted(self):
        with self.assertRaises(NonConvergence):
            eigh(HermitianMatrix([[1.0, 1.0], [1.0, 1.0]]), max_sweeps=0)

    def test_subnormal_off_diagonal_entries(self):
        a = np.array([[1.0, 0.5, 1e-310j], [0.5, 2.0, 3e-29 + 1e-29j], [0.0, 0.0, 3.0]])
        a[2, 0], a[2, 1] = np.conj(a[0, 2]), np.conj(a[1, 2])
        m = HermitianMatrix(a)
        dec = eigh(m)
        self.assertTrue(np.all(np.isfinite(dec.values)))
        self.assertTrue(np.all(np.isfinite(dec.vectors)))
        residual = np.linalg.norm(m.entries @ dec.vectors - dec.vectors * dec.values[None, :])
        self.assertLessEqual(residual, 1e-12 * m.scale)
        assert_allclose(dec.values, np.linalg.eigvalsh(m.entries), atol=1e-12)

        lone = eigh(HermitianMatrix([[1.0, 1e-310 + 1e-310j], [1e-310 - 1e-310j, 2.0]]))
        assert_allclose(lone.values, [1.0, 2.0])

    def test_extreme_scales(self):
        h = random_hermitian(12, self.rng)
        for factor in (1e-300, 1e-150, 1e150, 1e300):
            scaled = HermitianMatrix(h.entries * factor)
            dec = eigh(scaled)
            self.assertTrue(np.all(np.isfinite(dec.vectors)))
            assert_allclose(dec.values / factor, np.linalg.eigvalsh(h.entries), atol=1e-10 * h.norm)

    def test_positive_definite_blocks_stay_finite(self):
        for _ in range(20):
            g = complex_gaussian((9, 9), self.rng)
            c = HermitianMatrix(g @ g.conj().T + 10.0 * np.eye(9))
            dec = eigh(c)
            self.assertTrue(np.all(np.isfinite(dec.vectors)))
            p = pseudo_inverse(c).entries
            assert_allclose(p @ c.entries, np.eye(9), atol=1e-10)

    def test_shared_decomposition(self):
        m = random_hermitian(6, self.rng)
        dec = eigh(m)
        shared, fresh = psd_check(m, decomposition=dec), psd_check(m)
        self.assertEqual(shared.positive, fresh.positive)
        self.assertEqual(shared.min_eig, fresh.min_eig)
        psd = random_psd(6, self.rng, rank=3)
        assert_allclose(gram_factor(psd, decomposition=eigh(psd)), gram_factor(psd))


class TestPsdCheck(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_witness_for_indefinite(self):
        m = HermitianMatrix([[1.0, 2.0], [2.0, 1.0]])
        verdict = psd_check(m)
        self.assertFalse(verdict)
        self.assertAlmostEqual(verdict.min_eig, -1.0, places=12)
        w = verdict.witness
        assert_allclose(m.entries @ w, -1.0 * w, atol=1e-12)
        self.assertAlmostEqual(np.linalg.norm(w), 1.0, places=12)

    def test_rank_deficient_is_positive(self):
        self.assertTrue(psd_check(HermitianMatrix(np.ones((4, 4)))))

    def test_negative_tol_rejected(self):
        with self.assertRaises(ValueError):
            psd_check(HermitianMatrix(np.eye(2)), tol=-1.0)

    def test_agrees_with_principal_minor_oracle(self):
        disagreements = 0
        for trial in range(150):
            dim = int(self.rng.integers(1, 7))
            if trial % 2 == 0:
                b = self.rng.integers(-2, 3, size=(dim, int(self.rng.integers(1, dim + 1))))
                m = b @ b.T
            else:
                s = self.rng.integers(-3, 4, size=(dim, dim))
                m = s + s.T
            expected = _psd_by_minors(m.tolist())
            if psd_check(HermitianMatrix(m.astype(float))).positive != expected:
                disagreements += 1
        self.assertEqual(disagreements, 0)


class TestFactorizations(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(5)

    def test_gram_factor_reconstructs(self):
        m = random_psd(6, self.rng, rank=3)
        g = gram_factor(m)
        self.assertEqual(g.shape, (6, 3))
        assert_allclose(g @ g.conj().T, m.entries, atol=1e-10 * m.scale)
        norms = np.linalg.norm(g, axis=0)
        self.assertTrue(np.all(np.diff(norms) <= 1e-12))

    def test_gram_factor_rejects_indefinite(self):
        with self.assertRaises(NotPSD):
            gram_factor(HermitianMatrix(np.diag([1.0, -1.0])))

    def test_rank_one_decomposition_sums_back(self):
        m = random_psd(5, self.rng)
        parts = rank_one_decompose(m)
        total = sum(np.outer(r, r.conj()) for r in parts)
        assert_allclose(total, m.entries, atol=1e-10 * m.scale)

    def test_penrose_identities(self):
        g = self.rng.standard_normal((5, 2)) + 1j * self.rng.standard_normal((5, 2))
        a = HermitianMatrix(g @ np.diag([2.0, -3.0]) @ g.conj().T)
        p = pseudo_inverse(a).entries
        m = a.entries
        tol = 1e-9 * max(1.0, np.linalg.norm(m)) * max(1.0, np.linalg.norm(p))
        assert_allclose(m @ p @ m, m, atol=tol)
        assert_allclose(p @ m @ p, p, atol=tol)
        assert_allclose((m @ p).conj().T, m @ p, atol=tol)
        assert_allclose((p @ m).conj().T, p @ m, atol=tol)

    def test_pseudo_inverse_of_invertible(self):
        a = HermitianMatrix([[2.0, 0.0], [0.0, 4.0]])
        assert_allclose(pseudo_inverse(a).entries, np.diag([0.5, 0.25]), atol=1e-14)


if __name__ == '__main__':
    unittest.main()
