import unittest

import numpy as np

from src.engine.schur_engine import SchurEngine
from src.entities.errors import UnspecifiedEntry
from src.entities.multiplier import BlockMultiplier, PartialBlockMultiplier, ScalarKernel, schur_apply
from src.entities.pattern import Pattern
from src.utils.linalg import HermitianMatrix, complex_gaussian, operator_norm, random_hermitian, random_psd


def general_multiplier(n, d, rng):
    """Full multiplier with Hermitian but indefinite assembled matrix."""
    return BlockMultiplier.from_matrix(random_hermitian(n * d, rng), n, d)


class TestFactorize(unittest.TestCase):
    def setUp(self):
        self.engine = SchurEngine()
        self.rng = np.random.default_rng(17)

    def test_all_ones(self):
        phi = BlockMultiplier.from_matrix(np.ones((2, 2)), 2, 1)
        fac = self.engine.factorize(phi)
        self.assertEqual(fac.m, 1)
        self.assertTrue(fac.symmetric)
        for x in range(2):
            for y in range(2):
                self.assertAlmostEqual(fac.reconstruct(x, y)[0, 0].real, 1.0, places=12)
        self.assertAlmostEqual(SchurEngine.cb_norm_upper(fac), 1.0, places=12)

    def test_identity(self):
        fac = self.engine.factorize(BlockMultiplier.identity(3, 2))
        self.assertAlmostEqual(SchurEngine.cb_norm_upper(fac), 1.0, places=12)

    def test_diagonal_multiplier(self):
        for c in (3.0, -3.0):
            phi = BlockMultiplier.from_matrix(c * np.eye(3), 3, 1)
            fac = self.engine.factorize(phi)
            upper = SchurEngine.cb_norm_upper(fac)
            lower = self.engine.cb_norm_lower_sampled(phi, trials=50)
            self.assertGreaterEqual(upper, 3.0 - 1e-10)
            self.assertAlmostEqual(lower, 3.0, places=10)
            self.assertEqual(fac.symmetric, c > 0)

    def test_symmetric_path_for_psd(self):
        phi = BlockMultiplier.from_matrix(random_psd(6, self.rng, rank=4), 3, 2)
        fac = self.engine.factorize(phi)
        self.assertTrue(fac.symmetric)
        for i in range(fac.m):
            for y in range(3):
                self.assertTrue(np.array_equal(fac.b[i, y], fac.a[i, y].conj().T))

    def test_reconstruction_on_random_multipliers(self):
        for _ in range(15):
            n, d = int(self.rng.integers(1, 8)), int(self.rng.integers(1, 4))
            phi = general_multiplier(n, d, self.rng)
            fac = self.engine.factorize(phi)
            scale = phi.assemble().scale
            self.assertEqual(fac.a.shape, (fac.m, n, d, d))
            for x in range(n):
                for y in range(n):
                    err = np.linalg.norm(fac.reconstruct(x, y) - phi.block(x, y))
                    self.assertLessEqual(err, 1e-8 * scale)

    def test_bounds_match_definition(self):
        phi = general_multiplier(4, 2, self.rng)
        fac = self.engine.factorize(phi)
        rows = max(operator_norm(sum(fac.a[i, x] @ fac.a[i, x].conj().T for i in range(fac.m)))
                   for x in range(4))
        cols = max(operator_norm(sum(fac.b[i, y].conj().T @ fac.b[i, y] for i in range(fac.m)))
                   for y in range(4))
        self.assertAlmostEqual(fac.row_bound, np.sqrt(rows), places=8)
        self.assertAlmostEqual(fac.col_bound, np.sqrt(cols), places=8)

    def test_partial_pattern_rejected(self):
        pattern = Pattern.from_edges(3, [(0, 1), (1, 2)])
        phi = PartialBlockMultiplier(pattern, 1, {p: [[1.0 if p[0] == p[1] else 0.5]] for p in pattern.pairs})
        with self.assertRaises(UnspecifiedEntry):
            self.engine.factorize(phi)


class TestNormBound(unittest.TestCase):
    def setUp(self):
        self.engine = SchurEngine()
        self.rng = np.random.default_rng(23)

    def test_upper_bound_dominates_random_kernels(self):
        violations = 0
        for _ in range(8):
            n, d = int(self.rng.integers(2, 6)), int(self.rng.integers(1, 3))
            phi = general_multiplier(n, d, self.rng)
            upper = SchurEngine.cb_norm_upper(self.engine.factorize(phi))
            for _ in range(100):
                t = complex_gaussian((n, n), self.rng)
                if operator_norm(schur_apply(phi, ScalarKernel(t))) > upper * operator_norm(t) + 1e-8:
                    violations += 1
            lower = self.engine.cb_norm_lower_sampled(phi, trials=100, seed=1)
            self.assertLessEqual(lower, upper + 1e-8)
        self.assertEqual(violations, 0)

    def test_lower_bound_is_deterministic(self):
        phi = general_multiplier(3, 2, self.rng)
        self.assertEqual(self.engine.cb_norm_lower_sampled(phi, trials=20, seed=5),
                         self.engine.cb_norm_lower_sampled(phi, trials=20, seed=5))


class TestPositivityEquivalences(unittest.TestCase):
    def setUp(self):
        self.engine = SchurEngine()
        self.rng = np.random.default_rng(31)

    def test_gram_generated_multiplier(self):
        g = complex_gaussian((6, 3), self.rng)
        phi = BlockMultiplier.from_matrix(HermitianMatrix(g @ g.conj().T), 3, 2)
        report = self.engine.positivity_equivalences(phi, trials=20)
        self.assertEqual(report.verdicts, {"a": True, "b": True, "c": True, "d": True})
        self.assertTrue(report.consistent)
        self.assertFalse(report.j_falsifies)
        self.assertTrue(all(all(row.values()) for row in report.agreement.values()))

    def test_negative_diagonal_block(self):
        a = np.eye(6)
        a[2:4, 2:4] = -np.eye(2)
        report = self.engine.positivity_equivalences(BlockMultiplier.from_matrix(a, 3, 2), trials=10)
        self.assertEqual(report.verdicts, {"a": False, "b": False, "c": False, "d": False})
        self.assertEqual(report.falsifiers["b"], "e_1")

    def test_j_kernel_falsifies_every_indefinite_instance(self):
        for _ in range(10):
            phi = general_multiplier(int(self.rng.integers(2, 6)), int(self.rng.integers(1, 3)), self.rng)
            report = self.engine.positivity_equivalences(phi, trials=5, max_ampliation=2)
            self.assertFalse(report.verdicts["a"])
            self.assertEqual(report.verdicts["a"], report.verdicts["d"])
            self.assertTrue(report.j_falsifies)

    def test_report_json(self):
        phi = BlockMultiplier.identity(2, 1)
        doc = self.engine.positivity_equivalences(phi, trials=5).to_json()
        self.assertTrue(doc["consistent"])
        self.assertEqual(sorted(doc["agreement"]), ["a", "b", "c", "d"])

    def test_all_ones_kernel_is_exact(self):
        phi = general_multiplier(3, 2, self.rng)
        self.assertTrue(np.array_equal(schur_apply(phi, ScalarKernel.ones(3)), phi.assemble().entries))


if __name__ == '__main__':
    unittest.main()
