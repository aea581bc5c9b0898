import math

import numpy as np
from django.test import SimpleTestCase

from .cycles import (
    check_involution, coefficient_matrices, cycle_lt, default_t_grid, explicit_pm_blocks, fit_loglog_slope,
    involution, involution_matrix, proof_rayleigh_terms, proof_vectors, sweep_asymptotics, symmetry_split,
)
from .exceptions import LengthError, SpectraError, SymmetryError
from .models import LengthFunction, cycle_graph, fujiwara_weights
from .spectral import assemble_laplacian, laplacian_spectrum, lambda1, lambda1_normalized, symmetric_eigen


class CycleLengthFamilyTestCase(SimpleTestCase):
    # Test the collapsing family on C_4
    def test_c4_lengths_and_weights(self):
        l = cycle_lt(4, 0.1)
        self.assertEqual(l.as_dict(), {(1, 2): 0.1, (1, 4): 0.1, (2, 3): 0.1, (3, 4): 1.0})
        np.testing.assert_allclose(fujiwara_weights(cycle_graph(4), l).m0, [0.2, 0.2, 1.1, 1.1], rtol=1e-15)

    def test_total_m0(self):
        for n in range(3, 9):
            for t in (0.3, 1e-3):
                total = fujiwara_weights(cycle_graph(n), cycle_lt(n, t)).total_m0
                self.assertAlmostEqual(total, 2 * (1 + (n - 1) * t), delta=1e-14 * total)

    def test_nonpositive_t(self):
        with self.assertRaises(LengthError):
            cycle_lt(4, 0.0)


class InvolutionTestCase(SimpleTestCase):
    def test_c6(self):
        self.assertEqual(involution(6), {1: 4, 2: 3, 3: 2, 4: 1, 5: 6, 6: 5})

    def test_involutive_and_length_preserving(self):
        for n in range(3, 13):
            iota = involution(n)
            self.assertTrue(all(iota[iota[u]] == u for u in iota))
            check_involution(cycle_graph(n), cycle_lt(n, 0.01), iota)

    def test_commutes_with_laplacian(self):
        for n in (5, 8):
            matrix = assemble_laplacian(cycle_graph(n), cycle_lt(n, 1e-2))
            p = involution_matrix(involution(n))
            self.assertLessEqual(np.max(np.abs(p @ matrix - matrix @ p)), 1e-12 * np.linalg.norm(matrix))

    def test_rejects_non_automorphism(self):
        g = cycle_graph(5)
        with self.assertRaises(SymmetryError):
            check_involution(g, cycle_lt(5, 0.1), {1: 2, 2: 1, 3: 3, 4: 4, 5: 5})
        with self.assertRaises(SymmetryError):
            check_involution(g, LengthFunction.for_graph(g, [1, 2, 3, 4, 5]), involution(5))


class SymmetrySplitTestCase(SimpleTestCase):
    # Test that the split blocks recover the full spectrum
    def test_union_of_spectra(self):
        for n in range(4, 13):
            for t in (1e-1, 1e-3):
                g, l = cycle_graph(n), cycle_lt(n, t)
                split = symmetry_split(g, l, involution(n))
                full = laplacian_spectrum(g, l)
                np.testing.assert_allclose(split.eigenvalues(), full.eigenvalues, atol=1e-9 * full.norm)

    def test_block_orders(self):
        self.assertEqual(symmetry_split(cycle_graph(6), cycle_lt(6, 0.1), involution(6)).dims, (3, 3))
        self.assertEqual(symmetry_split(cycle_graph(5), cycle_lt(5, 0.1), involution(5)).dims, (3, 2))

    def test_explicit_blocks_match_generic_split(self):
        for n in (4, 6, 8, 10):
            for t in (0.01, 0.1):
                plus, minus = explicit_pm_blocks(n, t)
                split = symmetry_split(cycle_graph(n), cycle_lt(n, t), involution(n))
                scale = np.linalg.norm(plus) + np.linalg.norm(minus)
                np.testing.assert_allclose(
                    symmetric_eigen(plus).eigenvalues, symmetric_eigen(split.plus_block).eigenvalues, atol=1e-10 * scale
                )
                np.testing.assert_allclose(
                    symmetric_eigen(minus).eigenvalues, symmetric_eigen(split.minus_block).eigenvalues,
                    atol=1e-10 * scale,
                )

    def test_displayed_entries(self):
        t = 0.01
        plus, minus = explicit_pm_blocks(4, t)
        self.assertAlmostEqual(minus[-1, -1], 1 / t + 1 / (1 + t), places=10)
        self.assertAlmostEqual(plus[-1, -1], 1 / t - 1 / (1 + t), places=10)
        plus, _ = explicit_pm_blocks(6, 0.1)
        self.assertAlmostEqual(plus[1, 1], 50.0, places=9)
        with self.assertRaises(SymmetryError):
            explicit_pm_blocks(5, 0.1)


class ProofVectorsTestCase(SimpleTestCase):
    def test_c6_v1(self):
        t = 0.02
        v1 = proof_vectors(6, t).v1
        root = math.sqrt(2 * t)
        np.testing.assert_allclose(v1, [3 * root / 5, root / 5, -1.0], rtol=1e-15)

    def test_kernel_vector_and_orthogonality(self):
        for n in (4, 6, 8, 12):
            for t in (1e-1, 1e-3, 1e-5):
                plus, _ = explicit_pm_blocks(n, t)
                vectors = proof_vectors(n, t)
                self.assertLessEqual(np.linalg.norm(plus @ vectors.v0), 1e-10 * np.linalg.norm(plus))
                self.assertLessEqual(abs(vectors.w @ vectors.v0), 1e-14 * np.linalg.norm(vectors.w))

    def test_v1_approximates_lowest_minus_eigenvector(self):
        for n in (4, 6):
            ratios = []
            for t in (1e-2, 1e-3, 1e-4):
                _, minus = explicit_pm_blocks(n, t)
                x = symmetric_eigen(minus).eigenvectors[:, 0]
                v1 = proof_vectors(n, t).v1
                v1 = v1 / np.linalg.norm(v1)
                error = min(np.linalg.norm(x - v1), np.linalg.norm(x + v1))
                ratios.append(error / t**1.5)
            self.assertLessEqual(max(ratios), 2.0 * ratios[0] + 1e-12)

    def test_rayleigh_terms(self):
        for n in (4, 6, 10):
            for t in (1e-1, 1e-3):
                terms = proof_rayleigh_terms(n, t)
                self.assertAlmostEqual(terms.minus_v1, terms.minus_v1_closed_form, delta=1e-9 * terms.minus_v1)
                self.assertAlmostEqual(terms.plus_w, terms.plus_w_closed_form, delta=1e-9 * terms.plus_w)


class CoefficientMatricesTestCase(SimpleTestCase):
    def test_small_cases(self):
        np.testing.assert_allclose(coefficient_matrices(6).a, [[1.0, -0.5], [-0.5, 1.5]])
        b = coefficient_matrices(4).b
        np.testing.assert_allclose(b, [[2.0, 1.0], [1.0, 0.5]])
        np.testing.assert_allclose(np.linalg.eigvalsh(b), [0.0, 2.5], atol=1e-14)

    def test_definiteness_up_to_24(self):
        for n in range(4, 25, 2):
            matrices = coefficient_matrices(n)
            self.assertGreater(matrices.a_min_eigenvalue(), 1e-12)
            self.assertGreaterEqual(matrices.b_min_eigenvalue(), -1e-12)
            self.assertLessEqual(matrices.b_min_eigenvalue(), 1e-12)
            self.assertGreater(matrices.b_restricted_min_eigenvalue(), 1e-12)

    def test_null_vector(self):
        # the kernel is spanned by (-1/2, 1, ..., 1); (1/2, 1, ..., 1) is not annihilated
        for n in range(4, 25, 2):
            matrices = coefficient_matrices(n)
            self.assertLessEqual(np.linalg.norm(matrices.b @ matrices.b_null_vector), 1e-13)
        b = coefficient_matrices(8).b
        self.assertGreater(np.linalg.norm(b @ np.array([0.5, 1.0, 1.0, 1.0])), 1.0)


class LogLogFitTestCase(SimpleTestCase):
    def test_linear_points(self):
        self.assertAlmostEqual(fit_loglog_slope([(1, 2), (10, 20), (100, 200)]).slope, 1.0, places=12)

    def test_inverse_square(self):
        fit = fit_loglog_slope([(t, 7 / t**2) for t in (1e-1, 1e-2, 1e-3, 1e-4)])
        self.assertAlmostEqual(fit.slope, -2.0, delta=1e-12)
        self.assertLess(fit.max_residual, 1e-10)

    def test_bad_input(self):
        with self.assertRaises(SpectraError):
            fit_loglog_slope([(1, 2), (2, 4)])
        with self.assertRaises(SpectraError):
            fit_loglog_slope([(1, 2), (2, -4), (3, 6)])


class SweepTestCase(SimpleTestCase):
    # Test the divergence exponents
    def test_exponents(self):
        for n in (4, 6, 8):
            report = sweep_asymptotics(n, default_t_grid(1e-3, 1e-6, 4), drop=0)
            self.assertTrue(-1.05 <= report.slope_lambda1.slope <= -0.95, report.slope_lambda1)
            self.assertTrue(-2.1 <= report.slope_lambda2.slope <= -1.9, report.slope_lambda2)

    def test_lambda1_t_limit(self):
        for n in (4, 6):
            report = sweep_asymptotics(n, (1e-4, 1e-5, 1e-6), drop=0)
            target = 2 / (n - 1)
            errors = [abs(r.lambda1_t - target) for r in report.records]
            self.assertTrue(errors[0] >= errors[1] >= errors[2], errors)
            self.assertLessEqual(report.limit_error, 0.05)
            self.assertTrue(report.passed, report.checks())

    def test_lambda1_t_limit_for_triangle(self):
        g = cycle_graph(3)
        self.assertAlmostEqual(lambda1(g, cycle_lt(3, 1e-5)) * 1e-5, 1.0, delta=0.01)

    def test_normalized_value_diverges(self):
        for n in (4, 6):
            report = sweep_asymptotics(n, default_t_grid(1e-2, 1e-4, 5), drop=0)
            self.assertTrue(report.normalized_increasing())
            value = lambda1_normalized(cycle_graph(n), cycle_lt(n, 1e-4))
            self.assertGreaterEqual(value, 0.9 * 8 / ((n - 1) * 1e-4))

    def test_grid_validation(self):
        with self.assertRaises(SpectraError):
            sweep_asymptotics(4, (1e-3, 1e-2, 1e-4))
        with self.assertRaises(SpectraError):
            sweep_asymptotics(4, (1e-3, 1e-4), drop=0)
        with self.assertLogs('spectra.cycles', level='WARNING'):
            sweep_asymptotics(4, (0.5, 0.2, 0.1, 0.05), drop=0)

    def test_default_grid(self):
        grid = default_t_grid()
        self.assertEqual(len(grid), 51)
        self.assertAlmostEqual(grid[0], 1e-1)
        self.assertAlmostEqual(grid[-1], 1e-6)
        self.assertTrue(all(b < a for a, b in zip(grid, grid[1:])))
