import unittest

import sys
sys.path.append('..')
import numpy as np
from numpy.testing import assert_allclose

from ewglab.errors import NotDensityMatrixError, NotHermitianError, NotProjectionError, RankDeficiencyError
from ewglab.linalg import (DensityMatrix, Projection, as_matrix, commutator, eig_hermitian, expm_i,
                           gram_matrix, gram_schmidt, is_density_matrix, is_hermitian, is_unitary, lift,
                           max_norm)
from ewglab.relative_state import random_density, random_hermitian


class TestMatrices(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_as_matrix(self):
        self.assertEqual(as_matrix([[1, 2], [3, 4]]).dtype, np.complex128)
        with self.assertRaises(ValueError):
            as_matrix([1, 2, 3])
        with self.assertRaises(ValueError):
            as_matrix(np.ones((2, 3)))
        with self.assertRaises(ValueError):
            as_matrix([[np.nan, 0], [0, 1]])

    def test_hermitian(self):
        h = random_hermitian(self.rng, 5)
        self.assertTrue(is_hermitian(h))
        self.assertFalse(is_hermitian(h + 1e-6j * np.eye(5)))
        with self.assertRaises(ValueError):
            is_hermitian(h, tol=0)

    def test_eig_hermitian(self):
        h = random_hermitian(self.rng, 6)
        values, vectors = eig_hermitian(h)
        self.assertTrue(np.all(np.diff(values) >= 0))
        assert_allclose(vectors @ np.diag(values) @ vectors.conj().T, h, atol=1e-12)
        with self.assertRaises(NotHermitianError):
            eig_hermitian(np.array([[0, 1], [0, 0]]))

    def test_expm_i(self):
        h = random_hermitian(self.rng, 4)
        u = expm_i(h, 0.7)
        self.assertTrue(is_unitary(u))
        assert_allclose(u, np.linalg.matrix_power(expm_i(h, 0.1), 7), atol=1e-12)
        assert_allclose(expm_i(h, 0.0), np.eye(4), atol=1e-14)
        # group property
        assert_allclose(expm_i(h, 0.3) @ expm_i(h, 0.4), u, atol=1e-12)
        # exp(iσ_x π/2) = iσ_x
        sigma_x = np.array([[0, 1], [1, 0]])
        assert_allclose(expm_i(sigma_x, np.pi / 2), 1j * sigma_x, atol=1e-14)

    def test_commutator_and_lift(self):
        a = random_hermitian(self.rng, 3)
        self.assertEqual(max_norm(commutator(a, a)), 0.0)
        lifted = lift(a, 3)
        self.assertEqual(lifted.shape, (9, 9))
        assert_allclose(lifted[3:6, 3:6], a)
        self.assertEqual(max_norm(lifted[0:3, 3:6]), 0.0)

    def test_gram_schmidt(self):
        vs = [self.rng.normal(size=4) + 1j * self.rng.normal(size=4) for _ in range(3)]
        basis = gram_schmidt(vs)
        assert_allclose(gram_matrix(basis), np.eye(3), atol=1e-12)
        # same span as the input
        q = np.column_stack(basis)
        for v in vs:
            assert_allclose(q @ (q.conj().T @ v), v, atol=1e-12)
        with self.assertRaises(RankDeficiencyError):
            gram_schmidt([vs[0], vs[1], vs[0] + 2 * vs[1]])
        with self.assertRaises(RankDeficiencyError):
            gram_schmidt([np.zeros(3)])


class TestDensityMatrix(unittest.TestCase):

    def test_from_vector(self):
        rho = DensityMatrix.from_vector([1, 1j])
        self.assertAlmostEqual(rho.trace, 1.0, places=14)
        self.assertAlmostEqual(rho.purity, 1.0, places=14)
        self.assertAlmostEqual(rho.expectation(np.diag([1, 0])).real, 0.5, places=14)

    def test_validation(self):
        with self.assertRaises(NotDensityMatrixError):
            DensityMatrix(np.diag([0.5, 0.6]))
        with self.assertRaises(NotDensityMatrixError):
            DensityMatrix(np.diag([1.5, -0.5]))
        with self.assertRaises(NotHermitianError):
            DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]))
        self.assertFalse(is_density_matrix(np.diag([1.5, -0.5])))
        self.assertTrue(is_density_matrix(np.eye(3) / 3))

    def test_read_only(self):
        rho = DensityMatrix(np.eye(2) / 2)
        with self.assertRaises(ValueError):
            rho.matrix[0, 0] = 1.0

    def test_random(self):
        rng = np.random.default_rng(3)
        for dim in (1, 2, 7):
            rho = random_density(rng, dim)
            self.assertTrue(is_density_matrix(rho.matrix))
        self.assertAlmostEqual(random_density(rng, 5, rank=1).purity, 1.0, places=10)


class TestProjection(unittest.TestCase):

    def test_coordinate(self):
        p = Projection.coordinate(4, [0, 2])
        self.assertEqual(p.rank, 2)
        assert_allclose(p.matrix + p.complement().matrix, np.eye(4))

    def test_onto(self):
        p = Projection.onto([[1, 1, 0], [0, 1, 1]])
        self.assertEqual(p.rank, 2)
        assert_allclose(p.matrix @ np.array([1, 2, 1]), [1, 2, 1], atol=1e-12)

    def test_validation(self):
        with self.assertRaises(NotProjectionError):
            Projection(np.diag([1.0, 0.5]))
        with self.assertRaises(NotProjectionError):
            Projection(np.array([[1, 1], [0, 0]]))


if __name__ == '__main__':
    unittest.main()
