import unittest

import math
import sys
sys.path.append('..')
import numpy as np
from numpy.testing import assert_allclose

from ewglab.errors import GridMismatchError
from ewglab.relativistic import (MomentumGrid, MomentumWavefunction, adjoint_asymmetry, asymmetry_closed_form,
                                 fit_slope, invariant_inner, limit_study, nonrelativistic_position_element,
                                 position_element, random_wavefunction)


class TestMomentumGrid(unittest.TestCase):

    def test_quadrature(self):
        grid = MomentumGrid.build(10.0)
        self.assertEqual(grid.size, 64 * 16)
        self.assertAlmostEqual(float(np.sum(grid.weights)), 20.0, places=12)
        self.assertAlmostEqual(float(np.sum(grid.weights * np.exp(-grid.p**2))), math.sqrt(math.pi), places=12)
        self.assertTrue(np.all(np.diff(grid.p) > 0))

    def test_validation(self):
        with self.assertRaises(ValueError):
            MomentumGrid.build(0.0)
        with self.assertRaises(ValueError):
            MomentumGrid.build(1.0, panels=0)
        with self.assertRaises(ValueError):
            MomentumGrid.build(1.0, order=1)

    def test_derivative(self):
        grid = MomentumGrid.build(2.0, panels=4, order=8)
        assert_allclose(grid.derivative_matrix @ grid.p**3, 3 * grid.p**2, atol=1e-10)
        self.assertIs(grid.derivative_matrix, grid.derivative_matrix)
        smooth = MomentumGrid.for_gaussian(0.0, 1.0)
        assert_allclose(smooth.derivative_matrix @ np.exp(-smooth.p**2 / 2),
                        -smooth.p * np.exp(-smooth.p**2 / 2), atol=1e-10)

    def test_same_as(self):
        a = MomentumGrid.build(5.0)
        self.assertTrue(a.same_as(MomentumGrid.build(5.0)))
        self.assertFalse(a.same_as(MomentumGrid.build(6.0)))
        self.assertAlmostEqual(MomentumGrid.for_gaussian(-2.0, 0.5).cutoff, 8.0)


class TestWavefunctions(unittest.TestCase):

    def setUp(self):
        self.grid = MomentumGrid.for_gaussian(1.0, 1.0)
        self.f = MomentumWavefunction.gaussian(self.grid, 2.0, 1.0, 1.0)

    def test_validation(self):
        with self.assertRaises(ValueError):
            MomentumWavefunction.gaussian(self.grid, 0.0)
        with self.assertRaises(ValueError):
            MomentumWavefunction.gaussian(self.grid, 1.0, width=0.0)
        with self.assertRaises(ValueError):
            MomentumWavefunction(self.grid, np.zeros(3, dtype=np.complex128), 1.0)

    def test_mismatch(self):
        with self.assertRaises(GridMismatchError):
            invariant_inner(self.f, self.f.with_mass(3.0))
        other = MomentumWavefunction.gaussian(MomentumGrid.build(20.0), 2.0)
        with self.assertRaises(GridMismatchError):
            position_element(self.f, other)
        with self.assertRaises(GridMismatchError):
            self.f + other

    def test_omega(self):
        assert_allclose(self.f.omega, np.sqrt(4.0 + self.grid.p**2))

    def test_random(self):
        grid = MomentumGrid.build(20.0)
        a = random_wavefunction(np.random.default_rng(5), grid, 1.0)
        b = random_wavefunction(np.random.default_rng(5), grid, 1.0)
        assert_allclose(a.values, b.values)
        with self.assertRaises(ValueError):
            random_wavefunction(np.random.default_rng(5), grid, 1.0, terms=0)


class TestInnerProduct(unittest.TestCase):

    def test_properties(self):
        rng = np.random.default_rng(99)
        grid = MomentumGrid.build(20.0)
        for _ in range(20):
            f = random_wavefunction(rng, grid, 1.0)
            g = random_wavefunction(rng, grid, 1.0)
            self.assertLess(abs(invariant_inner(f, g) - invariant_inner(g, f).conjugate()), 1e-12)
            self.assertGreater(invariant_inner(f, f).real, 0.0)
            self.assertEqual(invariant_inner(f, f).imag, 0.0)

    def test_heavy_particle(self):
        grid = MomentumGrid.for_gaussian(0.0, 1.0)
        f = MomentumWavefunction.gaussian(grid, 100.0)
        self.assertAlmostEqual(invariant_inner(f, f).real / (math.sqrt(math.pi) / 200), 1.0, places=2)


class TestAsymmetry(unittest.TestCase):

    def test_closed_form(self):
        rng = np.random.default_rng(17)
        grid = MomentumGrid.build(20.0)
        for mass in (0.5, 1.0, 4.0):
            f = random_wavefunction(rng, grid, mass)
            g = random_wavefunction(rng, grid, mass)
            asym = adjoint_asymmetry(f, g)
            closed = asymmetry_closed_form(f, g)
            self.assertLess(abs(asym - closed), 1e-6 * abs(closed))
        # scales with hbar
        self.assertAlmostEqual(asymmetry_closed_form(f, g, hbar=2.0), 2 * closed)

    def test_self_asymmetry_is_imaginary(self):
        grid = MomentumGrid.for_gaussian(1.0, 1.0)
        f = MomentumWavefunction.gaussian(grid, 1.0, 1.0, 1.0)
        asym = adjoint_asymmetry(f, f)
        self.assertEqual(asym.real, 0.0)
        self.assertGreater(abs(asym), 1e-3)

    def test_even_amplitudes(self):
        grid = MomentumGrid.for_gaussian(0.0, 1.0)
        even = MomentumWavefunction.gaussian(grid, 1.0)
        self.assertLess(abs(adjoint_asymmetry(even, even)), 1e-10)
        odd = MomentumWavefunction.gaussian(grid, 1.0, hermite=1)
        self.assertLess(abs(invariant_inner(even, odd)), 1e-12)

    def test_tail_warning(self):
        grid = MomentumGrid.build(3.0)
        f = MomentumWavefunction.gaussian(grid, 1.0)
        with self.assertLogs('ewglab.relativistic', level='WARNING'):
            position_element(f, f)

    def test_nonrelativistic_limit(self):
        grid = MomentumGrid.for_gaussian(1.0, 1.0)
        f = MomentumWavefunction.gaussian(grid, 256.0, 1.0, 1.0)
        g = MomentumWavefunction.gaussian(grid, 256.0, 1.0, 1.0, hermite=1)
        nonrelativistic = nonrelativistic_position_element(f, g)
        self.assertLess(abs(position_element(f, g) - nonrelativistic), 1e-3 * abs(nonrelativistic))


class TestLimitStudy(unittest.TestCase):

    def setUp(self):
        grid = MomentumGrid.for_gaussian(0.2, 0.2)
        self.f = MomentumWavefunction.gaussian(grid, 1.0, 0.2, 0.2)

    def test_slope(self):
        study = limit_study(self.f, self.f, [1.0, 2.0, 4.0, 8.0, 16.0])
        self.assertAlmostEqual(study.slope, -2.0, delta=0.1)
        self.assertTrue(study.monotone)
        assert_allclose(study.masses, [1, 2, 4, 8, 16])
        self.assertEqual(study.ratios.shape, (5,))

    def test_fast_packet(self):
        # m ≫ |p| only sets in past m = 16 for a packet at p0 = 1
        grid = MomentumGrid.for_gaussian(1.0, 1.0)
        f = MomentumWavefunction.gaussian(grid, 1.0, 1.0, 1.0)
        light = limit_study(f, f, [1.0, 2.0, 4.0, 8.0, 16.0])
        self.assertTrue(light.monotone)
        self.assertGreater(light.slope, -1.9)
        heavy = limit_study(f, f, [16.0, 32.0, 64.0, 128.0, 256.0])
        self.assertAlmostEqual(heavy.slope, -2.0, delta=0.1)

    def test_masses_validated(self):
        with self.assertRaises(ValueError):
            limit_study(self.f, self.f, [4.0, 2.0])
        with self.assertRaises(ValueError):
            limit_study(self.f, self.f, [])
        with self.assertRaises(ValueError):
            limit_study(self.f, self.f, [0.0, 1.0])

    def test_fit_slope(self):
        masses = np.array([1.0, 2.0, 4.0, 8.0])
        self.assertAlmostEqual(fit_slope(masses, 3.0 * masses**-2), -2.0, places=12)
        self.assertIsNone(fit_slope([1.0], [1.0]))
        self.assertIsNone(fit_slope([1.0, 2.0], [1.0, 0.0]))


if __name__ == '__main__':
    unittest.main()
