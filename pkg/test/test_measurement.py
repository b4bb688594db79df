import unittest

import math
import sys
sys.path.append('..')
import numpy as np
from numpy.testing import assert_allclose

from ewglab.enums import MeasurementQuality, Record, Spin
from ewglab.errors import EmptyBranchError, NotEigenvectorError
from ewglab.linalg import DensityMatrix, Projection, expm_i, gram_matrix, is_unitary, max_norm
from ewglab.measurement import (PAULI_X, MeasurementModel, build_A_operators, conditional_spin_likelihood,
                                eigen_system,
                                epr_scenario, evolve, evolve_closed_form, expected_spectrum, free_eigenbasis,
                                free_propagator, hamiltonian, interaction_block, interaction_phase,
                                measurement_quality, propagator, propagator_oracle, record_likelihoods,
                                record_projection, spin_likelihood)

PLUS = DensityMatrix.from_vector([1, 1])
THETAS = (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2)


class TestModel(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(ValueError):
            MeasurementModel.spin(0.3, T_m=0.0)
        with self.assertRaises(ValueError):
            MeasurementModel(Projection.coordinate(2, [0]), Projection.coordinate(2, [0]), 0.3, 1.0)
        with self.assertRaises(ValueError):
            MeasurementModel(Projection.coordinate(2, [0]), Projection.coordinate(2, [1]), 0.3, 1.0, PAULI_X)
        model = MeasurementModel.spin(0.3)
        self.assertEqual(model.n_sub, 2)
        self.assertEqual(model.dim, 6)
        self.assertAlmostEqual(model.rate, math.pi / 2)
        with self.assertRaises(ValueError):
            model.H0[0, 0] = 1.0

    def test_a_operators(self):
        theta = 0.3
        a1, a2 = build_A_operators(MeasurementModel.spin(theta))
        assert_allclose(a1 @ a1 + a2 @ a2, np.eye(2), atol=1e-15)
        assert_allclose(a1 @ a2, math.cos(theta) * math.sin(theta) * np.eye(2), atol=1e-15)
        a1, a2 = build_A_operators(MeasurementModel.spin(0.0))
        assert_allclose(a1, np.diag([1.0, 0.0]))

    def test_interaction_phase(self):
        self.assertEqual(interaction_phase(-1.0, 2.0), 0.0)
        self.assertAlmostEqual(interaction_phase(1.0, 2.0), math.pi / 4)
        self.assertAlmostEqual(interaction_phase(5.0, 2.0), math.pi / 2)
        with self.assertRaises(ValueError):
            interaction_phase(0.5, 0.0)

    def test_hamiltonian(self):
        model = MeasurementModel.spin(math.pi / 8, 1.0, (0.3, -0.2))
        for t in (-0.5, 0.0, 0.5, 1.0, 1.5):
            h = hamiltonian(model, t)
            self.assertLess(max_norm(h - h.conj().T), 1e-15)
        # interaction only inside [0, T_m]
        assert_allclose(hamiltonian(model, 1.5) - hamiltonian(model, -0.5), 0)
        assert_allclose(hamiltonian(model, 0.5) - hamiltonian(model, 1.5), interaction_block(model))
        assert_allclose(hamiltonian(model, 0.5, reverse_interaction=True) - hamiltonian(model, 1.5),
                        -interaction_block(model))


class TestPropagator(unittest.TestCase):

    def test_against_oracle(self):
        for theta in THETAS:
            for energies in ((0.0, 0.0), (0.7, -0.4)):
                model = MeasurementModel.spin(theta, 1.0, energies)
                for t in np.linspace(-0.25, 2.0, 33):
                    u = propagator(model, float(t))
                    self.assertTrue(is_unitary(u))
                    self.assertLess(max_norm(u - propagator_oracle(model, float(t))), 1e-9)

    def test_displayed_form(self):
        model = MeasurementModel.spin(math.pi / 8)
        k = interaction_block(model)
        for t in np.linspace(0.0, 1.0, 9):
            expected = free_propagator(model, t) @ expm_i(k, t).conj().T
            self.assertLess(max_norm(propagator(model, t) - expected), 1e-9)

    def test_free_evolution(self):
        model = MeasurementModel.spin(0.4, 1.0, (1.0, 2.0))
        assert_allclose(propagator(model, 0.0), np.eye(6), atol=1e-15)
        assert_allclose(propagator(model, -0.3), free_propagator(model, -0.3), atol=1e-15)


class TestSpectrum(unittest.TestCase):

    def test_spectrum(self):
        for energies in ((0.0, 0.0), (0.5, -1.0)):
            model = MeasurementModel.spin(math.pi / 8, 1.0, energies)
            values = np.linalg.eigvalsh(hamiltonian(model, 0.5))
            assert_allclose(values, expected_spectrum(model), atol=1e-9)

    def test_eigen_system(self):
        model = MeasurementModel.spin(3 * math.pi / 8, 1.0, (0.5, -1.0))
        basis = free_eigenbasis(model)
        self.assertEqual(len(basis), 2)
        for energy, w in basis:
            pairs = eigen_system(model, w, energy, reverse_interaction=True)
            self.assertEqual(set(pairs), {'0', '+', '-'})
            for pair in pairs.values():
                self.assertLess(pair.residual, 1e-9)
                self.assertTrue(pair.paired_as_printed)
            assert_allclose(gram_matrix([p.vector for p in pairs.values()]), np.eye(3), atol=1e-12)

    def test_printed_pairing(self):
        model = MeasurementModel.spin(math.pi / 8)
        energy, w = free_eigenbasis(model)[0]
        # the displayed Hamiltonian swaps the labels of e+ and e-
        with self.assertLogs('ewglab.measurement', level='WARNING'):
            pairs = eigen_system(model, w, energy)
        self.assertAlmostEqual(pairs['+'].eigenvalue, energy - model.rate)
        self.assertAlmostEqual(pairs['-'].eigenvalue, energy + model.rate)
        self.assertTrue(pairs['0'].paired_as_printed)

    def test_not_eigenvector(self):
        model = MeasurementModel.spin(0.2, 1.0, (0.0, 1.0))
        with self.assertRaises(NotEigenvectorError):
            eigen_system(model, [1, 1], 0.0)


class TestLikelihoods(unittest.TestCase):

    def test_record_likelihoods(self):
        for theta in THETAS:
            model = MeasurementModel.spin(theta)
            for t in np.linspace(0.0, 2.0, 17):
                phi = interaction_phase(t, 1.0)
                likelihoods = record_likelihoods(evolve(model, PLUS, t))
                self.assertAlmostEqual(likelihoods[Record.up], math.sin(phi) ** 2 / 2, places=10)
                self.assertAlmostEqual(likelihoods[Record.dn], math.sin(phi) ** 2 / 2, places=10)
                self.assertAlmostEqual(likelihoods[Record.xx], math.cos(phi) ** 2, places=10)

    def test_conditional_table(self):
        for theta in THETAS:
            model = MeasurementModel.spin(theta)
            c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
            for t in (1.0, 1.5, 2.0):
                state = evolve(model, PLUS, t)
                self.assertAlmostEqual(conditional_spin_likelihood(state, 'up', 1), c2, places=9)
                self.assertAlmostEqual(conditional_spin_likelihood(state, 'up', 2), s2, places=9)
                self.assertAlmostEqual(conditional_spin_likelihood(state, 'dn', 1), s2, places=9)
                self.assertAlmostEqual(conditional_spin_likelihood(state, 'dn', Spin.down), c2, places=9)

    def test_no_record_branch(self):
        model = MeasurementModel.spin(math.pi / 8)
        during = evolve(model, PLUS, 0.5)
        self.assertAlmostEqual(conditional_spin_likelihood(during, Record.xx, 1), 0.5, places=10)
        with self.assertRaises(EmptyBranchError):
            conditional_spin_likelihood(evolve(model, PLUS, 1.5), Record.xx, 1)

    def test_spin_likelihood(self):
        model = MeasurementModel.spin(math.pi / 8)
        for t in (0.0, 0.5, 2.0):
            state = evolve(model, PLUS, t)
            self.assertAlmostEqual(spin_likelihood(state, Spin.up), 0.5, places=12)
            self.assertAlmostEqual(spin_likelihood(state, 'DOWN'), 0.5, places=12)
        with self.assertRaises(ValueError):
            spin_likelihood(state, 3)

    def test_closed_form_state(self):
        model = MeasurementModel.spin(0.3, 1.0, (0.2, -0.6))
        rho0 = DensityMatrix(np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]]))
        for t in (-0.2, 0.3, 1.0, 1.7):
            a = evolve(model, rho0, t)
            b = evolve_closed_form(model, rho0, t)
            self.assertLess(max_norm(a.rho.matrix - b.rho.matrix), 1e-10)
            self.assertAlmostEqual(a.rho.trace, 1.0, places=12)

    def test_block_state(self):
        model = MeasurementModel.spin(0.0)
        state = evolve(model, PLUS, 0.0)
        assert_allclose(state.block('xx', 'xx'), PLUS.matrix, atol=1e-15)
        self.assertEqual(state.block(Record.up, Record.xx).shape, (2, 2))
        self.assertEqual(record_projection(2, 'dn').rank, 2)
        with self.assertRaises(ValueError):
            evolve(MeasurementModel.spin_pair(0.0), PLUS, 0.0)

    def test_quality(self):
        self.assertEqual(measurement_quality(0.0), MeasurementQuality.perfect)
        self.assertEqual(measurement_quality(math.pi), MeasurementQuality.perfect)
        self.assertEqual(measurement_quality(math.pi / 4), MeasurementQuality.uncorrelated)
        self.assertEqual(measurement_quality(math.pi / 2), MeasurementQuality.anticorrelated)
        self.assertEqual(measurement_quality(math.pi / 8), MeasurementQuality.partial)


class TestPair(unittest.TestCase):

    def test_singlet(self):
        model = MeasurementModel.spin_pair(0.0)
        for t in np.linspace(-0.25, 2.0, 10):
            table = epr_scenario(model, float(t))
            self.assertLess(max(abs(s) for s in table.total_spin), 1e-10)
        table = epr_scenario(model, 1.5)
        self.assertIsNone(table.partner_spin[Record.xx])
        up, down = table.partner_spin[Record.up]
        self.assertAlmostEqual(down, 1.0, places=9)
        self.assertAlmostEqual(up, 0.0, places=9)
        self.assertAlmostEqual(table.record_likelihoods[Record.up], 0.5, places=12)

    def test_partial_pair(self):
        theta = math.pi / 8
        table = epr_scenario(MeasurementModel.spin_pair(theta), 2.0)
        up, down = table.partner_spin[Record.up]
        self.assertAlmostEqual(down, math.cos(theta) ** 2, places=9)
        self.assertAlmostEqual(up, math.sin(theta) ** 2, places=9)

    def test_needs_pair(self):
        with self.assertRaises(ValueError):
            epr_scenario(MeasurementModel.spin(0.0), 1.0)


if __name__ == '__main__':
    unittest.main()
