"""
Unit tests for kets, projectors and QuantumEngine
"""
import unittest
from fractions import Fraction

from managers.quantum_engine import QuantumEngine
from models.errors import NormalizationError, RosterError
from models.field_element import FieldElement
from models.kets import BasisLabel, Ket, Projector, Subsystem, Symbol, product_basis

HALF_ROOT2 = FieldElement(b=Fraction(1, 2))


def basis_ket(subsystem: Subsystem, symbol: Symbol) -> Ket:
    return Ket.basis([BasisLabel(subsystem, symbol)])


class TestKet(unittest.TestCase):
    """Test cases for sparse kets"""

    def setUp(self):
        self.phi = basis_ket(Subsystem.S1, Symbol.PHI)
        self.psi = basis_ket(Subsystem.S1, Symbol.PSI)
        self.xi = basis_ket(Subsystem.F1, Symbol.XI)
        self.zeta = basis_ket(Subsystem.F1, Symbol.ZETA)

    def test_bad_basis_label(self):
        """Memories take xi/zeta, systems phi/psi"""
        with self.assertRaises(RosterError):
            BasisLabel(Subsystem.F1, Symbol.PHI)
        with self.assertRaises(RosterError):
            BasisLabel(Subsystem.S2, Symbol.ZETA)

    def test_repeated_roster(self):
        with self.assertRaises(RosterError):
            Ket((Subsystem.S1, Subsystem.S1), {})

    def test_zero_amplitudes_dropped(self):
        ket = Ket((Subsystem.S1,), {(Symbol.PHI,): FieldElement.zero(), (Symbol.PSI,): 1})
        self.assertEqual(list(ket.amplitudes), [(Symbol.PSI,)])
        self.assertTrue((self.phi - self.phi).is_zero())

    def test_add_requires_same_roster(self):
        with self.assertRaises(RosterError):
            self.phi + self.xi

    def test_tensor_and_inner(self):
        product = self.phi.tensor(self.xi)
        self.assertEqual(product.roster, (Subsystem.S1, Subsystem.F1))
        self.assertEqual(product.inner(product), 1)
        self.assertEqual(product.inner(self.psi.tensor(self.xi)), 0)

    def test_tensor_rejects_overlap(self):
        with self.assertRaises(RosterError):
            self.phi.tensor(self.psi)

    def test_normalization(self):
        plus = (self.phi + self.psi).scale(HALF_ROOT2)
        self.assertTrue(plus.is_normalized())
        self.assertEqual((self.phi + self.psi).norm_squared(), 2)

    def test_reorder(self):
        ket = self.phi.tensor(self.zeta)
        reordered = ket.reorder((Subsystem.F1, Subsystem.S1))
        self.assertEqual(reordered.amplitude((Symbol.ZETA, Symbol.PHI)), 1)
        self.assertEqual(reordered.reorder(ket.roster), ket)
        with self.assertRaises(RosterError):
            ket.reorder((Subsystem.S1, Subsystem.S2))

    def test_partial_inner(self):
        """<phi|_S1 applied to (phi xi + psi zeta) leaves xi"""
        ket = self.phi.tensor(self.xi) + self.psi.tensor(self.zeta)
        self.assertEqual(ket.partial_inner(self.phi), self.xi)
        self.assertEqual(ket.partial_inner(self.zeta), self.psi)
        with self.assertRaises(RosterError):
            ket.partial_inner(basis_ket(Subsystem.S2, Symbol.PHI))

    def test_to_text(self):
        """Golden text form sorted by symbol order"""
        ket = (self.psi.tensor(self.zeta) + self.phi.tensor(self.xi)).scale(HALF_ROOT2)
        self.assertEqual(ket.to_text(), "phi,xi: 1/2*sqrt2\npsi,zeta: 1/2*sqrt2")
        self.assertEqual(Ket.zero((Subsystem.S1,)).to_text(), "0")

    def test_product_basis(self):
        basis = product_basis((Subsystem.S1, Subsystem.F1))
        self.assertEqual(len(basis), 4)
        self.assertEqual(basis[0], self.phi.tensor(self.xi))
        self.assertEqual(basis[-1], self.psi.tensor(self.zeta))


class TestProjector(unittest.TestCase):
    """Test cases for span-based projectors"""

    def setUp(self):
        self.phi = basis_ket(Subsystem.S1, Symbol.PHI)
        self.psi = basis_ket(Subsystem.S1, Symbol.PSI)
        self.plus = (self.phi + self.psi).scale(HALF_ROOT2)

    def test_span_must_be_orthonormal(self):
        with self.assertRaises(RosterError):
            Projector((self.phi, self.plus))
        with self.assertRaises(RosterError):
            Projector((self.phi + self.psi,))
        with self.assertRaises(RosterError):
            Projector(())

    def test_apply_is_idempotent(self):
        projector = Projector((self.plus,))
        v = self.phi
        once = projector.apply(v)
        self.assertEqual(once, self.plus.scale(HALF_ROOT2))
        self.assertEqual(projector.apply(once), once)

    def test_apply_on_larger_roster(self):
        """P (x) Identity keeps the other factor"""
        xi = basis_ket(Subsystem.F1, Symbol.XI)
        projector = Projector((self.phi,))
        v = self.plus.tensor(xi)
        self.assertEqual(projector.apply(v), self.phi.tensor(xi).scale(HALF_ROOT2))

    def test_tensor(self):
        xi = basis_ket(Subsystem.F1, Symbol.XI)
        joint = Projector((self.phi,)).tensor(Projector((xi,)))
        self.assertEqual(joint.rank, 1)
        self.assertEqual(joint.roster, (Subsystem.S1, Subsystem.F1))


class TestQuantumEngine(unittest.TestCase):
    """Test cases for QuantumEngine"""

    def setUp(self):
        self.engine = QuantumEngine()
        self.phi = basis_ket(Subsystem.S1, Symbol.PHI)
        self.psi = basis_ket(Subsystem.S1, Symbol.PSI)
        self.plus = (self.phi + self.psi).scale(HALF_ROOT2)

    def test_born_probability(self):
        probability = self.engine.born_probability(Projector((self.phi,)), self.plus)
        self.assertEqual(probability, Fraction(1, 2))

    def test_born_probability_requires_normalized_state(self):
        with self.assertRaises(NormalizationError):
            self.engine.born_probability(Projector((self.phi,)), self.phi + self.psi)

    def test_project_rejects_missing_subsystem(self):
        projector = Projector((basis_ket(Subsystem.S2, Symbol.PHI),))
        with self.assertRaises(RosterError):
            self.engine.project(projector, self.plus)

    def test_resolution_of_identity(self):
        minus = (self.phi - self.psi).scale(HALF_ROOT2)
        self.assertTrue(self.engine.is_resolution_of_identity([self.plus, minus], self.phi))
        self.assertFalse(self.engine.is_resolution_of_identity([self.plus], self.phi))

    def test_gram_matrix(self):
        minus = (self.phi - self.psi).scale(HALF_ROOT2)
        gram = self.engine.gram_matrix([self.plus, minus])
        self.assertEqual(gram, [[1, 0], [0, 1]])

    def test_projectors_commute(self):
        basis = [self.phi, self.psi]
        z = Projector((self.phi,))
        x = Projector((self.plus,))
        self.assertTrue(self.engine.projectors_commute(z, Projector((self.psi,)), basis))
        self.assertFalse(self.engine.projectors_commute(z, x, basis))

    def test_tensor_and_inner(self):
        xi = basis_ket(Subsystem.F1, Symbol.XI)
        joint = self.engine.tensor(self.plus, xi)
        self.assertEqual(self.engine.inner(joint, joint), 1)
        self.assertEqual(self.engine.field_arith(FieldElement.sqrt2(), FieldElement.sqrt2(), "mul"), 2)


if __name__ == '__main__':
    unittest.main()
