"""
Unit tests for FieldElement
"""
import unittest
from fractions import Fraction

from models.errors import FieldError
from models.field_element import FieldElement, field_arith


class TestFieldElement(unittest.TestCase):
    """Test cases for exact arithmetic in Q(sqrt2, sqrt3)"""

    def setUp(self):
        self.r2 = FieldElement.sqrt2()
        self.r3 = FieldElement.sqrt3()
        self.r6 = FieldElement.sqrt6()

    def test_radical_products(self):
        """Products of the radicals stay in the basis"""
        self.assertEqual(self.r2 * self.r2, 2)
        self.assertEqual(self.r3 * self.r3, 3)
        self.assertEqual(self.r2 * self.r3, self.r6)
        self.assertEqual(self.r6 * self.r6, 6)
        self.assertEqual(self.r6 * self.r2, 2 * self.r3)

    def test_inverse(self):
        """Inverse of sqrt3 is sqrt3/3"""
        self.assertEqual(self.r3.inverse(), FieldElement(c=Fraction(1, 3)))
        x = FieldElement(Fraction(1), Fraction(1), Fraction(1), Fraction(1))
        self.assertEqual(x * x.inverse(), 1)

    def test_division_by_zero(self):
        with self.assertRaises(FieldError):
            FieldElement.zero().inverse()
        with self.assertRaises(FieldError):
            self.r2 / 0

    def test_lift_rejects_float(self):
        with self.assertRaises(FieldError):
            FieldElement.of(0.5)

    def test_sign(self):
        """Signs decided exactly, including near-cancellations"""
        self.assertEqual(FieldElement.zero().sign(), 0)
        self.assertEqual((self.r3 - self.r2).sign(), 1)
        self.assertEqual((self.r2 + self.r3 - FieldElement.of(3)).sign(), 1)
        self.assertEqual((FieldElement.of(Fraction(7, 5)) - self.r2).sign(), -1)
        self.assertEqual((self.r6 - FieldElement.of(Fraction(49, 20))).sign(), -1)

    def test_ordering(self):
        self.assertTrue(FieldElement.of(Fraction(1, 12)) < FieldElement.of(Fraction(1, 6)))
        self.assertTrue(self.r2 <= self.r2)
        self.assertTrue(self.r3 > 1)
        self.assertTrue(FieldElement.of(Fraction(1, 4)) >= 0)

    def test_to_fraction(self):
        self.assertEqual(FieldElement.of(Fraction(1, 12)).to_fraction(), Fraction(1, 12))
        with self.assertRaises(FieldError):
            self.r3.to_fraction()

    def test_to_text(self):
        """Golden text forms"""
        self.assertEqual(FieldElement.zero().to_text(), "0")
        self.assertEqual(FieldElement(c=Fraction(1, 6)).to_text(), "1/6*sqrt3")
        self.assertEqual(FieldElement(Fraction(1, 2), c=Fraction(-1, 6)).to_text(),
                         "1/2 - 1/6*sqrt3")
        self.assertEqual(FieldElement(b=Fraction(-1, 2)).to_text(), "-1/2*sqrt2")
        self.assertEqual(FieldElement.of(1).to_text(), "1")

    def test_parse(self):
        self.assertEqual(FieldElement.parse("1/6*sqrt3"), FieldElement(c=Fraction(1, 6)))
        self.assertEqual(FieldElement.parse("-1 + 2*sqrt6"), FieldElement(-1, d=2))
        self.assertEqual(FieldElement.parse("0"), FieldElement.zero())

    def test_parse_rejects_malformed(self):
        for text in ("sqrt3", "1/6*sqrt5", "1/2 sqrt3", "1/2 +", "abc"):
            with self.subTest(text=text):
                with self.assertRaises(FieldError):
                    FieldElement.parse(text)

    def test_parse_rejects_zero_denominator(self):
        for text in ("1/0", "1 + 3/0*sqrt2"):
            with self.subTest(text=text):
                with self.assertRaises(FieldError):
                    FieldElement.parse(text)

    def test_float(self):
        self.assertAlmostEqual(float(FieldElement(c=Fraction(1, 6))), 3 ** 0.5 / 6)

    def test_field_arith(self):
        x = FieldElement(Fraction(1, 2), Fraction(1, 3))
        self.assertEqual(field_arith(x, x, "add"), 2 * x)
        self.assertEqual(field_arith(x, x, "mul"), x * x)
        self.assertEqual(field_arith(x, op="neg"), -x)
        self.assertEqual(field_arith(x, op="inv") * x, 1)
        with self.assertRaises(FieldError):
            field_arith(x, x, "pow")

    def test_power(self):
        self.assertEqual(self.r2 ** 4, 4)
        self.assertEqual(self.r2 ** -2, FieldElement.of(Fraction(1, 2)))


if __name__ == '__main__':
    unittest.main()
