"""
Exact scalars in Q(sqrt2, sqrt3)
Every amplitude and probability of the protocol lives in this field
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from models.errors import FieldError

Scalar = Union["FieldElement", Fraction, int]

_BASIS_NAMES = ("", "sqrt2", "sqrt3", "sqrt6")
_TERM_PATTERN = re.compile(r"([+-]?)(\d+(?:/\d+)?)(?:\*sqrt(2|3|6))?")


def _sign_q2(p: Fraction, q: Fraction) -> int:
    """Sign of p + q*sqrt2, decided without approximation"""
    sp = (p > 0) - (p < 0)
    sq = (q > 0) - (q < 0)
    if sq == 0 or sp == sq:
        return sp if sp != 0 else sq
    if sp == 0:
        return sq
    return sp if p * p > 2 * q * q else sq


@dataclass(frozen=True)
class FieldElement:
    """a + b*sqrt2 + c*sqrt3 + d*sqrt6 with rational coefficients"""
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    # Constructors

    @classmethod
    def of(cls, value: Scalar) -> "FieldElement":
        """Lift an int or Fraction into the field"""
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        raise FieldError(f"cannot lift {type(value).__name__} into the field")

    @classmethod
    def zero(cls) -> "FieldElement":
        return cls()

    @classmethod
    def one(cls) -> "FieldElement":
        return cls(Fraction(1))

    @classmethod
    def sqrt2(cls) -> "FieldElement":
        return cls(b=Fraction(1))

    @classmethod
    def sqrt3(cls) -> "FieldElement":
        return cls(c=Fraction(1))

    @classmethod
    def sqrt6(cls) -> "FieldElement":
        return cls(d=Fraction(1))

    # Arithmetic

    def __add__(self, other: Scalar) -> "FieldElement":
        if not isinstance(other, (FieldElement, int, Fraction)):
            return NotImplemented
        o = FieldElement.of(other)
        return FieldElement(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self) -> "FieldElement":
        return FieldElement(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other: Scalar) -> "FieldElement":
        return self + (-FieldElement.of(other))

    def __rsub__(self, other: Scalar) -> "FieldElement":
        return FieldElement.of(other) - self

    def __mul__(self, other: Scalar) -> "FieldElement":
        if not isinstance(other, (FieldElement, int, Fraction)):
            return NotImplemented
        o = FieldElement.of(other)
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        return FieldElement(
            a1 * a2 + 2 * b1 * b2 + 3 * c1 * c2 + 6 * d1 * d2,
            a1 * b2 + b1 * a2 + 3 * (c1 * d2 + d1 * c2),
            a1 * c2 + c1 * a2 + 2 * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        """
        Multiplicative inverse

        Writes x = u + v*sqrt3 with u, v in Q(sqrt2) and clears the two
        radicals one after the other.
        """
        if self.is_zero():
            raise FieldError("division by zero in field")
        conj3 = FieldElement(self.a, self.b, -self.c, -self.d)
        w = self * conj3
        conj2 = FieldElement(w.a, -w.b)
        norm = (w * conj2).a
        return conj3 * conj2 * FieldElement(Fraction(1) / norm)

    def __truediv__(self, other: Scalar) -> "FieldElement":
        return self * FieldElement.of(other).inverse()

    def __rtruediv__(self, other: Scalar) -> "FieldElement":
        return FieldElement.of(other) * self.inverse()

    def __pow__(self, exponent: int) -> "FieldElement":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = FieldElement.one()
        for _ in range(exponent):
            result = result * self
        return result

    def conjugate(self) -> "FieldElement":
        """Complex conjugation; every element is real"""
        return self

    # Comparison

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0 and self.d == 0

    def is_rational(self) -> bool:
        return self.b == 0 and self.c == 0 and self.d == 0

    def sign(self) -> int:
        """Exact sign: -1, 0 or 1"""
        su = _sign_q2(self.a, self.b)
        sv = _sign_q2(self.c, self.d)
        if sv == 0 or su == sv:
            return su if su != 0 else sv
        if su == 0:
            return sv
        # u^2 - 3 v^2 lies in Q(sqrt2)
        p = self.a * self.a + 2 * self.b * self.b - 3 * self.c * self.c - 6 * self.d * self.d
        q = 2 * self.a * self.b - 6 * self.c * self.d
        return su if _sign_q2(p, q) > 0 else sv

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = FieldElement.of(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.c, self.d))

    def __lt__(self, other: Scalar) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: Scalar) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other: Scalar) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other: Scalar) -> bool:
        return (self - other).sign() >= 0

    # Conversion

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise FieldError(f"{self.to_text()} is not rational")
        return self.a

    def __float__(self) -> float:
        return (float(self.a) + float(self.b) * 2 ** 0.5
                + float(self.c) * 3 ** 0.5 + float(self.d) * 6 ** 0.5)

    def to_text(self) -> str:
        """Canonical text form, e.g. '1/2 - 1/6*sqrt3'"""
        pieces = []
        for coefficient, name in zip((self.a, self.b, self.c, self.d), _BASIS_NAMES):
            if coefficient == 0:
                continue
            magnitude = str(abs(coefficient))
            term = f"{magnitude}*{name}" if name else magnitude
            if not pieces:
                pieces.append(f"-{term}" if coefficient < 0 else term)
            else:
                pieces.append(f"{'-' if coefficient < 0 else '+'} {term}")
        return " ".join(pieces) if pieces else "0"

    @classmethod
    def parse(cls, text: str) -> "FieldElement":
        """Inverse of to_text"""
        compact = text.replace(" ", "")
        if compact in ("0", "-0"):
            return cls()
        coefficients = {"": Fraction(0), "2": Fraction(0), "3": Fraction(0), "6": Fraction(0)}
        position = 0
        for match in _TERM_PATTERN.finditer(compact):
            if match.start() != position or match.end() == match.start():
                raise FieldError(f"malformed field element: {text!r}")
            sign, value, radical = match.groups()
            if position > 0 and not sign:
                raise FieldError(f"missing operator in field element: {text!r}")
            try:
                magnitude = Fraction(value)
            except ZeroDivisionError:
                raise FieldError(f"zero denominator in field element: {text!r}") from None
            coefficients[radical or ""] += -magnitude if sign == "-" else magnitude
            position = match.end()
        if position != len(compact):
            raise FieldError(f"malformed field element: {text!r}")
        return cls(coefficients[""], coefficients["2"], coefficients["3"], coefficients["6"])

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"FieldElement({self.to_text()!r})"


def field_arith(x: FieldElement, y: FieldElement = None, op: str = "add") -> FieldElement:
    """Apply one of add, mul, inv, neg; inv and neg ignore y"""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inverse()
    if op == "neg":
        return -x
    raise FieldError(f"unknown field operation: {op}")
