"""Coefficient rings for Weyl-algebra polynomials.

Two rings are provided: complex doubles, and exact Gaussian rationals backed by
sympy's ``QQ_I`` domain.  Floats entering the exact ring are converted with
their exact binary value, so structure constants drawn as random doubles still
give rounding-free products.
"""

from __future__ import annotations

from fractions import Fraction
import numbers

from sympy.polys.domains import QQ, QQ_I

__all__ = ["FLOAT", "EXACT", "ring_for"]


class FloatRing:
    exact = False
    name = "float"
    zero = 0j
    one = 1 + 0j
    imag = 1j

    def real(self, value) -> complex:
        return complex(float(value))

    def convert(self, value) -> complex:
        if isinstance(value, complex):
            return value
        if hasattr(value, "x") and hasattr(value, "y"):
            return complex(float(value.x), float(value.y))
        return complex(value)

    def conj(self, c):
        return c.conjugate()

    def to_complex(self, c) -> complex:
        return complex(c)

    def is_zero(self, c) -> bool:
        return c == 0

    def parse_number(self, text: str) -> complex:
        return complex(float(text))

    def format(self, c) -> str:
        if c.imag == 0:
            return repr(c.real)
        if c.real == 0:
            return f"{c.imag!r}i"
        return f"({c.real!r}{c.imag:+.17g}i)"

    def to_json_pair(self, c):
        return [c.real, c.imag]

    def from_json_pair(self, pair):
        return complex(float(pair[0]), float(pair[1]))


def _qq(value):
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, numbers.Integral):
        return QQ(int(value))
    if isinstance(value, str):
        fr = Fraction(value)
        return QQ(fr.numerator, fr.denominator)
    fr = Fraction(float(value))
    return QQ(fr.numerator, fr.denominator)


class ExactRing:
    exact = True
    name = "exact"
    zero = QQ_I(0, 0)
    one = QQ_I(1, 0)
    imag = QQ_I(0, 1)

    def real(self, value):
        return QQ_I(_qq(value), 0)

    def convert(self, value):
        if isinstance(value, type(self.zero)):
            return value
        if isinstance(value, complex):
            return QQ_I(_qq(value.real), _qq(value.imag))
        return QQ_I(_qq(value), 0)

    def conj(self, c):
        return QQ_I(c.x, -c.y)

    def to_complex(self, c) -> complex:
        return complex(float(c.x), float(c.y))

    def is_zero(self, c) -> bool:
        return not c

    def parse_number(self, text: str):
        return QQ_I(_qq(text), 0)

    def format(self, c) -> str:
        re, im = c.x, c.y
        if im == 0:
            return str(re)

        def imag_part(v):
            if v == 1:
                return "i"
            # keep "p/q*i" so that the printed form parses back unambiguously
            return f"{v}i" if v.denominator == 1 else f"{v}*i"

        if re == 0:
            return "-" + imag_part(-im) if im < 0 else imag_part(im)
        sign = "-" if im < 0 else "+"
        return f"({re}{sign}{imag_part(abs(im))})"

    def to_json_pair(self, c):
        return [str(c.x), str(c.y)]

    def from_json_pair(self, pair):
        return QQ_I(_qq(str(pair[0])), _qq(str(pair[1])))


FLOAT = FloatRing()
EXACT = ExactRing()


def ring_for(exact: bool):
    return EXACT if exact else FLOAT
