"""Exact scalar arithmetic: rationals and the quadratic extension Q(sqrt(rho)).

Numbers of the form a + b*sqrt(rho), with rational a, b and a fixed
nonnegative rational radicand rho, are closed under addition and
multiplication.  That is all the exact frame computations need: products of
two frame entries land back in the same extension, and inner products come
out rational because the radical only ever appears squared or not at all.
``fractions.Fraction`` supplies the rational field; this module adds the
quadratic layer and exact sign evaluation, so orthonormality and the
certificate comparisons are decided with zero floating-point error.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Rational = Fraction

RationalLike = Union[Fraction, int]


def rational_to_str(x: Fraction) -> str:
    """Serialize a rational as "numerator/denominator", slash always present."""
    return f"{x.numerator}/{x.denominator}"


def rational_from_str(s: str) -> Fraction:
    """Parse "p/q" (or a plain integer string) back into a Fraction."""
    return Fraction(s)


def _sign(x: Fraction) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


class QuadExt:
    """An element a + b*sqrt(rho) of the real quadratic extension Q(sqrt(rho)).

    The radicand rho travels with every value and must agree between the two
    operands of a binary operation; mixing distinct radicands raises
    ``ValueError``.  Plain ints and Fractions mix freely (they adopt the other
    operand's radicand).  Values are immutable; all operations return new
    objects, so instances are safe to share across threads.

    Equality is componentwise on (a, b), which is exact whenever rho is not a
    perfect square of a rational (true for the radicands this package uses).
    """

    __slots__ = ("a", "b", "rho")

    def __init__(self, a: RationalLike, b: RationalLike = 0, rho: RationalLike = 0):
        a = Fraction(a)
        b = Fraction(b)
        rho = Fraction(rho)
        if rho < 0:
            raise ValueError("radicand must be nonnegative, got %s" % rho)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "rho", rho)

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt values are immutable")

    @classmethod
    def sqrt_of(cls, rho: RationalLike) -> "QuadExt":
        """The element sqrt(rho) itself."""
        return cls(0, 1, rho)

    # -- coercion helpers ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other, 0, self.rho)
        return None

    def _check_rho(self, other: "QuadExt") -> None:
        # Values with no radical part still carry a radicand; requiring an
        # exact match keeps usage errors loud instead of silently wrong.
        if self.rho != other.rho:
            raise ValueError(
                "mismatched radicands: sqrt(%s) vs sqrt(%s)" % (self.rho, other.rho)
            )

    # -- field-ish operations (no division needed here) ----------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        self._check_rho(o)
        return QuadExt(self.a + o.a, self.b + o.b, self.rho)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.rho)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        self._check_rho(o)
        return QuadExt(self.a - o.a, self.b - o.b, self.rho)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        self._check_rho(o)
        a1, b1, a2, b2 = self.a, self.b, o.a, o.b
        # Fast paths: purely rational factors and pure-radical factors cover
        # almost every multiplication in the exact Gram computation.
        if b1 == 0 and b2 == 0:
            return QuadExt(a1 * a2, 0, self.rho)
        if a1 == 0 and a2 == 0:
            return QuadExt(b1 * b2 * self.rho, 0, self.rho)
        return QuadExt(a1 * a2 + b1 * b2 * self.rho, a1 * b2 + a2 * b1, self.rho)

    __rmul__ = __mul__

    # -- predicates and conversions ------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.a != o.a or self.b != o.b:
            return False
        return self.b == 0 or self.rho == o.rho

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.rho))

    def __bool__(self):
        return self.a != 0 or (self.b != 0 and self.rho != 0)

    @property
    def is_rational(self) -> bool:
        return self.b == 0 or self.rho == 0

    def as_rational(self) -> Fraction:
        """The value as a Fraction; raises if the radical part survives."""
        if self.b == 0:
            return self.a
        if self.rho == 0:
            return self.a
        raise ValueError("value %s is irrational" % self)

    def sign(self) -> int:
        """Exact sign of the real number a + b*sqrt(rho).

        When a and b*sqrt(rho) pull in the same direction (or one vanishes)
        the answer is immediate; opposing pulls are settled by comparing a^2
        against b^2 * rho, never by floating approximation.
        """
        sa = _sign(self.a)
        if self.b == 0 or self.rho == 0:
            return sa
        sb = _sign(self.b)
        if sa == 0:
            return sb
        if sa == sb:
            return sa
        cmp = self.a * self.a - self.b * self.b * self.rho
        if cmp == 0:
            return 0
        return sa if cmp > 0 else sb

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * float(self.rho) ** 0.5

    def __str__(self) -> str:
        return "%s + %s*sqrt(%s)" % (
            rational_to_str(self.a),
            rational_to_str(self.b),
            rational_to_str(self.rho),
        )

    def __repr__(self) -> str:
        return "QuadExt(%r, %r, rho=%r)" % (str(self.a), str(self.b), str(self.rho))


def quad_sign(x: QuadExt) -> int:
    """Module-level alias for :meth:`QuadExt.sign`."""
    return x.sign()
