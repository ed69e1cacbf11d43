"""Truncated formal series in hbar over exact rationals.

All arithmetic is exact modulo hbar^(N+1).  Mixing two series of different
truncation orders is allowed and truncates to the smaller order, which is
the canonical quotient map between the two rings.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotInvertible

_F0 = Fraction(0)
_F1 = Fraction(1)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class HSeries:
    """Element of Q[hbar]/(hbar^(N+1))."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int):
        coeffs = tuple(_frac(c) for c in coeffs)
        if len(coeffs) < order + 1:
            coeffs = coeffs + (_F0,) * (order + 1 - len(coeffs))
        elif len(coeffs) > order + 1:
            coeffs = coeffs[: order + 1]
        self.coeffs = coeffs
        self.order = order

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, order: int) -> "HSeries":
        return cls((), order)

    @classmethod
    def one(cls, order: int) -> "HSeries":
        return cls((_F1,), order)

    @classmethod
    def constant(cls, c, order: int) -> "HSeries":
        return cls((_frac(c),), order)

    @classmethod
    def hbar(cls, order: int, power: int = 1, coeff=1) -> "HSeries":
        if power > order:
            return cls.zero(order)
        return cls((_F0,) * power + (_frac(coeff),), order)

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_unit(self) -> bool:
        return self.coeffs[0] != 0

    def valuation(self):
        """Smallest n with nonzero coefficient, or None for the zero series."""
        for n, c in enumerate(self.coeffs):
            if c != 0:
                return n
        return None

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic --------------------------------------------------------

    def _common(self, other: "HSeries") -> int:
        return min(self.order, other.order)

    def __add__(self, other):
        if not isinstance(other, HSeries):
            other = HSeries.constant(other, self.order)
        n = self._common(other)
        return HSeries(
            tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)), n
        )

    __radd__ = __add__

    def __neg__(self):
        return HSeries(tuple(-c for c in self.coeffs), self.order)

    def __sub__(self, other):
        if not isinstance(other, HSeries):
            other = HSeries.constant(other, self.order)
        return self + (-other)

    def __rsub__(self, other):
        return HSeries.constant(other, self.order) - self

    def __mul__(self, other):
        if not isinstance(other, HSeries):
            c = _frac(other)
            return HSeries(tuple(a * c for a in self.coeffs), self.order)
        n = self._common(other)
        out = [_F0] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a == 0:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b != 0:
                    out[i + j] += a * b
        return HSeries(tuple(out), n)

    __rmul__ = __mul__

    def inverse(self) -> "HSeries":
        """Multiplicative inverse mod hbar^(N+1); requires a unit."""
        if self.coeffs[0] == 0:
            raise NotInvertible("constant term is zero")
        inv0 = _F1 / self.coeffs[0]
        out = [inv0] + [_F0] * self.order
        for n in range(1, self.order + 1):
            acc = _F0
            for i in range(1, n + 1):
                acc += self.coeffs[i] * out[n - i]
            out[n] = -inv0 * acc
        return HSeries(tuple(out), self.order)

    def __truediv__(self, other):
        if isinstance(other, HSeries):
            return self * other.inverse()
        return self * (_F1 / _frac(other))

    def shift(self, k: int) -> "HSeries":
        """Multiply by hbar^k."""
        return HSeries((_F0,) * k + self.coeffs, self.order)

    def coeff(self, n: int) -> Fraction:
        if n > self.order:
            return _F0
        return self.coeffs[n]

    def truncate(self, order: int) -> "HSeries":
        return HSeries(self.coeffs, min(order, self.order))

    # -- comparison / display ---------------------------------------------

    def __eq__(self, other):
        if isinstance(other, HSeries):
            n = self._common(other)
            return self.coeffs[: n + 1] == other.coeffs[: n + 1]
        return self == HSeries.constant(other, self.order)

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        terms = []
        for n, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if n == 0:
                terms.append(str(c))
            elif n == 1:
                terms.append(f"{c}*h" if c != 1 else "h")
            else:
                terms.append(f"{c}*h^{n}" if c != 1 else f"h^{n}")
        body = " + ".join(terms) if terms else "0"
        return f"HSeries({body}; N={self.order})"
