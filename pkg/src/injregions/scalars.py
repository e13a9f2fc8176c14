"""Exact complex-rational scalars for the certified arithmetic path."""

from __future__ import annotations

from fractions import Fraction


class GaussianRational:
    """A complex number with exact rational real and imaginary parts.

    Supports the ring operations plus division, so it can be used as the
    scalar type of numpy object arrays (tensordot, outer products and row
    reduction all work elementwise through the Python operators).
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def from_dyadic(cls, re_num: int, im_num: int, log2_den: int) -> "GaussianRational":
        den = 1 << log2_den
        return cls(Fraction(re_num, den), Fraction(im_num, den))

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def mod_pair(self, p: int) -> tuple[int, int]:
        """Image of (re, im) in Z/p, mapping a/b to a * b^-1 mod p.

        Raises ZeroDivisionError when p divides a denominator; callers treat
        that as a degraded lane and move to the next prime.
        """
        return (_frac_mod(self.re, p), _frac_mod(self.im, p))


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    return NotImplemented


def _frac_mod(f: Fraction, p: int) -> int:
    den = f.denominator % p
    if den == 0:
        raise ZeroDivisionError(f"prime {p} divides denominator {f.denominator}")
    return (f.numerator % p) * pow(den, -1, p) % p


GR_ZERO = GaussianRational(0, 0)
GR_ONE = GaussianRational(1, 0)


def parse_rational(s: str) -> Fraction:
    """Parse the canonical "p/q" wire form (also accepts a bare integer)."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def format_rational(f: Fraction) -> str:
    """Canonical wire form: always "p/q" with q >= 1 and gcd(p, q) = 1."""
    return f"{f.numerator}/{f.denominator}"
