"""Scalar arithmetic: exact Gaussian rationals and complex doubles.

The kernel is written once against a small arithmetic contract; the two
implementations are :class:`QQi` (exact, canonical, structural equality) and
Python's built-in ``complex``.  Values of the two kinds are never mixed in a
single computation; the mode is decided by the type of the base ``q``.

Exact values are pairs of ``gmpy2.mpq`` components, which are always kept in
lowest terms with positive denominator, so ``==`` is a structural check.  A
configurable height cap aborts a computation whose numerators or denominators
explode instead of letting bignums grow without bound.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Union

from gmpy2 import mpq, mpz

from .errors import DivisionByZero, HeightOverflow

Scalar = Union["QQi", complex]

# Max bit length of any component numerator/denominator before a computation
# is aborted.  Routine exact verification at n = 6 with height-16 sample
# rationals produces values of a few hundred bits (a (;q)_{2n} product alone
# carries q^{~binom(12,2)} in its denominator), so the default leaves ample
# headroom while still stopping genuinely explosive computations.
_HEIGHT_CAP_BITS = 4096


def set_height_cap(bits):
    """Set the global height cap (in bits); None disables the check."""
    global _HEIGHT_CAP_BITS
    _HEIGHT_CAP_BITS = bits


def get_height_cap():
    return _HEIGHT_CAP_BITS


@contextmanager
def height_cap(bits):
    """Temporarily override the height cap."""
    old = _HEIGHT_CAP_BITS
    set_height_cap(bits)
    try:
        yield
    finally:
        set_height_cap(old)


_MPQ_ZERO = mpq(0)
_MPQ_ONE = mpq(1)


def _checked(re, im):
    cap = _HEIGHT_CAP_BITS
    if cap is not None:
        if (re.numerator.bit_length() > cap or re.denominator.bit_length() > cap
                or im.numerator.bit_length() > cap or im.denominator.bit_length() > cap):
            raise HeightOverflow(
                f"exact scalar height exceeded 2^{cap} "
                f"(numerator {max(re.numerator.bit_length(), im.numerator.bit_length())} bits)")
    v = QQi.__new__(QQi)
    v.re = re
    v.im = im
    return v


class QQi:
    """A Gaussian rational re + im*i with exact mpq components.

    Canonical by construction (mpq normalizes), hence equality and hashing are
    structural.  Arithmetic raises :class:`HeightOverflow` past the height cap
    and :class:`DivisionByZero` on zero divisors.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        r = mpq(re)
        i = mpq(im)
        self.re = r
        self.im = i

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_parts(cls, re, im=0):
        return _checked(mpq(re), mpq(im))

    @classmethod
    def parse(cls, text):
        """Parse "p/r", "p", "p/r+s/t i", "i", "-i", "3i" style literals."""
        s = text.strip().replace(" ", "")
        if not s:
            raise ValueError("empty scalar literal")
        if "i" in s or "j" in s:
            s = s.replace("j", "i")
            body = s[:-1] if s.endswith("i") else s
            # split real and imaginary at the last top-level +/- before the i part
            if s.endswith("i"):
                # find split point: a sign that is not the leading one and not after '/'
                for k in range(len(body) - 1, 0, -1):
                    if body[k] in "+-" and body[k - 1] not in "/+-":
                        re_s, im_s = body[:k], body[k:]
                        break
                else:
                    re_s, im_s = "0", body
                if im_s in ("", "+"):
                    im_s = "1"
                elif im_s == "-":
                    im_s = "-1"
                return cls(mpq(re_s) if re_s else 0, mpq(im_s))
            raise ValueError(f"cannot parse scalar literal {text!r}")
        return cls(mpq(s))

    # -- predicates --------------------------------------------------------

    def is_zero(self):
        return not self.re and not self.im

    def is_one(self):
        return self.re == _MPQ_ONE and not self.im

    def is_real(self):
        return not self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _checked(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _checked(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _checked(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.im and not other.im:
            return _checked(self.re * other.re, _MPQ_ZERO)
        return _checked(self.re * other.re - self.im * other.im,
                        self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inv()

    def __neg__(self):
        return _checked(-self.re, -self.im)

    def __pos__(self):
        return self

    def inv(self):
        """Multiplicative inverse; raises DivisionByZero at 0."""
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if not self.im:
            return _checked(1 / self.re, _MPQ_ZERO)
        nrm = self.re * self.re + self.im * self.im
        return _checked(self.re / nrm, -self.im / nrm)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inv() ** (-k)
        result = _checked(_MPQ_ONE, _MPQ_ZERO)
        base = self
        while k:
            if k & 1:
                result = result * base
            base_needed = k >> 1
            if base_needed:
                base = base * base
            k = base_needed
        return result

    def conj(self):
        return _checked(self.re, -self.im)

    # -- structure ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, mpq)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def height(self):
        """Max absolute value over the four integer components."""
        return max(abs(self.re.numerator), self.re.denominator,
                   abs(self.im.numerator), self.im.denominator)

    def abs_sq(self):
        """|self|^2, exact (an mpq)."""
        return self.re * self.re + self.im * self.im

    def is_unit_modulus(self):
        return self.abs_sq() == 1

    def to_complex(self):
        return complex(float(self.re), float(self.im))

    def __complex__(self):
        return self.to_complex()

    def __repr__(self):
        return f"QQi({str(self)!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        im = f"{self.im}i" if self.im != 1 else "i"
        if self.im == -1:
            im = "-i"
        if not self.re:
            return im
        sign = "+" if self.im > 0 else ""
        return f"{self.re}{sign}{im}"


def _coerce(x):
    if isinstance(x, QQi):
        return x
    if isinstance(x, (int, mpz)):
        return _checked(mpq(x), _MPQ_ZERO)
    if isinstance(x, mpq):
        return _checked(x, _MPQ_ZERO)
    return NotImplemented


ZERO = QQi(0)
ONE = QQi(1)


def is_exact(x):
    return isinstance(x, QQi)


def qq(num, den=1):
    """Shorthand rational constructor."""
    return QQi(mpq(num, den))


def to_float(x):
    """Convert an exact or float scalar to complex."""
    if isinstance(x, QQi):
        return x.to_complex()
    return complex(x)


def one_like(x):
    return ONE if isinstance(x, QQi) else complex(1.0)


def zero_like(x):
    return ZERO if isinstance(x, QQi) else complex(0.0)


def pow_int(a, k):
    """a**k for integer k with the empty-product convention pow_int(x, 0) = 1.

    Raises DivisionByZero for 0**k with k < 0.
    """
    if not isinstance(k, int):
        raise TypeError(f"pow_int exponent must be int, got {type(k).__name__}")
    if isinstance(a, (int, mpz, mpq)):
        a = QQi(a)
    if isinstance(a, QQi):
        if k == 0:
            return ONE
        return a ** k
    a = complex(a)
    if k == 0:
        return complex(1.0)
    if a == 0 and k < 0:
        raise DivisionByZero("0 to a negative power")
    return a ** k


def scalar_is_zero(x):
    if isinstance(x, QQi):
        return x.is_zero()
    return x == 0


def approx_eq(a, b, rel_tol=1e-10):
    """|a - b| <= rel_tol * max(1, |a|, |b|), on complex images."""
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    ca, cb = to_float(a), to_float(b)
    return abs(ca - cb) <= rel_tol * max(1.0, abs(ca), abs(cb))


def rel_residual(a, b):
    """|a - b| / max(1, |a|, |b|) on complex images."""
    ca, cb = to_float(a), to_float(b)
    return abs(ca - cb) / max(1.0, abs(ca), abs(cb))


def binom2(n):
    """binom(n, 2) = n*(n-1)/2 for integer n (any sign)."""
    return n * (n - 1) // 2
