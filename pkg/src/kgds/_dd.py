"""Double-double ("dd") arithmetic: unevaluated sums hi + lo of two floats,
about 32 significant digits. Just enough operations for summing hypergeometric
series at quadruple-ish precision; error-free transforms follow Dekker/Knuth.
"""
from __future__ import annotations

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a: float, b: float):
    s = a + b
    return s, b - (s - a)


def _two_prod(a: float, b: float):
    p = a * b
    ta = _SPLITTER * a
    ahi = ta - (ta - a)
    alo = a - ahi
    tb = _SPLITTER * b
    bhi = tb - (tb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


class DD:
    """A real double-double number."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi: float = 0.0, lo: float = 0.0):
        self.hi = hi
        self.lo = lo

    def __add__(self, other):
        if not isinstance(other, DD):
            other = DD(float(other))
        s, e = _two_sum(self.hi, other.hi)
        e += self.lo + other.lo
        hi, lo = _quick_two_sum(s, e)
        return DD(hi, lo)

    def __sub__(self, other):
        if not isinstance(other, DD):
            other = DD(float(other))
        return self + DD(-other.hi, -other.lo)

    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __mul__(self, other):
        if not isinstance(other, DD):
            other = DD(float(other))
        p, e = _two_prod(self.hi, other.hi)
        e += self.hi * other.lo + self.lo * other.hi
        hi, lo = _quick_two_sum(p, e)
        return DD(hi, lo)

    def __truediv__(self, other):
        if not isinstance(other, DD):
            other = DD(float(other))
        q1 = self.hi / other.hi
        r = self - other * DD(q1)
        q2 = r.hi / other.hi
        r = r - other * DD(q2)
        q3 = r.hi / other.hi
        hi, lo = _quick_two_sum(q1, q2)
        return DD(hi, lo) + DD(q3)

    def __float__(self):
        return self.hi + self.lo

    def __repr__(self):
        return f"DD({self.hi!r}, {self.lo!r})"


class CDD:
    """A complex double-double number (re and im are DD)."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        if isinstance(re, complex) and im is None:
            self.re, self.im = DD(re.real), DD(re.imag)
        else:
            self.re = re if isinstance(re, DD) else DD(float(re))
            self.im = im if isinstance(im, DD) else DD(float(im or 0.0))

    def __add__(self, other):
        other = _as_cdd(other)
        return CDD(self.re + other.re, self.im + other.im)

    def __mul__(self, other):
        other = _as_cdd(other)
        return CDD(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    def __truediv__(self, other):
        other = _as_cdd(other)
        den = other.re * other.re + other.im * other.im
        num = self * CDD(other.re, -other.im)
        return CDD(num.re / den, num.im / den)

    def abs2(self) -> float:
        return float(self.re * self.re + self.im * self.im)

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


def _as_cdd(x):
    if isinstance(x, CDD):
        return x
    if isinstance(x, complex):
        return CDD(x)
    return CDD(DD(float(x)), DD(0.0))
