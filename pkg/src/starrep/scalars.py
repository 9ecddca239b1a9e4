"""Exact scalars: Q, Q(i) and truncated formal power series in lambda.

The ordered ring tower is Q (``mpq``), Q(i) (:class:`GaussRational`) and
the truncated series rings R[[lambda]], C[[lambda]] (:class:`FormalScalar`).
All series arithmetic is carried out modulo ``lambda**(N+1)`` where ``N`` is
the truncation order, a context-local setting (default 6)::

    >>> with truncation(3):
    ...     s = FormalScalar.series([1, 1])
    ...     series_invert(s)
    FormalScalar(1 - λ + λ^2 - λ^3)

Conjugation fixes lambda.
"""

import contextvars
from contextlib import contextmanager
from enum import Enum
from fractions import Fraction

import gmpy2
from gmpy2 import mpq

from .errors import (NoExactRoot, NonInvertible, NonRealSeries, NotDivisible,
                     NotPositive, OrderMismatch)

DEFAULT_ORDER = 6

_order = contextvars.ContextVar("truncation_order", default=DEFAULT_ORDER)


def get_order():
    return _order.get()


@contextmanager
def truncation(order):
    """Temporarily set the global truncation order N."""
    if order < 0:
        raise ValueError("truncation order must be non-negative")
    token = _order.set(int(order))
    try:
        yield order
    finally:
        _order.reset(token)


# ---------------------------------------------------------------------------
# Q
# ---------------------------------------------------------------------------

def rational(x):
    """Coerce ints, strings ``"p/q"``, Fractions and mpqs to a reduced mpq."""
    if isinstance(x, type(mpq())):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(Fraction(x.strip()).numerator, Fraction(x.strip()).denominator)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def rational_str(q):
    q = rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def rational_sqrt(q):
    """Exact square root of a non-negative rational, or None."""
    q = rational(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    if gmpy2.is_square(n) and gmpy2.is_square(d):
        return mpq(gmpy2.isqrt(n), gmpy2.isqrt(d))
    return None


_MPQ = type(mpq())


# ---------------------------------------------------------------------------
# Q(i)
# ---------------------------------------------------------------------------

class GaussRational:
    """Element re + i*im of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is _MPQ else rational(re)
        self.im = im if type(im) is _MPQ else rational(im)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, GaussRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating point complex numbers are not exact")
        if isinstance(x, float):
            raise TypeError("floats are not exact")
        return cls(rational(x), _Q0)

    def __add__(self, other):
        if not isinstance(other, GaussRational):
            other = GaussRational.coerce(other)
        return GaussRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussRational):
            other = GaussRational.coerce(other)
        return GaussRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussRational.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, GaussRational):
            if isinstance(other, (int, _MPQ, Fraction)):
                q = rational(other)
                return GaussRational(self.re * q, self.im * q)
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __truediv__(self, other):
        return self * GaussRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussRational.coerce(other) * self.inverse()

    def conj(self):
        return GaussRational(self.re, -self.im)

    def norm(self):
        """z̄z as a rational."""
        return self.re * self.re + self.im * self.im

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise NonInvertible("0 has no inverse in Q(i)")
        return GaussRational(self.re / n, -self.im / n)

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def is_real(self):
        return self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, _MPQ, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussRational({self})"

    def __str__(self):
        re, im = rational_str(self.re), rational_str(self.im)
        if self.im == 0:
            return re
        if self.re == 0:
            return "i" if self.im == 1 else ("-i" if self.im == -1 else f"{im}i")
        sign = "+" if self.im > 0 else "-"
        mag = rational_str(abs(self.im))
        return f"{re}{sign}{'' if mag == '1' else mag}i"

    def to_json(self):
        return {"re": rational_str(self.re), "im": rational_str(self.im)}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, (int, str)):
            return cls(rational(data))
        return cls(rational(data["re"]), rational(data.get("im", 0)))


_Q0 = mpq(0)
ZERO = GaussRational(0, 0)
ONE = GaussRational(1, 0)
I = GaussRational(0, 1)


def gauss(x):
    return GaussRational.coerce(x)


# ---------------------------------------------------------------------------
# C[[lambda]] mod lambda^(N+1)
# ---------------------------------------------------------------------------

class Sign(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ZERO = "zero"


class FormalScalar:
    """Truncated formal power series sum_r a_r lambda^r, r = 0..N."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs, order=None):
        if order is None:
            order = get_order()
        cs = [GaussRational.coerce(c) for c in coeffs[:order + 1]]
        cs.extend([ZERO] * (order + 1 - len(cs)))
        self.coeffs = tuple(cs)
        self._hash = None

    @classmethod
    def _raw(cls, coeffs):
        obj = cls.__new__(cls)
        obj.coeffs = tuple(coeffs)
        obj._hash = None
        return obj

    @classmethod
    def series(cls, coeffs, order=None):
        return cls(coeffs, order)

    @classmethod
    def constant(cls, c, order=None):
        return cls([c], order)

    @classmethod
    def zero(cls, order=None):
        return cls([], order)

    @classmethod
    def one(cls, order=None):
        return cls([1], order)

    @classmethod
    def lam(cls, power=1, coeff=1, order=None):
        """coeff * lambda**power."""
        if order is None:
            order = get_order()
        cs = [ZERO] * (order + 1)
        if power <= order:
            cs[power] = GaussRational.coerce(coeff)
        return cls._raw(cs)

    @classmethod
    def coerce(cls, x, order=None):
        if isinstance(x, FormalScalar):
            return x
        return cls.constant(x, order)

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __getitem__(self, r):
        return self.coeffs[r]

    def _check(self, other):
        if not isinstance(other, FormalScalar):
            other = FormalScalar.constant(other, self.order)
        elif len(other.coeffs) != len(self.coeffs):
            raise OrderMismatch(
                f"truncation orders differ: {self.order} vs {other.order}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FormalScalar._raw(a + b for a, b in zip(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return FormalScalar._raw(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return self._check(other) - self

    def __neg__(self):
        return FormalScalar._raw(-a for a in self.coeffs)

    def __mul__(self, other):
        if isinstance(other, GaussRational) or isinstance(other, (int, _MPQ, Fraction)):
            return self.scale(other)
        if not isinstance(other, FormalScalar):
            return NotImplemented
        other = self._check(other)
        n = len(self.coeffs)
        a_nz = [(i, c.re, c.im) for i, c in enumerate(self.coeffs) if c.re or c.im]
        if not a_nz:
            return self
        b_nz = [(j, c.re, c.im) for j, c in enumerate(other.coeffs) if c.re or c.im]
        # accumulate real and imaginary parts as plain rationals (hot path)
        re = [_Q0] * n
        if not any(x[2] for x in a_nz) and not any(x[2] for x in b_nz):
            for i, ar, _ in a_nz:
                for j, br, _ in b_nz:
                    k = i + j
                    if k >= n:
                        break
                    re[k] += ar * br
            return FormalScalar._raw(GaussRational(r, _Q0) for r in re)
        im = [_Q0] * n
        for i, ar, ai in a_nz:
            for j, br, bi in b_nz:
                k = i + j
                if k >= n:
                    break
                re[k] += ar * br - ai * bi
                im[k] += ar * bi + ai * br
        return FormalScalar._raw(GaussRational(r, m) for r, m in zip(re, im))

    __rmul__ = __mul__

    def scale(self, c):
        c = GaussRational.coerce(c)
        if c.im == 0:
            q = c.re
            return FormalScalar._raw(GaussRational(a.re * q, a.im * q) for a in self.coeffs)
        return FormalScalar._raw(a * c for a in self.coeffs)

    def __truediv__(self, other):
        if isinstance(other, FormalScalar):
            return self * series_invert(other)
        return self.scale(GaussRational.coerce(other).inverse())

    def conj(self):
        return FormalScalar._raw(a.conj() for a in self.coeffs)

    def shift(self, r):
        """Multiply by lambda**r (r >= 0)."""
        if r == 0:
            return self
        n = len(self.coeffs)
        return FormalScalar._raw(([ZERO] * r + list(self.coeffs))[:n])

    def divide_lambda(self, v):
        """Divide by lambda**v; the top v coefficients become unknown and are set to 0."""
        if v == 0:
            return self
        if any(not c.is_zero() for c in self.coeffs[:v]):
            raise NotDivisible(f"series not divisible by lambda^{v}")
        n = len(self.coeffs)
        return FormalScalar._raw(list(self.coeffs[v:]) + [ZERO] * min(v, n))

    def with_order(self, order):
        """Re-truncate (or zero-pad) to another order."""
        return FormalScalar(self.coeffs, order)

    def classical(self):
        return self.coeffs[0]

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def is_real(self):
        return all(c.im == 0 for c in self.coeffs)

    def valuation(self):
        """Least r with a_r != 0, or None for the zero series."""
        for r, c in enumerate(self.coeffs):
            if not c.is_zero():
                return r
        return None

    def leading(self):
        v = self.valuation()
        return ZERO if v is None else self.coeffs[v]

    def is_constant(self):
        return all(c.is_zero() for c in self.coeffs[1:])

    def __eq__(self, other):
        if isinstance(other, FormalScalar):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, _MPQ, Fraction, GaussRational)):
            return self.coeffs[0] == other and self.is_constant()
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __lt__(self, other):
        return is_positive(FormalScalar.coerce(other, self.order) - self) is Sign.POSITIVE

    def __le__(self, other):
        return is_positive(FormalScalar.coerce(other, self.order) - self) is not Sign.NEGATIVE

    def __gt__(self, other):
        return is_positive(self - FormalScalar.coerce(other, self.order)) is Sign.POSITIVE

    def __ge__(self, other):
        return is_positive(self - FormalScalar.coerce(other, self.order)) is not Sign.NEGATIVE

    def __repr__(self):
        return f"FormalScalar({self})"

    def __str__(self):
        parts = []
        for r, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            cs = str(c)
            if "+" in cs[1:] or "-" in cs[1:]:
                cs = f"({cs})"
            if r == 0:
                term = cs
            else:
                lam = "λ" if r == 1 else f"λ^{r}"
                if cs == "1":
                    term = lam
                elif cs == "-1":
                    term = "-" + lam
                else:
                    term = f"{cs}{lam}"
            parts.append(term)
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def to_json(self):
        return {"order": self.order, "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, (int, str)):
            return cls.constant(rational(data))
        return cls([GaussRational.from_json(c) for c in data["coeffs"]], data["order"])


def series_arith(a, b, kind):
    """Ring operations on truncated series: kind in {add, sub, mul, conj}."""
    if kind == "conj":
        return a.conj()
    if a.order != b.order:
        raise OrderMismatch(f"truncation orders differ: {a.order} vs {b.order}")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown kind {kind!r}")


def series_invert(a):
    """Inverse in C[[lambda]] by order-by-order recursion."""
    a0 = a.coeffs[0]
    if a0.is_zero():
        raise NonInvertible(f"{a} has zero classical part")
    inv0 = a0.inverse()
    n = len(a.coeffs)
    b = [inv0]
    for k in range(1, n):
        acc = ZERO
        for i in range(1, k + 1):
            ai = a.coeffs[i]
            if ai.re or ai.im:
                acc = acc + ai * b[k - i]
        b.append(-(acc * inv0))
    return FormalScalar._raw(b)


def is_positive(a):
    """Sign of the lowest non-vanishing coefficient of a real series."""
    if not a.is_real():
        raise NonRealSeries(f"{a} has non-real coefficients")
    lead = a.leading()
    if lead.re > 0:
        return Sign.POSITIVE
    if lead.re < 0:
        return Sign.NEGATIVE
    return Sign.ZERO


def series_sqrt(a):
    """Square root with positive rational classical part (Hensel lift)."""
    if not a.is_real():
        raise NonRealSeries(f"{a} has non-real coefficients")
    a0 = a.coeffs[0].re
    if a0 <= 0:
        raise NotPositive(f"classical part {rational_str(a0)} is not positive")
    r0 = rational_sqrt(a0)
    if r0 is None:
        raise NoExactRoot(f"{rational_str(a0)} is not a rational square")
    r = [r0]
    two_r0 = 2 * r0
    for k in range(1, len(a.coeffs)):
        acc = a.coeffs[k].re
        for i in range(1, k):
            acc -= r[i] * r[k - i]
        r.append(acc / two_r0)
    return FormalScalar._raw(GaussRational(c, 0) for c in r)


def binomial(alpha, k):
    """Generalized binomial coefficient binom(alpha, k) for rational alpha."""
    alpha = rational(alpha)
    out = mpq(1)
    for j in range(k):
        out = out * (alpha - j) / (j + 1)
    return out
