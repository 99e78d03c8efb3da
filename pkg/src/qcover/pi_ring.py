"""Coefficient rings for the covering algebra.

``PiScalar`` is an element f + g*pi of Z[q, q^-1][pi]/(pi^2 - 1) and
``PiRational`` the same over Q(q).  Integer Laurent polynomials are backed by
flint's ``fmpz_poly`` with a separate valuation, rational functions by pairs
of ``fmpq_poly``.
"""

from __future__ import annotations

import re
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Union

import flint

__all__ = [
    "Laurent",
    "PiScalar",
    "RatFunc",
    "PiRational",
    "ZeroDivisorError",
    "ScalarParseError",
    "PI",
    "Q",
    "ONE",
    "ZERO",
    "qint",
    "qfact",
    "qbinom",
    "theta_coeff",
    "cone_membership",
    "specialize",
    "parse_scalar",
    "format_scalar",
    "parse_coefficient",
    "format_coefficient",
    "as_rational",
    "Cursor",
    "simplify",
    "DQ",
    "QPI",
]


class ZeroDivisorError(ArithmeticError):
    """Raised when inverting a zero divisor of Q(q)^pi."""


class ScalarParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str = ""):
        super().__init__(f"{msg} at position {pos}" + (f": {text!r}" if text else ""))
        self.pos = pos


# ---------------------------------------------------------------------------
# integer Laurent polynomials


def _poly_coeffs(p: flint.fmpz_poly) -> tuple[int, ...]:
    return tuple(int(c) for c in p.coeffs())


class Laurent:
    """Integer Laurent polynomial q^val * poly(q) with poly(0) != 0."""

    __slots__ = ("poly", "val", "_hash")

    def __init__(self, poly: flint.fmpz_poly | None = None, val: int = 0):
        if poly is None or poly.is_zero():
            self.poly = flint.fmpz_poly()
            self.val = 0
        else:
            if poly[0] == 0:
                cs = poly.coeffs()
                k = 0
                while cs[k] == 0:
                    k += 1
                poly = flint.fmpz_poly(cs[k:])
                val += k
            self.poly = poly
            self.val = val
        self._hash = None

    @classmethod
    def from_terms(cls, terms: Mapping[int, int]) -> "Laurent":
        terms = {e: c for e, c in terms.items() if c}
        if not terms:
            return cls()
        lo, hi = min(terms), max(terms)
        cs = [0] * (hi - lo + 1)
        for e, c in terms.items():
            cs[e - lo] = c
        return cls(flint.fmpz_poly(cs), lo)

    @classmethod
    def monomial(cls, e: int, c: int = 1) -> "Laurent":
        return cls(flint.fmpz_poly([c]), e) if c else cls()

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __bool__(self) -> bool:
        return not self.poly.is_zero()

    def terms(self) -> dict[int, int]:
        return {self.val + i: int(c) for i, c in enumerate(self.poly.coeffs()) if c}

    def degree(self) -> int:
        return self.val + self.poly.degree()

    def low(self) -> int:
        return self.val

    def __add__(self, other: "Laurent") -> "Laurent":
        if not other:
            return self
        if not self:
            return other
        v = min(self.val, other.val)
        p = self.poly
        if self.val > v:
            p = p * flint.fmpz_poly([0] * (self.val - v) + [1])
        r = other.poly
        if other.val > v:
            r = r * flint.fmpz_poly([0] * (other.val - v) + [1])
        return Laurent(p + r, v)

    def __neg__(self) -> "Laurent":
        return Laurent(-self.poly, self.val) if self else self

    def __sub__(self, other: "Laurent") -> "Laurent":
        return self + (-other)

    def __mul__(self, other: Union["Laurent", int]) -> "Laurent":
        if isinstance(other, int):
            return Laurent(self.poly * other, self.val) if other and self else Laurent()
        if not self or not other:
            return Laurent()
        return Laurent(self.poly * other.poly, self.val + other.val)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Laurent):
            return NotImplemented
        return self.val == other.val and self.poly == other.poly

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.val, _poly_coeffs(self.poly)))
        return self._hash

    def exact_div(self, other: "Laurent") -> "Laurent":
        if not other:
            raise ZeroDivisionError("division by zero Laurent polynomial")
        quo, rem = divmod(self.poly, other.poly)
        if not rem.is_zero():
            raise ArithmeticError("inexact Laurent division")
        return Laurent(quo, self.val - other.val)

    def substitute_inverse(self, sign: int = 1) -> "Laurent":
        """q -> sign * q^-1."""
        if not self:
            return self
        return Laurent.from_terms(
            {-e: (c if sign == 1 or e % 2 == 0 else -c) for e, c in self.terms().items()}
        )

    def __repr__(self) -> str:
        return f"Laurent({self.terms()})"


_LZERO = Laurent()
_LONE = Laurent.monomial(0)


# ---------------------------------------------------------------------------
# Z[q, q^-1][pi]


class PiScalar:
    """even + odd * pi with integer Laurent parts."""

    __slots__ = ("even", "odd", "_hash")

    def __init__(self, even: Laurent = _LZERO, odd: Laurent = _LZERO):
        self.even = even
        self.odd = odd
        self._hash = None

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, int], int]) -> "PiScalar":
        """Build from {(pi_power, q_exponent): coefficient}."""
        ev: dict[int, int] = {}
        od: dict[int, int] = {}
        for (p, e), c in terms.items():
            d = od if p % 2 else ev
            d[e] = d.get(e, 0) + c
        return cls(Laurent.from_terms(ev), Laurent.from_terms(od))

    @classmethod
    def monomial(cls, e: int = 0, pi: int = 0, c: int = 1) -> "PiScalar":
        m = Laurent.monomial(e, c)
        return cls(_LZERO, m) if pi % 2 else cls(m, _LZERO)

    @classmethod
    def coerce(cls, x: Union["PiScalar", int]) -> "PiScalar":
        if isinstance(x, PiScalar):
            return x
        if isinstance(x, int):
            return cls(Laurent.monomial(0, x))
        raise TypeError(f"cannot coerce {type(x).__name__} to PiScalar")

    def is_zero(self) -> bool:
        return not self.even and not self.odd

    def __bool__(self) -> bool:
        return not self.is_zero()

    def terms(self) -> dict[tuple[int, int], int]:
        out = {(0, e): c for e, c in self.even.terms().items()}
        out.update({(1, e): c for e, c in self.odd.terms().items()})
        return out

    def __add__(self, other):
        if isinstance(other, int):
            other = PiScalar.coerce(other)
        if not isinstance(other, PiScalar):
            return NotImplemented
        return PiScalar(self.even + other.even, self.odd + other.odd)

    __radd__ = __add__

    def __neg__(self) -> "PiScalar":
        return PiScalar(-self.even, -self.odd)

    def __sub__(self, other):
        if isinstance(other, int):
            other = PiScalar.coerce(other)
        if not isinstance(other, PiScalar):
            return NotImplemented
        return PiScalar(self.even - other.even, self.odd - other.odd)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return PiScalar(self.even * other, self.odd * other)
        if not isinstance(other, PiScalar):
            return NotImplemented
        f1, g1, f2, g2 = self.even, self.odd, other.even, other.odd
        if not g1 and not g2:
            return PiScalar(f1 * f2, _LZERO)
        return PiScalar(f1 * f2 + g1 * g2, f1 * g2 + g1 * f2)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PiScalar":
        if n < 0:
            return self.unit_inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        return PiRational.coerce(self) / other

    def __rtruediv__(self, other):
        return PiRational.coerce(other) / self

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = PiScalar.coerce(other)
        if isinstance(other, PiScalar):
            return self.even == other.even and self.odd == other.odd
        if isinstance(other, PiRational):
            return other == self
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.even, self.odd))
        return self._hash

    def unit_inverse(self) -> "PiScalar":
        """Inverse of a unit +-pi^d q^e."""
        t = self.terms()
        if len(t) != 1:
            raise ArithmeticError(f"{format_scalar(self)} is not a monomial unit")
        ((p, e), c), = t.items()
        if c not in (1, -1):
            raise ArithmeticError(f"{format_scalar(self)} is not a monomial unit")
        return PiScalar.monomial(-e, p, c)

    def bar(self) -> "PiScalar":
        """q -> pi q^-1, pi -> pi."""
        out: dict[tuple[int, int], int] = {}
        for (p, e), c in self.terms().items():
            out[(p + e) % 2, -e] = c
        return PiScalar.from_terms(out)

    def specialize(self, sign: int) -> Laurent:
        return self.even + self.odd * sign if sign == -1 else self.even + self.odd

    def exact_div(self, other: "PiScalar") -> "PiScalar":
        """self / other, required to lie in Z[q, q^-1][pi]."""
        other = PiScalar.coerce(other)
        h, k = other.even, other.odd
        if not k:
            return PiScalar(self.even.exact_div(h), self.odd.exact_div(h))
        norm = h * h - k * k
        if not norm:
            raise ZeroDivisorError("exact division by a zero divisor")
        num = self * PiScalar(h, -k)
        return PiScalar(num.even.exact_div(norm), num.odd.exact_div(norm))

    def negative_part(self) -> "PiScalar":
        return PiScalar.from_terms({k: c for k, c in self.terms().items() if k[1] < 0})

    def constant_part(self) -> "PiScalar":
        return PiScalar.from_terms({k: c for k, c in self.terms().items() if k[1] == 0})

    def positive_part(self) -> "PiScalar":
        return PiScalar.from_terms({k: c for k, c in self.terms().items() if k[1] > 0})

    def __repr__(self) -> str:
        return f"PiScalar({format_scalar(self)!r})"

    def __str__(self) -> str:
        return format_scalar(self)


ZERO = PiScalar()
ONE = PiScalar.monomial(0)
PI = PiScalar.monomial(0, 1)
Q = PiScalar.monomial(1)


# ---------------------------------------------------------------------------
# Q(q)


def _fmpq(p) -> flint.fmpq_poly:
    return p if isinstance(p, flint.fmpq_poly) else flint.fmpq_poly(p)


class RatFunc:
    """Reduced num/den over Q with monic den."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _reduced: bool = False):
        num = _fmpq(num)
        den = flint.fmpq_poly([1]) if den is None else _fmpq(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            if num.is_zero():
                den = flint.fmpq_poly([1])
            else:
                g = num.gcd(den)
                if g.degree() > 0:
                    num = num // g
                    den = den // g
                lc = den.leading_coefficient()
                if lc != 1:
                    num = num / lc
                    den = den / lc
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def from_laurent(cls, x: Laurent) -> "RatFunc":
        if not x:
            return cls(flint.fmpq_poly())
        if x.val >= 0:
            p = flint.fmpq_poly(x.poly) * flint.fmpq_poly([0] * x.val + [1])
            return cls(p, None, _reduced=True)
        return cls(flint.fmpq_poly(x.poly), flint.fmpq_poly([0] * (-x.val) + [1]), _reduced=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if not other:
            return self
        if not self:
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, _reduced=True)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self + (-other)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        if not self or not other:
            return RatFunc(flint.fmpq_poly())
        return RatFunc(self.num * other.num, self.den * other.den)

    def inverse(self) -> "RatFunc":
        if not self:
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        return self * other.inverse()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((str(self.num), str(self.den)))
        return self._hash

    def substitute_inverse(self, sign: int = 1) -> "RatFunc":
        """q -> sign / q."""
        def flip(p: flint.fmpq_poly, d: int) -> flint.fmpq_poly:
            # q^d * p(sign/q)
            cs = p.coeffs()
            out = [0] * (d + 1)
            for i, c in enumerate(cs):
                out[d - i] = c * (sign ** i)
            return flint.fmpq_poly(out)

        dn, dd = max(self.num.degree(), 0), max(self.den.degree(), 0)
        d = max(dn, dd)
        return RatFunc(flip(self.num, d), flip(self.den, d))

    def to_laurent(self) -> Laurent | None:
        """Return the Laurent polynomial if self lies in Z[q, q^-1]."""
        if not self:
            return Laurent()
        d = self.den.degree()
        if self.den != flint.fmpq_poly([0] * d + [1]):
            return None
        if self.num.denom() != 1:
            return None
        return Laurent(flint.fmpz_poly([int(c) for c in self.num.numer().coeffs()]), -d)

    def __repr__(self) -> str:
        return f"RatFunc(({self.num})/({self.den}))"


_RZERO = RatFunc(flint.fmpq_poly())
_RONE = RatFunc(flint.fmpq_poly([1]))


# ---------------------------------------------------------------------------
# Q(q)^pi


class PiRational:
    """Element of Q(q)[pi]/(pi^2 - 1).

    Stored by its two specializations (value at pi = +1, value at pi = -1),
    which is a ring isomorphism onto Q(q) x Q(q).  ``even`` and ``odd`` are
    recovered as half-sum and half-difference.
    """

    __slots__ = ("plus", "minus", "_hash")

    def __init__(self, plus: RatFunc, minus: RatFunc):
        self.plus = plus
        self.minus = minus
        self._hash = None

    @classmethod
    def coerce(cls, x) -> "PiRational":
        if isinstance(x, PiRational):
            return x
        if isinstance(x, int):
            r = RatFunc(flint.fmpq_poly([x]))
            return cls(r, r)
        if isinstance(x, PiScalar):
            return cls(RatFunc.from_laurent(x.specialize(1)), RatFunc.from_laurent(x.specialize(-1)))
        raise TypeError(f"cannot coerce {type(x).__name__} to PiRational")

    @classmethod
    def from_parts(cls, even: RatFunc, odd: RatFunc) -> "PiRational":
        return cls(even + odd, even - odd)

    @property
    def even(self) -> RatFunc:
        return (self.plus + self.minus) * RatFunc(flint.fmpq_poly([flint.fmpq(1, 2)]))

    @property
    def odd(self) -> RatFunc:
        return (self.plus - self.minus) * RatFunc(flint.fmpq_poly([flint.fmpq(1, 2)]))

    def is_zero(self) -> bool:
        return not self.plus and not self.minus

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _co(self, other):
        if isinstance(other, (int, PiScalar, PiRational)):
            return PiRational.coerce(other)
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return PiRational(self.plus + o.plus, self.minus + o.minus)

    __radd__ = __add__

    def __neg__(self) -> "PiRational":
        return PiRational(-self.plus, -self.minus)

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return PiRational(self.plus - o.plus, self.minus - o.minus)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return PiRational(self.plus * o.plus, self.minus * o.minus)

    __rmul__ = __mul__

    def is_invertible(self) -> bool:
        return bool(self.plus) and bool(self.minus)

    def inverse(self) -> "PiRational":
        if not self.is_invertible():
            raise ZeroDivisorError("element is a zero divisor of Q(q)^pi")
        return PiRational(self.plus.inverse(), self.minus.inverse())

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return PiRational.coerce(other) / self

    def __pow__(self, n: int) -> "PiRational":
        if n < 0:
            return self.inverse() ** (-n)
        out = PiRational.coerce(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self.plus == o.plus and self.minus == o.minus

    def __hash__(self) -> int:
        s = self.to_scalar()
        if s is not None:
            return hash(s)
        if self._hash is None:
            self._hash = hash((self.plus, self.minus))
        return self._hash

    def bar(self) -> "PiRational":
        return PiRational(self.plus.substitute_inverse(1), self.minus.substitute_inverse(-1))

    def specialize(self, sign: int) -> RatFunc:
        return self.plus if sign == 1 else self.minus

    def to_scalar(self) -> PiScalar | None:
        """The PiScalar equal to self, or None when not integral."""
        lp = self.plus.to_laurent()
        if lp is None:
            return None
        lm = self.minus.to_laurent()
        if lm is None:
            return None
        s = lp + lm
        d = lp - lm
        ev, od = s.terms(), d.terms()
        if any(c % 2 for c in ev.values()) or any(c % 2 for c in od.values()):
            return None
        return PiScalar(
            Laurent.from_terms({e: c // 2 for e, c in ev.items()}),
            Laurent.from_terms({e: c // 2 for e, c in od.items()}),
        )

    def is_integral(self) -> bool:
        return self.to_scalar() is not None

    def __repr__(self) -> str:
        return f"PiRational({format_coefficient(self)!r})"

    def __str__(self) -> str:
        return format_coefficient(self)


Scalar = Union[PiScalar, PiRational]


def as_rational(x) -> PiRational:
    return PiRational.coerce(x)


def simplify(x):
    """Return a PiScalar when x is integral, else x unchanged."""
    if isinstance(x, PiRational):
        s = x.to_scalar()
        return s if s is not None else x
    return PiScalar.coerce(x)


def is_zero(x) -> bool:
    return x == 0 if isinstance(x, int) else x.is_zero()


def bar(x):
    return x.bar()


# ---------------------------------------------------------------------------
# super quantum combinatorics


@lru_cache(maxsize=None)
def qint(n: int) -> PiScalar:
    if n < 0:
        return -(PI ** (-n % 2)) * qint(-n)
    return PiScalar.from_terms({(n - 1 - i, n - 1 - 2 * i): 1 for i in range(n)})


@lru_cache(maxsize=None)
def qfact(a: int) -> PiScalar:
    if a < 0:
        raise ValueError("qfact needs a >= 0")
    out = ONE
    for i in range(1, a + 1):
        out = out * qint(i)
    return out


@lru_cache(maxsize=None)
def qbinom(n: int, a: int) -> PiScalar:
    if a < 0:
        raise ValueError("qbinom needs a >= 0")
    num = ONE
    for i in range(1, a + 1):
        num = num * qint(n + i - a)
    return num.exact_div(qfact(a))


QPI = PI * Q  # pi q
DQ = QPI - Q.unit_inverse()  # pi q - q^-1


@lru_cache(maxsize=None)
def theta_coeff(n: int) -> PiScalar:
    if n < 0:
        raise ValueError("theta_coeff needs n >= 0")
    sign = -1 if n % 2 else 1
    return qfact(n) * (QPI ** (-comb(n, 2))) * (DQ ** n) * sign


def cone_membership(x, cone: str) -> bool:
    x = simplify(x)
    if not isinstance(x, PiScalar):
        return False
    if cone == "positive":
        return all(c > 0 for c in x.terms().values())
    if cone == "q_minus_lattice":
        return all(e < 0 for (_, e) in x.terms())
    raise ValueError(f"unknown cone {cone!r}")


def specialize(x, sign: int):
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if isinstance(x, PiRational):
        s = x.to_scalar()
        return s.specialize(sign) if s is not None else x.specialize(sign)
    return PiScalar.coerce(x).specialize(sign)


# ---------------------------------------------------------------------------
# text


def _term_text(c: int, pi: int, e: int) -> str:
    if e == 0:
        if not pi:
            return str(c)
        head = "" if c == 1 else ("-1*" if c == -1 else f"{c}*")
        return head + "p"
    head = "" if c == 1 else ("-1*" if c == -1 else f"{c}*")
    if pi:
        head += "p*"
    return head + ("q" if e == 1 else f"q^{e}")


def format_scalar(x) -> str:
    x = PiScalar.coerce(x)
    t = x.terms()
    if not t:
        return "0"
    keys = sorted(t, key=lambda k: (-k[1], k[0]))
    return " + ".join(_term_text(t[k], k[0], k[1]) for k in keys)


def format_laurent(x: Laurent) -> str:
    return format_scalar(PiScalar(x, _LZERO))


def _poly_text(p: flint.fmpz_poly) -> str:
    return format_laurent(Laurent(p, 0))


def format_coefficient(x) -> str:
    """Scalar text, or "(N)/(D)" for a non-integral PiRational.

    D is an integer polynomial in q with D(0) != 0 and positive leading
    coefficient, primitive up to the integer needed to make N integral; N is
    a PiScalar.
    """
    s = simplify(x)
    if isinstance(s, PiScalar):
        return format_scalar(s)
    num, den = rational_num_den(s)
    return f"({format_scalar(num)})/({_poly_text(den)})"


def rational_num_den(x: PiRational) -> tuple[PiScalar, flint.fmpz_poly]:
    """Write x = N / D with N in Z[q,q^-1][pi] and D a canonical integer poly."""
    # common denominator of both specializations
    lcm = x.plus.den
    g = lcm.gcd(x.minus.den)
    lcm = lcm * x.minus.den // g
    # strip powers of q (units of the Laurent ring)
    cs = lcm.coeffs()
    k = 0
    while cs[k] == 0:
        k += 1
    lcm = flint.fmpq_poly(cs[k:])
    den_z = lcm * lcm.denom()
    zc = [int(c) for c in den_z.numer().coeffs()]
    from math import gcd

    g2 = 0
    for c in zc:
        g2 = gcd(g2, c)
    zc = [c // g2 for c in zc]
    if zc[-1] < 0:
        zc = [-c for c in zc]
    D = flint.fmpz_poly(zc)
    # clear rational content of the numerators, then the factor 1/2 that
    # the even/odd split can introduce
    y = x * PiRational.coerce(PiScalar(Laurent(D, 0)))
    c = 1
    for part in (y.plus, y.minus):
        c = c * int(part.num.denom()) // gcd(c, int(part.num.denom()))
    for extra in (1, 2):
        D2 = D * (c * extra)
        n = (x * PiRational.coerce(PiScalar(Laurent(D2, 0)))).to_scalar()
        if n is not None:
            return n, D2
    raise ArithmeticError("numerator failed to clear; internal error")


class Cursor:
    """Tiny tokenizer cursor shared by the text grammars."""

    _num = re.compile(r"-?\d+")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def accept(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str) -> None:
        if not self.accept(s):
            self.fail(f"expected {s!r}")

    def int(self) -> int:
        self.skip()
        m = self._num.match(self.text, self.pos)
        if not m:
            self.fail("expected integer")
        self.pos = m.end()
        return int(m.group())

    def peek_int(self) -> bool:
        self.skip()
        return bool(self._num.match(self.text, self.pos))

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def fail(self, msg: str):
        raise ScalarParseError(msg, self.pos, self.text)


def _parse_scalar_term(cur: Cursor) -> PiScalar:
    cur.skip()
    c = 1
    seen = False
    if cur.peek_int():
        c = cur.int()
        seen = True
        save = cur.pos
        if not (cur.accept("*") and (cur.peek("p") or cur.peek("q"))):
            cur.pos = save
            return PiScalar.monomial(0, 0, c)
    elif cur.accept("-"):
        c = -1
    pi = 0
    if cur.accept("p"):
        pi = 1
        seen = True
        save = cur.pos
        if not (cur.accept("*") and cur.peek("q")):
            cur.pos = save
            return PiScalar.monomial(0, pi, c)
    if cur.accept("q"):
        e = 1
        if cur.accept("^"):
            e = cur.int()
        return PiScalar.monomial(e, pi, c)
    if not seen:
        cur.fail("expected scalar term")
    cur.fail("expected 'q'")


def parse_scalar_at(cur: Cursor) -> PiScalar:
    out = _parse_scalar_term(cur)
    while True:
        if cur.accept("+"):
            out = out + _parse_scalar_term(cur)
        elif cur.peek("-") and not cur.peek("->"):
            cur.accept("-")
            out = out - _parse_scalar_term(cur)
        else:
            return out


def parse_scalar(text: str) -> PiScalar:
    cur = Cursor(text)
    out = parse_scalar_at(cur)
    if not cur.at_end():
        cur.fail("trailing input")
    return out


def parse_coefficient_at(cur: Cursor):
    """A parenthesized scalar, optionally "/(D)", or a single scalar term."""
    if cur.accept("("):
        num = parse_scalar_at(cur)
        cur.expect(")")
        if cur.accept("/"):
            cur.expect("(")
            den = parse_scalar_at(cur)
            cur.expect(")")
            if den.is_zero():
                cur.fail("zero denominator")
            return simplify(PiRational.coerce(num) / den)
        return num
    return _parse_scalar_term(cur)


def parse_coefficient(text: str):
    cur = Cursor(text)
    if "/" in text:
        out = parse_coefficient_at(cur)
    else:
        out = parse_scalar_at(cur)
    if not cur.at_end():
        cur.fail("trailing input")
    return out
