"""Bar-triangular canonical basis solver and the pi = +-1 specializations.

The solver is generic over the scalar type: anything with ``+``, ``-``, ``*``,
``bar()``, ``is_zero()`` and the three ``negative_part``/``constant_part``/
``positive_part`` projections works.  ``PiScalar`` is used at the covering
level and ``SpecLaurent`` for the natively specialized oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .pi_ring import Laurent, PiScalar, RatFunc, simplify

__all__ = [
    "TriangularSystem",
    "SolverError",
    "triangular_bar_solve",
    "SpecLaurent",
    "specialize_udot",
    "sl2_cb_oracle",
    "native_cb_element",
]


class SolverError(ValueError):
    """The input system is not a valid bar-triangular system."""


@dataclass
class TriangularSystem:
    """Standard basis ``index`` with Psi(b_h) = sum_{h' <= h} r[h][h'] b_h'.

    ``lower(h)`` lists every h' strictly below h; ``index`` must be ordered
    so that h' below h implies h' comes first.
    """

    index: list
    lower: Callable[[Hashable], Iterable]
    r: Mapping[Hashable, Mapping[Hashable, object]]
    position: dict = field(init=False)

    def __post_init__(self) -> None:
        self.position = {h: i for i, h in enumerate(self.index)}

    def entry(self, h, h2):
        return self.r.get(h, {}).get(h2)

    def check(self) -> None:
        for h in self.index:
            d = self.entry(h, h)
            if d is None or not (d - _one_like(d)).is_zero():
                raise SolverError(f"diagonal entry at {h!r} is not 1")
            for h2 in self.r.get(h, {}):
                if h2 != h and h2 not in set(self.lower(h)):
                    raise SolverError(f"Psi({h!r}) has a component outside the lower interval: {h2!r}")
        # involution: sum_{h''} bar(r[h][h'']) r[h''][h'] = delta
        for h in self.index:
            acc: dict = {}
            for h2, c in self.r.get(h, {}).items():
                for h3, d in self.r.get(h2, {}).items():
                    v = c.bar() * d
                    acc[h3] = acc[h3] + v if h3 in acc else v
            for h3, v in acc.items():
                target_is_one = h3 == h
                if target_is_one and not (v - _one_like(v)).is_zero():
                    raise SolverError(f"involution condition fails at {h!r}")
                if not target_is_one and not v.is_zero():
                    raise SolverError(f"involution condition fails at ({h!r}, {h3!r})")


def _one_like(x):
    if isinstance(x, SpecLaurent):
        return SpecLaurent(Laurent.monomial(0), x.sign)
    return PiScalar.monomial(0)


def triangular_bar_solve(sys_: TriangularSystem, check: bool = True) -> dict:
    """Unique bar-invariant elements p_h = b_h + sum_{h' < h} p[h][h'] b_h'
    with lower coefficients in the q^-1 lattice."""
    if check:
        sys_.check()
    out: dict = {}
    for h in sys_.index:
        one = _one_like(sys_.entry(h, h))
        p = {h: one}
        lows = sorted(sys_.lower(h), key=lambda x: -sys_.position[x])
        for h1 in lows:
            x = None
            for h2, c in p.items():
                rv = sys_.entry(h2, h1)
                if rv is None:
                    continue
                term = c.bar() * rv
                x = term if x is None else x + term
            if x is None or x.is_zero():
                continue
            neg = x.negative_part()
            if not x.constant_part().is_zero():
                raise SolverError(f"nonzero constant term while solving {h!r} at {h1!r}")
            if not (x.positive_part() + neg.bar()).is_zero():
                raise SolverError(f"bar-antisymmetry fails while solving {h!r} at {h1!r}")
            if not neg.is_zero():
                p[h1] = neg
        out[h] = p
    return out


# ---------------------------------------------------------------------------
# natively specialized scalars


class SpecLaurent:
    """Integer Laurent polynomial with bar q -> sign * q^-1."""

    __slots__ = ("poly", "sign")

    def __init__(self, poly: Laurent, sign: int):
        self.poly = poly
        self.sign = sign

    @classmethod
    def mono(cls, e: int, sign: int, c: int = 1) -> "SpecLaurent":
        return cls(Laurent.monomial(e, c), sign)

    def __add__(self, o: "SpecLaurent") -> "SpecLaurent":
        return SpecLaurent(self.poly + o.poly, self.sign)

    def __sub__(self, o: "SpecLaurent") -> "SpecLaurent":
        return SpecLaurent(self.poly - o.poly, self.sign)

    def __neg__(self) -> "SpecLaurent":
        return SpecLaurent(-self.poly, self.sign)

    def __mul__(self, o):
        if isinstance(o, int):
            return SpecLaurent(self.poly * o, self.sign)
        return SpecLaurent(self.poly * o.poly, self.sign)

    __rmul__ = __mul__

    def __eq__(self, o: object) -> bool:
        if not isinstance(o, SpecLaurent):
            return NotImplemented
        return self.poly == o.poly

    def __hash__(self) -> int:
        return hash(self.poly)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def bar(self) -> "SpecLaurent":
        return SpecLaurent(self.poly.substitute_inverse(self.sign), self.sign)

    def exact_div(self, o: "SpecLaurent") -> "SpecLaurent":
        return SpecLaurent(self.poly.exact_div(o.poly), self.sign)

    def _part(self, pred) -> "SpecLaurent":
        return SpecLaurent(Laurent.from_terms({e: c for e, c in self.poly.terms().items() if pred(e)}), self.sign)

    def negative_part(self) -> "SpecLaurent":
        return self._part(lambda e: e < 0)

    def constant_part(self) -> "SpecLaurent":
        return self._part(lambda e: e == 0)

    def positive_part(self) -> "SpecLaurent":
        return self._part(lambda e: e > 0)

    def __repr__(self) -> str:
        return f"SpecLaurent({self.poly.terms()}, sign={self.sign})"


class _SpecRing:
    """Super quantum combinatorics computed directly at pi = sign."""

    def __init__(self, sign: int):
        self.sign = sign
        self._qint: dict = {}
        self._qbinom: dict = {}

    def one(self) -> SpecLaurent:
        return SpecLaurent.mono(0, self.sign)

    def q(self, e: int) -> SpecLaurent:
        return SpecLaurent.mono(e, self.sign)

    def pi(self, k: int) -> int:
        return self.sign if k % 2 else 1

    def qint(self, n: int) -> SpecLaurent:
        if n not in self._qint:
            if n < 0:
                self._qint[n] = self.qint(-n) * (-self.pi(-n))
            else:
                t: dict = {}
                for i in range(n):
                    e = n - 1 - 2 * i
                    t[e] = t.get(e, 0) + self.pi(n - 1 - i)
                self._qint[n] = SpecLaurent(Laurent.from_terms(t), self.sign)
        return self._qint[n]

    def qbinom(self, n: int, a: int) -> SpecLaurent:
        key = (n, a)
        if key not in self._qbinom:
            num = self.one()
            den = self.one()
            for i in range(1, a + 1):
                num = num * self.qint(n + i - a)
                den = den * self.qint(i)
            self._qbinom[key] = num.exact_div(den)
        return self._qbinom[key]

    def theta(self, n: int) -> SpecLaurent:
        # (-1)^n [n]! (pi q)^{-C(n,2)} (pi q - q^-1)^n
        c = self.one() * ((-1) ** n * self.pi(comb(n, 2)))
        c = c * self.q(-comb(n, 2))
        for i in range(1, n + 1):
            c = c * self.qint(i)
        d = self.q(1) * self.pi(1) - self.q(-1)
        for _ in range(n):
            c = c * d
        return c


# ---------------------------------------------------------------------------
# specialization of modified-algebra elements


def specialize_udot(x, sign: int) -> dict:
    """Coefficientwise pi -> sign: {(a, n, b): Laurent} in EF form."""
    from .pi_ring import specialize

    out = {}
    for m, c in x.terms.items():
        v = specialize(c, sign)
        if isinstance(v, RatFunc):
            lv = v.to_laurent()
            if lv is None:
                raise ArithmeticError("specialization of a non-integral coefficient")
            v = lv
        if not v.is_zero():
            out[(m.a, m.n, m.b)] = v
    return out


def _native_tensor_data(ring: _SpecRing, s: int, t: int):
    """Action pieces on ^w L(s) (x) L(t) computed with specialized scalars.

    Returns functions E(a, vec), F(b, vec) for divided powers acting on
    vectors {(i, j): SpecLaurent} and the Psi map.
    """
    sg = ring.sign

    def add(out, k, v):
        out[k] = out[k] + v if k in out else v

    # inner L(n): F^(a) j -> qbinom(j+a,a) (j+a); E^(c) j -> pi^{c(1-j)+C(c,2)} qbinom(n-j+c,c) (j-c)
    def inner_F(n, a, j):
        return (j + a, ring.qbinom(j + a, a)) if j + a <= n else None

    def inner_E(n, c, j):
        if c > j:
            return None
        return (j - c, ring.qbinom(n - j + c, c) * ring.pi(c * (1 - j) + comb(c, 2)))

    eps_l, kap = s % 2, t % 2

    def left_E(a, i):  # twist: E acts as F on the inner module
        return inner_F(s, a, i)

    def left_F(a, i):  # twist: F acts as pi^{a(1-eps)} E
        r = inner_E(s, a, i)
        return None if r is None else (r[0], r[1] * ring.pi(a * (1 - eps_l)))

    def left_K(b, i):  # twist: K^b acts as K^{-b}; inner weight s - 2i
        return ring.q(-b * (s - 2 * i))

    def right_K(b, j):
        return ring.q(b * (t - 2 * j))

    def E_div(p, vec):
        out: dict = {}
        for (i, j), c in vec.items():
            par_l = i % 2
            for a in range(p + 1):
                b = p - a
                coef = ring.q(a * b) * ring.pi(eps_l * b + b * par_l)
                lv = left_E(a, i)
                if lv is None:
                    continue
                coef = coef * left_K(b, i)
                rv = inner_E(t, b, j)
                if rv is None:
                    continue
                add(out, (lv[0], rv[0]), c * coef * lv[1] * rv[1])
        return {k: v for k, v in out.items() if not v.is_zero()}

    def F_div(p, vec):
        out: dict = {}
        for (i, j), c in vec.items():
            par_l = i % 2
            for a in range(p + 1):
                b = p - a
                coef = ring.q(-a * b) * ring.pi(a * b + b * par_l)
                lv = left_F(a, i)
                if lv is None:
                    continue
                rv = inner_F(t, b, j)
                if rv is None:
                    continue
                coef = coef * right_K(-a, rv[0])
                add(out, (lv[0], rv[0]), c * coef * lv[1] * rv[1])
        return {k: v for k, v in out.items() if not v.is_zero()}

    def psi(h):
        # Theta on the basis vector h (bar fixes it)
        i, j = h
        out: dict = {}
        n = 0
        while True:
            lv = left_F(n, i)
            rv = inner_E(t, n, j)
            if lv is None or rv is None:
                break
            coef = ring.theta(n) * ring.pi(n * (i % 2))
            add(out, (lv[0], rv[0]), coef * lv[1] * rv[1])
            n += 1
        return {k: v for k, v in out.items() if not v.is_zero()}

    return E_div, F_div, psi


def native_tensor_cb(sign: int, s: int, t: int) -> dict:
    """Canonical basis of L(s,t) computed entirely with pi = sign scalars."""
    ring = _SpecRing(sign)
    _, _, psi = _native_tensor_data(ring, s, t)
    index = [(a, b) for a in range(s + 1) for b in range(t + 1)]
    r = {h: psi(h) for h in index}

    def below(h):
        a, b = h
        return [(a - j, b - j) for j in range(1, min(a, b) + 1)]

    return triangular_bar_solve(TriangularSystem(index=index, lower=below, r=r))


def native_cb_element(sign: int, a: int, b: int, k: int) -> dict:
    """CB element (a, b, k) of the specialized modified algebra, in EF form.

    Pick s, t with t - s = k large enough for the tensor module to detect all
    EF monomials of the element, compute the tensor canonical basis natively,
    then solve for the EF-form coefficients unitriangularly.
    """
    ring = _SpecRing(sign)
    # the element sits in weight block with right weight k and EF monomials
    # E^(a-i) 1_{m} F^(b-i), m = k - 2(b-i); these act faithfully on eta (x) nu
    # when s >= a and t >= b
    s = max(a, b - k, -k, 0)
    t = s + k
    if t < b:
        s += b - t
        t = s + k
    E_div, F_div, _ = _native_tensor_data(ring, s, t)
    cb = native_tensor_cb(sign, s, t)[(a, b)]
    target = {h: v for h, v in cb.items()}
    # express the target as sum_i c_i E^(a-i) F^(b-i) (eta (x) nu)
    coeffs: dict = {}
    resid = dict(target)
    for i in range(min(a, b) + 1):
        h = (a - i, b - i)
        img = E_div(a - i, F_div(b - i, {(0, 0): ring.one()}))
        lead = img.get(h)
        c = resid.get(h, SpecLaurent(Laurent(), sign))
        if lead is None:
            if not c.is_zero():
                raise ArithmeticError("native oracle: degenerate leading term")
            continue
        ci = c.exact_div(lead)
        if not ci.is_zero():
            coeffs[(a - i, k - 2 * (b - i), b - i)] = ci.poly
            for kk, v in img.items():
                resid[kk] = resid.get(kk, SpecLaurent(Laurent(), sign)) - ci * v
    if any(not v.is_zero() for v in resid.values()):
        raise ArithmeticError("native oracle: residual after unitriangular solve")
    return coeffs


def sl2_cb_oracle(B: int, K: int, sign: int = 1) -> dict:
    """Canonical basis table {(a, b, k): {(a', n, b'): Laurent}} computed natively."""
    return {
        (a, b, k): native_cb_element(sign, a, b, k)
        for a in range(B + 1)
        for b in range(B + 1)
        for k in range(-K, K + 1)
    }
