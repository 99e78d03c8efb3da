"""The covering algebra U = U_0 + U_1 in the PBW basis F^(a) K^b E^(c).

Elements are sparse maps from ``PBWMonomial`` to coefficients in
``PiScalar`` or ``PiRational``.  Multiplication rewrites E^(r) F^(s) with the
divided-power commutation formula; ``naive_multiply`` is an independent
reference that only uses the defining relations and ordinary powers.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple

from .pi_ring import (
    DQ,
    ONE,
    PI,
    QPI,
    Cursor,
    PiRational,
    PiScalar,
    ScalarParseError,
    format_coefficient,
    parse_coefficient_at,
    qbinom,
    qfact,
    simplify,
)

__all__ = [
    "PBWMonomial",
    "PBWElement",
    "TensorElement",
    "monomial",
    "generator",
    "unit",
    "multiply",
    "naive_multiply",
    "apply_morphism",
    "k_bracket",
    "k_binom",
    "casimir",
    "casimir_ef_form",
    "coproduct",
    "coproduct_generator",
    "counit",
    "antipode",
    "parse_element",
    "format_element",
    "MORPHISMS",
]


def pi_pow(k: int) -> PiScalar:
    return PI if k % 2 else ONE


def q_pow(e: int) -> PiScalar:
    return PiScalar.monomial(e)


def _is_zero(c) -> bool:
    return c.is_zero()


class PBWMonomial(NamedTuple):
    eps: int
    a: int  # F power
    b: int  # K power
    c: int  # E power

    @property
    def weight(self) -> int:
        return 2 * self.c - 2 * self.a

    @property
    def parity(self) -> int:
        return (self.a + self.c) % 2


class PBWElement:
    """Finite linear combination of PBW monomials."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[PBWMonomial, object] | None = None):
        self.terms: dict[PBWMonomial, object] = {}
        if terms:
            for m, c in terms.items():
                if isinstance(c, int):
                    c = PiScalar.coerce(c)
                if not c.is_zero():
                    self.terms[PBWMonomial(*m)] = c

    @classmethod
    def _raw(cls, terms: dict) -> "PBWElement":
        out = cls()
        out.terms = {m: c for m, c in terms.items() if not c.is_zero()}
        return out

    def __iter__(self) -> Iterator[tuple[PBWMonomial, object]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "PBWElement") -> "PBWElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return PBWElement._raw(out)

    def __neg__(self) -> "PBWElement":
        return PBWElement._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "PBWElement") -> "PBWElement":
        return self + (-other)

    def scale(self, s) -> "PBWElement":
        if isinstance(s, int):
            s = PiScalar.coerce(s)
        return PBWElement._raw({m: c * s for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PBWElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PBWElement):
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return all(c == other.terms[m] for m, c in self.terms.items())

    def __hash__(self):
        raise TypeError("PBWElement is not hashable")

    def simplified(self) -> "PBWElement":
        return PBWElement._raw({m: simplify(c) for m, c in self.terms.items()})

    def is_integral(self) -> bool:
        return all(isinstance(simplify(c), PiScalar) for c in self.terms.values())

    def sector_part(self, eps: int) -> "PBWElement":
        return PBWElement._raw({m: c for m, c in self.terms.items() if m.eps == eps})

    def map_coefficients(self, f: Callable) -> "PBWElement":
        return PBWElement._raw({m: f(c) for m, c in self.terms.items()})

    def __repr__(self) -> str:
        return f"PBWElement({format_element(self)!r})"

    def __str__(self) -> str:
        return format_element(self)


def monomial(eps: int, a: int, b: int, c: int, coeff=None) -> PBWElement:
    if a < 0 or c < 0:
        raise ValueError("divided powers need nonnegative exponents")
    if eps not in (0, 1):
        raise ValueError("sector must be 0 or 1")
    return PBWElement({PBWMonomial(eps, a, b, c): ONE if coeff is None else coeff})


def generator(name: str, eps: int, power: int = 1) -> PBWElement:
    """E, F (divided power ``power``), K (power may be negative) or e."""
    if name == "E":
        return monomial(eps, 0, 0, power)
    if name == "F":
        return monomial(eps, power, 0, 0)
    if name == "K":
        return monomial(eps, 0, power, 0)
    if name == "e":
        return monomial(eps, 0, 0, 0)
    raise ValueError(f"unknown generator {name!r}")


def unit() -> PBWElement:
    return monomial(0, 0, 0, 0) + monomial(1, 0, 0, 0)


# ---------------------------------------------------------------------------
# [K; n] and its binomials as K-polynomials


@lru_cache(maxsize=None)
def _k_bracket_poly(eps: int, n: int) -> dict[int, PiRational]:
    inv = PiRational.coerce(DQ).inverse()
    return {1: (QPI ** n) * pi_pow(eps) * inv, -1: -(q_pow(-n) * inv)}


def _kpoly_mul(p: dict, r: dict) -> dict:
    out: dict = {}
    for i, x in p.items():
        for j, y in r.items():
            v = x * y
            out[i + j] = out[i + j] + v if i + j in out else v
    return {k: v for k, v in out.items() if not v.is_zero()}


@lru_cache(maxsize=None)
def _k_binom_poly(eps: int, n: int, a: int) -> dict[int, object]:
    if a == 0:
        return {0: ONE}
    out: dict = {0: PiRational.coerce(1)}
    for j in range(1, a + 1):
        out = _kpoly_mul(out, _k_bracket_poly(eps, n + j - a))
    inv = PiRational.coerce(qfact(a)).inverse()
    return {k: simplify(v * inv) for k, v in out.items()}


def _kpoly_element(eps: int, poly: Mapping[int, object]) -> PBWElement:
    return PBWElement({PBWMonomial(eps, 0, k, 0): v for k, v in poly.items()})


def k_bracket(eps: int, n: int) -> PBWElement:
    return _kpoly_element(eps, _k_bracket_poly(eps, n))


def k_binom(eps: int, n: int, a: int) -> PBWElement:
    if a < 0:
        raise ValueError("k_binom needs a >= 0")
    return _kpoly_element(eps, _k_binom_poly(eps, n, a))


# ---------------------------------------------------------------------------
# multiplication


@lru_cache(maxsize=200_000)
def _mono_mul(m1: PBWMonomial, m2: PBWMonomial) -> tuple[tuple[PBWMonomial, object], ...]:
    if m1.eps != m2.eps:
        return ()
    eps = m1.eps
    a1, b1, c1 = m1.a, m1.b, m1.c
    a2, b2, c2 = m2.a, m2.b, m2.c
    r, s = c1, a2
    out: dict = {}
    for i in range(min(r, s) + 1):
        fa, ec = s - i, r - i
        base = (
            pi_pow(r * s + comb(i + 1, 2))
            * q_pow(-2 * b1 * fa - 2 * b2 * ec)
            * qbinom(a1 + fa, a1)
            * qbinom(ec + c2, c2)
        )
        for kp, kc in _k_binom_poly(eps, 2 * i - (r + s), i).items():
            m = PBWMonomial(eps, a1 + fa, b1 + kp + b2, ec + c2)
            v = base * kc
            out[m] = out[m] + v if m in out else v
    return tuple((m, simplify(v)) for m, v in out.items() if not v.is_zero())


def multiply(x: PBWElement, y: PBWElement) -> PBWElement:
    out: dict = {}
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            if m1.eps != m2.eps:
                continue
            cc = c1 * c2
            for m, v in _mono_mul(m1, m2):
                w = cc * v
                out[m] = out[m] + w if m in out else w
    return PBWElement._raw(out)


def product(*xs: PBWElement) -> PBWElement:
    out = xs[0]
    for x in xs[1:]:
        out = multiply(out, x)
    return out


def power(x: PBWElement, n: int) -> PBWElement:
    eps_set = {m.eps for m in x.terms}
    out = PBWElement({PBWMonomial(e, 0, 0, 0): ONE for e in (eps_set or {0, 1})})
    for _ in range(n):
        out = multiply(out, x)
    return out


# reference straightening with ordinary powers and the defining relations only


def _ord_right_letter(terms: dict, eps: int, letter: str) -> dict:
    inv = PiRational.coerce(DQ).inverse()
    alpha = pi_pow(eps) * inv
    beta = -inv
    out: dict = {}

    def add(k, v):
        out[k] = out[k] + v if k in out else v

    for (a, b, c), v in terms.items():
        if letter == "E":
            add((a, b, c + 1), v)
        elif letter == "K":
            add((a, b + 1, c), v * q_pow(-2 * c))
        elif letter == "k":
            add((a, b - 1, c), v * q_pow(2 * c))
        elif letter == "F":
            # E^c F = pi^c F E^c + sum_j pi^j E^(c-1-j) [K;0] E^j
            add((a + 1, b, c), v * pi_pow(c) * q_pow(-2 * b))
            for j in range(c):
                m = c - 1 - j
                add((a, b + 1, c - 1), v * pi_pow(j) * alpha * q_pow(-2 * m))
                add((a, b - 1, c - 1), v * pi_pow(j) * beta * q_pow(2 * m))
        else:
            raise ValueError(letter)
    return {k: x for k, x in out.items() if not x.is_zero()}


def _letters(m: PBWMonomial) -> list[str]:
    return ["F"] * m.a + (["K"] * m.b if m.b > 0 else ["k"] * (-m.b)) + ["E"] * m.c


def naive_multiply(x: PBWElement, y: PBWElement) -> PBWElement:
    """Product computed letter by letter from the defining relations."""
    out = PBWElement()
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            if m1.eps != m2.eps:
                continue
            eps = m1.eps
            scale = PiRational.coerce(c1 * c2) / (qfact(m1.a) * qfact(m1.c) * qfact(m2.a) * qfact(m2.c))
            cur = {(m1.a, m1.b, m1.c): scale}
            for letter in _letters(m2):
                cur = _ord_right_letter(cur, eps, letter)
            out = out + PBWElement(
                {PBWMonomial(eps, a, b, c): v * qfact(a) * qfact(c) for (a, b, c), v in cur.items()}
            )
    return out.simplified()


# ---------------------------------------------------------------------------
# (anti-)automorphisms


def _bar_coeff(c):
    return c.bar()


@lru_cache(maxsize=None)
def _morphism_mono(name: str, m: PBWMonomial) -> PBWElement:
    eps, a, b, c = m
    if name == "psi":
        return monomial(eps, a, -b, c, pi_pow(eps * b))
    if name == "omega":
        return product(
            monomial(eps, 0, 0, a, pi_pow(a * (1 - eps))),
            monomial(eps, 0, -b, 0),
            monomial(eps, c, 0, 0),
        )
    if name == "tau":
        return product(
            monomial(eps, 0, 0, c, pi_pow(c * (1 - eps))),
            monomial(eps, 0, -b, 0),
            monomial(eps, a, 0, 0),
        )
    if name == "rho":
        rE = multiply(monomial(eps, 0, 1, 0, PiScalar.monomial(1)), monomial(eps, 1, 0, 0))
        rF = multiply(monomial(eps, 0, -1, 0, PiScalar.monomial(1)), monomial(eps, 0, 0, 1))
        e_part = power(rE, c).scale(PiRational.coerce(qfact(c)).inverse()).simplified()
        f_part = power(rF, a).scale(PiRational.coerce(qfact(a)).inverse()).simplified()
        return product(e_part, monomial(eps, 0, b, 0), f_part)
    raise ValueError(f"unknown morphism {name!r}")


MORPHISMS = ("psi", "omega", "tau", "rho")


def apply_morphism(name: str, x: PBWElement) -> PBWElement:
    if name not in MORPHISMS:
        raise ValueError(f"unknown morphism {name!r}; expected one of {', '.join(MORPHISMS)}")
    out = PBWElement()
    for m, c in x.terms.items():
        img = _morphism_mono(name, m)
        out = out + img.scale(c.bar() if name == "psi" else c)
    return out


# ---------------------------------------------------------------------------
# Casimir


def casimir(eps: int) -> PBWElement:
    """C = pi F E + (pi^(1-eps) q K + q^-1 K^-1) / (pi q - q^-1)^2."""
    d2 = PiRational.coerce(DQ * DQ).inverse()
    return (
        monomial(eps, 1, 0, 1, PI)
        + monomial(eps, 0, 1, 0, (pi_pow(1 - eps) * q_pow(1)) * d2)
        + monomial(eps, 0, -1, 0, q_pow(-1) * d2)
    ).simplified()


def casimir_ef_form(eps: int) -> PBWElement:
    """The same element written as E F + (pi^eps K q^-1 + pi K^-1 q) / (pi q - q^-1)^2."""
    d2 = PiRational.coerce(DQ * DQ).inverse()
    return (
        multiply(generator("E", eps), generator("F", eps))
        + monomial(eps, 0, 1, 0, (pi_pow(eps) * q_pow(-1)) * d2)
        + monomial(eps, 0, -1, 0, (PI * q_pow(1)) * d2)
    ).simplified()


# ---------------------------------------------------------------------------
# tensors


TensorKey = tuple  # tuple of PBWMonomial


class TensorElement:
    """Element of U^{(x) n} with the super sign rule for products."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[TensorKey, object] | None = None):
        self.terms: dict = {}
        if terms:
            for k, c in terms.items():
                if isinstance(c, int):
                    c = PiScalar.coerce(c)
                if not c.is_zero():
                    self.terms[tuple(PBWMonomial(*m) for m in k)] = c

    @classmethod
    def _raw(cls, terms: dict) -> "TensorElement":
        out = cls()
        out.terms = {k: c for k, c in terms.items() if not c.is_zero()}
        return out

    @classmethod
    def pure(cls, *xs: PBWElement) -> "TensorElement":
        out: dict = {(): ONE}
        for x in xs:
            new: dict = {}
            for k, c in out.items():
                for m, d in x.terms.items():
                    new[k + (m,)] = c * d
            out = new
        return cls._raw(out)

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return TensorElement._raw(out)

    def __neg__(self) -> "TensorElement":
        return TensorElement._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def scale(self, s) -> "TensorElement":
        return TensorElement._raw({k: c * s for k, c in self.terms.items()})

    def __mul__(self, other: "TensorElement") -> "TensorElement":
        return tensor_multiply(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return all(c == other.terms[k] for k, c in self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms

    def simplified(self) -> "TensorElement":
        return TensorElement._raw({k: simplify(c) for k, c in self.terms.items()})

    def __repr__(self) -> str:
        return f"TensorElement({format_tensor(self)!r})"


def tensor_sign(xs: tuple, ys: tuple) -> int:
    """Exponent of pi for (x1 (x) ... )(y1 (x) ...): sum over i > j of p(x_i) p(y_j)."""
    total = 0
    seen = 0
    for i in range(len(xs)):
        # parities of y_j for j < i
        total += xs[i].parity * seen
        seen += ys[i].parity
    return total


def tensor_multiply(x: TensorElement, y: TensorElement) -> TensorElement:
    out: dict = {}
    for k1, c1 in x.terms.items():
        for k2, c2 in y.terms.items():
            if any(m1.eps != m2.eps for m1, m2 in zip(k1, k2)):
                continue
            acc: dict = {(): pi_pow(tensor_sign(k1, k2)) * (c1 * c2)}
            for m1, m2 in zip(k1, k2):
                prod = _mono_mul(m1, m2)
                new: dict = {}
                for k, c in acc.items():
                    for m, v in prod:
                        new[k + (m,)] = c * v
                acc = new
            for k, c in acc.items():
                out[k] = out[k] + c if k in out else c
    return TensorElement._raw(out)


# ---------------------------------------------------------------------------
# Hopf structure


def coproduct_generator(name: str, sector: int, power: int = 1) -> TensorElement:
    """Closed formulas for Delta of E^(p), F^(p), K^p summed over sector pairs."""
    out = TensorElement()
    for eps in (0, 1):
        kap = (sector - eps) % 2
        if name == "K":
            out = out + TensorElement.pure(monomial(eps, 0, power, 0), monomial(kap, 0, power, 0))
            continue
        for a in range(power + 1):
            b = power - a
            if name == "E":
                left = multiply(monomial(eps, 0, 0, a), monomial(eps, 0, b, 0))
                coef = pi_pow(eps * b) * q_pow(a * b)
                out = out + TensorElement.pure(left, monomial(kap, 0, 0, b)).scale(coef)
            elif name == "F":
                coef = (QPI ** (-a * b))
                right = multiply(monomial(kap, 0, -a, 0), monomial(kap, b, 0, 0))
                out = out + TensorElement.pure(monomial(eps, a, 0, 0), right).scale(coef)
            else:
                raise ValueError(name)
    return out


@lru_cache(maxsize=None)
def _coproduct_mono(m: PBWMonomial) -> TensorElement:
    eps, a, b, c = m
    return tensor_multiply(
        tensor_multiply(coproduct_generator("F", eps, a), coproduct_generator("K", eps, b)),
        coproduct_generator("E", eps, c),
    )


def coproduct(x: PBWElement) -> TensorElement:
    out = TensorElement()
    for m, c in x.terms.items():
        out = out + _coproduct_mono(m).scale(c)
    return out


def coproduct_n(x: TensorElement, slot: int) -> TensorElement:
    """Apply Delta to tensor factor ``slot`` (producing one more factor)."""
    out: dict = {}
    for k, c in x.terms.items():
        img = _coproduct_mono(k[slot])
        for k2, c2 in img.terms.items():
            nk = k[:slot] + k2 + k[slot + 1 :]
            v = c * c2
            out[nk] = out[nk] + v if nk in out else v
    return TensorElement._raw(out)


def counit(x: PBWElement):
    total = PiScalar()
    for m, c in x.terms.items():
        if m.eps == 0 and m.a == 0 and m.c == 0:
            total = total + c
    return simplify(total)


@lru_cache(maxsize=None)
def _antipode_mono(m: PBWMonomial) -> PBWElement:
    eps, a, b, c = m
    sE = monomial(eps, 0, -1, 1, -pi_pow(eps))
    sF = multiply(monomial(eps, 1, 0, 0, -ONE), monomial(eps, 0, 1, 0))
    e_part = power(sE, c).scale(pi_pow(comb(c, 2)) * PiRational.coerce(qfact(c)).inverse()).simplified()
    f_part = power(sF, a).scale(pi_pow(comb(a, 2)) * PiRational.coerce(qfact(a)).inverse()).simplified()
    return product(e_part, monomial(eps, 0, -b, 0), f_part).scale(pi_pow(a * c))


def antipode(x: PBWElement) -> PBWElement:
    """Super anti-automorphism: S(xy) = pi^{p(x)p(y)} S(y) S(x)."""
    out = PBWElement()
    for m, c in x.terms.items():
        out = out + _antipode_mono(m).scale(c)
    return out


def tensor_contract(t: TensorElement, left: Callable, right: Callable) -> PBWElement:
    """m o (left (x) right) on a two-fold tensor (plain multiplication)."""
    out = PBWElement()
    for (m1, m2), c in t.terms.items():
        if m1.eps != m2.eps:
            continue
        out = out + multiply(left(PBWElement({m1: c})), right(PBWElement({m2: ONE})))
    return out


# ---------------------------------------------------------------------------
# text


def format_monomial(m: PBWMonomial) -> str:
    eps, a, b, c = m
    parts = []
    if a:
        parts.append(f"F{eps}^({a})")
    if b:
        parts.append(f"K{eps}^{b}")
    if c:
        parts.append(f"E{eps}^({c})")
    return " ".join(parts) if parts else f"e{eps}"


def _coeff_prefix(c) -> str:
    s = simplify(c)
    txt = format_coefficient(s)
    if txt == "1":
        return ""
    if isinstance(s, PiScalar) and len(s.terms()) > 1:
        txt = f"({txt})"
    return txt + " * "


def _mono_key(m: PBWMonomial):
    return (m.eps, m.a, m.c, m.b)


def format_element(x: PBWElement) -> str:
    if not x.terms:
        return "0"
    return " + ".join(_coeff_prefix(x.terms[m]) + format_monomial(m) for m in sorted(x.terms, key=_mono_key))


def format_tensor(x: TensorElement) -> str:
    if not x.terms:
        return "0"
    keys = sorted(x.terms, key=lambda k: tuple(_mono_key(m) for m in k))
    return " + ".join(
        _coeff_prefix(x.terms[k]) + " (x) ".join(format_monomial(m) for m in k) for k in keys
    )


_FACTOR_LEAD = ("E", "F", "K", "e")


def _parse_factor(cur: Cursor) -> PBWElement:
    cur.skip()
    ch = cur.text[cur.pos] if cur.pos < len(cur.text) else ""
    if ch not in _FACTOR_LEAD:
        cur.fail("expected factor E/F/K/e")
    cur.pos += 1
    if not (cur.pos < len(cur.text) and cur.text[cur.pos] in "01"):
        cur.fail("expected sector digit 0 or 1")
    eps = int(cur.text[cur.pos])
    cur.pos += 1
    if ch == "e":
        return monomial(eps, 0, 0, 0)
    n = 1
    if cur.text.startswith("^", cur.pos):
        cur.pos += 1
        if ch == "K":
            n = cur.int()
        else:
            paren = cur.accept("(")
            n = cur.int()
            if paren:
                cur.expect(")")
            if n < 0:
                cur.fail("divided power must be nonnegative")
    return generator(ch, eps, n)


def _parse_term(cur: Cursor) -> PBWElement:
    cur.skip()
    coeff = None
    if not (cur.pos < len(cur.text) and cur.text[cur.pos] in _FACTOR_LEAD):
        coeff = parse_coefficient_at(cur)
        if not cur.accept("*"):
            return unit().scale(coeff)
    x = _parse_factor(cur)
    while True:
        cur.skip()
        if cur.pos < len(cur.text) and cur.text[cur.pos] in _FACTOR_LEAD:
            x = multiply(x, _parse_factor(cur))
        elif cur.accept("*"):
            x = multiply(x, _parse_factor(cur))
        else:
            break
    return x.scale(coeff) if coeff is not None else x


def parse_element(text: str) -> PBWElement:
    cur = Cursor(text)
    if cur.accept("0") and cur.at_end():
        return PBWElement()
    cur.pos = 0
    out = _parse_term(cur)
    while not cur.at_end():
        if cur.accept("+"):
            out = out + _parse_term(cur)
        elif cur.accept("-"):
            out = out - _parse_term(cur)
        else:
            cur.fail("expected '+' or end of input")
    return out.simplified()
