"""The modified covering algebra with idempotents 1_n.

Elements are stored in the EF basis E^(a) 1_n F^(b), keyed by ``UMono(a, n,
b)``.  Such a monomial has left weight n + 2a and right weight n + 2b.  The
FE basis F^(b) 1_N E^(a) (left weight N - 2b, right weight N - 2a) is
converted on the way in.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, NamedTuple

from .pi_ring import (
    DQ,
    ONE,
    PI,
    Cursor,
    PiRational,
    PiScalar,
    cone_membership,
    format_coefficient,
    parse_coefficient_at,
    qbinom,
    qfact,
    simplify,
)
from .upi_algebra import PBWElement, PBWMonomial, apply_morphism, coproduct, monomial, multiply as pbw_multiply, pi_pow, q_pow

__all__ = [
    "UMono",
    "UDotElement",
    "CBIndex",
    "PositivityError",
    "idempotent",
    "standard_monomial",
    "fe_to_ef",
    "ef_to_fe",
    "multiply",
    "bimodule_act",
    "bar",
    "cb_element",
    "cb_shape",
    "cb_expand",
    "from_cb",
    "structure_constants",
    "act_on_tensor",
    "coproduct_dot",
    "bilinear_form",
    "form_f",
    "morphism_dot",
    "parse_udot",
    "format_udot",
    "format_cb_element",
]


class PositivityError(AssertionError):
    """A canonical-basis structure constant left N[q, q^-1, pi]."""


class UMono(NamedTuple):
    a: int  # E power (left)
    n: int
    b: int  # F power (right)

    @property
    def left(self) -> int:
        return self.n + 2 * self.a

    @property
    def right(self) -> int:
        return self.n + 2 * self.b


class CBIndex(NamedTuple):
    a: int
    b: int
    k: int

    @property
    def right(self) -> int:
        return self.k

    @property
    def left(self) -> int:
        return self.k + 2 * self.a - 2 * self.b


def _acc(out: dict, k, v) -> None:
    if k in out:
        out[k] = out[k] + v
    else:
        out[k] = v


class UDotElement:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms: dict[UMono, object] = {}
        for m, c in (terms or {}).items():
            if isinstance(c, int):
                c = PiScalar.coerce(c)
            if not c.is_zero():
                a, n, b = m
                if a < 0 or b < 0:
                    raise ValueError("divided powers need nonnegative exponents")
                self.terms[UMono(a, n, b)] = c

    @classmethod
    def _raw(cls, terms: dict) -> "UDotElement":
        out = cls()
        out.terms = {m: c for m, c in terms.items() if not c.is_zero()}
        return out

    def __add__(self, other: "UDotElement") -> "UDotElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            _acc(out, m, c)
        return UDotElement._raw(out)

    def __neg__(self) -> "UDotElement":
        return UDotElement._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "UDotElement") -> "UDotElement":
        return self + (-other)

    def scale(self, s) -> "UDotElement":
        if isinstance(s, int):
            s = PiScalar.coerce(s)
        return UDotElement._raw({m: c * s for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, UDotElement):
            return multiply(self, other)
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UDotElement):
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return all(c == other.terms[m] for m, c in self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms

    def is_integral(self) -> bool:
        return all(isinstance(simplify(c), PiScalar) for c in self.terms.values())

    def simplified(self) -> "UDotElement":
        return UDotElement._raw({m: simplify(c) for m, c in self.terms.items()})

    def blocks(self) -> set[tuple[int, int]]:
        return {(m.left, m.right) for m in self.terms}

    def __repr__(self) -> str:
        return f"UDotElement({format_udot(self)!r})"

    def __str__(self) -> str:
        return format_udot(self)


def idempotent(n: int) -> UDotElement:
    return UDotElement({UMono(0, n, 0): ONE})


# ---------------------------------------------------------------------------
# the two reordering identities


@lru_cache(maxsize=None)
def fe_to_ef(b: int, N: int, a: int) -> tuple[tuple[UMono, PiScalar], ...]:
    """F^(b) 1_N E^(a) in the EF basis."""
    eps = N % 2
    out = []
    for i in range(min(a, b) + 1):
        c = pi_pow(a * b + comb(i, 2) + eps * i) * qbinom(a + b - N, i)
        if not c.is_zero():
            out.append((UMono(a - i, N - 2 * b - 2 * a + 2 * i, b - i), c))
    return tuple(out)


@lru_cache(maxsize=None)
def ef_to_fe(a: int, n: int, b: int) -> tuple[tuple[tuple[int, int, int], PiScalar], ...]:
    """E^(a) 1_n F^(b) in the FE basis, keys (b', N, a') for F^(b') 1_N E^(a')."""
    out = []
    for i in range(min(a, b) + 1):
        c = pi_pow(a * b + comb(i + 1, 2)) * qbinom(n + a + b, i)
        if not c.is_zero():
            out.append(((b - i, n + 2 * b + 2 * a - 2 * i, a - i), c))
    return tuple(out)


def standard_monomial(form: str, a: int, n: int, b: int) -> UDotElement:
    """EF: E^(a) 1_n F^(b).  FE: F^(a) 1_n E^(b)."""
    if a < 0 or b < 0:
        raise ValueError("divided powers need nonnegative exponents")
    if form == "EF":
        return UDotElement({UMono(a, n, b): ONE})
    if form == "FE":
        return UDotElement._raw(dict(fe_to_ef(a, n, b)))
    raise ValueError(f"unknown form {form!r}")


# ---------------------------------------------------------------------------
# multiplication


@lru_cache(maxsize=500_000)
def _mono_mul(m1: UMono, m2: UMono) -> tuple[tuple[UMono, PiScalar], ...]:
    if m1.right != m2.left:
        return ()
    R = m1.right
    out: dict = {}
    for mid, c in fe_to_ef(m1.b, R, m2.a):
        a = m1.a + mid.a
        b = mid.b + m2.b
        v = c * qbinom(a, m1.a) * qbinom(b, m2.b)
        if not v.is_zero():
            _acc(out, UMono(a, mid.n, b), v)
    return tuple((m, v) for m, v in out.items() if not v.is_zero())


def multiply(x: UDotElement, y: UDotElement) -> UDotElement:
    out: dict = {}
    by_left: dict[int, list] = {}
    for m2, c2 in y.terms.items():
        by_left.setdefault(m2.left, []).append((m2, c2))
    for m1, c1 in x.terms.items():
        for m2, c2 in by_left.get(m1.right, ()):
            cc = c1 * c2
            for m, v in _mono_mul(m1, m2):
                _acc(out, m, cc * v)
    return UDotElement._raw(out)


# ---------------------------------------------------------------------------
# bimodule structure


def _fe_element(i: int, N: int, l: int, coef) -> UDotElement:
    return UDotElement._raw({m: c * coef for m, c in fe_to_ef(i, N, l)})


def bimodule_act(u: PBWElement | None, x: UDotElement, v: PBWElement | None = None) -> UDotElement:
    """u x v for u, v in U (None stands for the unit)."""
    out = x
    if u is not None:
        acc = UDotElement()
        lefts = {m.left for m in out.terms}
        for L in lefts:
            block = UDotElement._raw({m: c for m, c in out.terms.items() if m.left == L})
            for m, c in u.terms.items():
                if m.eps != L % 2:
                    continue
                coef = q_pow(m.b * (L + 2 * m.c)) * c
                acc = acc + multiply(_fe_element(m.a, L + 2 * m.c, m.c, coef), block)
        out = acc
    if v is not None:
        acc = UDotElement()
        rights = {m.right for m in out.terms}
        for R in rights:
            block = UDotElement._raw({m: c for m, c in out.terms.items() if m.right == R})
            for m, c in v.terms.items():
                if m.eps != R % 2:
                    continue
                coef = q_pow(m.b * (R + 2 * m.a)) * c
                acc = acc + multiply(block, _fe_element(m.a, R + 2 * m.a, m.c, coef))
        out = acc
    return out


def bar(x: UDotElement) -> UDotElement:
    """E^(a), F^(b) and 1_n are bar-invariant, so bar acts on coefficients."""
    return UDotElement._raw({m: c.bar() for m, c in x.terms.items()})


def morphism_dot(name: str, x: UDotElement) -> UDotElement:
    """omega, tau, rho transported to the modified algebra (on EF monomials).

    omega: E^(a) 1_n F^(b) -> F^(a) 1_{-n} (pi^{1-eps})^b E^(b)
    tau (anti): -> pi^{a(1-eps)} F^(b) 1_{-n} E^(a)
    rho (anti): via rho(E^(a)) = q^{a^2} K^a F^(a), rho(F^(b)) = q^{b^2} K^-b E^(b)
    """
    out = UDotElement()
    for m, c in x.terms.items():
        eps = m.n % 2
        if name == "omega":
            img = _fe_element(m.a, -m.n, m.b, pi_pow(m.b * (1 - eps)) * c)
        elif name == "tau":
            img = _fe_element(m.b, -m.n, m.a, pi_pow(m.a * (1 - eps)) * c)
        elif name == "rho":
            rE = apply_morphism("rho", monomial(eps, 0, 0, m.a))
            rF = apply_morphism("rho", monomial(eps, m.b, 0, 0))
            img = bimodule_act(rF, idempotent(m.n), rE).scale(c)
        else:
            raise ValueError(f"unknown morphism {name!r}")
        out = out + img
    return out


# ---------------------------------------------------------------------------
# canonical basis


def cb_shape(a: int, b: int, k: int) -> tuple[str, int]:
    """("EF", m) for E^(a) 1_m F^(b) or ("FE", N) for pi^{ab} F^(b) 1_N E^(a)."""
    if k <= b - a:
        return "EF", k - 2 * b
    return "FE", k + 2 * a


@lru_cache(maxsize=None)
def _cb_terms(a: int, b: int, k: int) -> tuple:
    form, n = cb_shape(a, b, k)
    if form == "EF":
        return ((UMono(a, n, b), ONE),)
    return tuple((m, c * pi_pow(a * b)) for m, c in fe_to_ef(b, n, a))


def cb_element(a: int, b: int, k: int) -> UDotElement:
    if a < 0 or b < 0:
        raise ValueError("CB index needs a, b >= 0")
    return UDotElement._raw(dict(_cb_terms(a, b, k)))


@lru_cache(maxsize=None)
def _cb_expand_mono(m: UMono) -> tuple:
    a, mm, b = m
    k = mm + 2 * b
    if -mm >= a + b:
        return ((CBIndex(a, b, k), ONE),)
    out = []
    for i in range(min(a, b) + 1):
        c = pi_pow(a * b + comb(i + 1, 2) + (a - i) * (b - i)) * qbinom(a + b + mm, i)
        if not c.is_zero():
            out.append((CBIndex(a - i, b - i, k), c))
    return tuple(out)


def cb_expand(x: UDotElement) -> dict[CBIndex, object]:
    out: dict = {}
    for m, c in x.terms.items():
        for idx, v in _cb_expand_mono(m):
            _acc(out, idx, c * v)
    out = {k: simplify(v) for k, v in out.items() if not v.is_zero()}
    if x.is_integral() and not all(isinstance(v, PiScalar) for v in out.values()):
        raise ArithmeticError("cb_expand produced a non-integral coefficient from integral input")
    return out


def from_cb(expansion: Mapping) -> UDotElement:
    out = UDotElement()
    for idx, c in expansion.items():
        out = out + cb_element(*idx).scale(c)
    return out


def structure_constants(i1: Iterable[int], i2: Iterable[int]) -> dict[CBIndex, PiScalar]:
    i1, i2 = CBIndex(*i1), CBIndex(*i2)
    if i1.right != i2.left:
        return {}
    out = cb_expand(multiply(cb_element(*i1), cb_element(*i2)))
    for idx, v in out.items():
        if not cone_membership(v, "positive"):
            raise PositivityError(f"structure constant of {tuple(i1)} * {tuple(i2)} at {tuple(idx)} is {format_coefficient(v)}")
    return out


# ---------------------------------------------------------------------------
# modules and coproduct


def act_on_tensor(x: UDotElement, s: int, t: int):
    """x (eta (x) nu) in L(s,t) = ^omega L(s) (x) L(t)."""
    from .rep import ModuleVector, tensor_st

    M = tensor_st(s, t)
    out: dict = {}
    for m, c in x.terms.items():
        if m.right != t - s:
            continue
        eps = m.n % 2
        v = M.apply_piece("F", eps, m.b, {(0, 0): ONE})
        v = M.apply_piece("E", eps, m.a, v)
        for lab, d in v.items():
            _acc(out, lab, c * d)
    return ModuleVector(M, out)


def _project(mono: PBWMonomial, coef, a: int, c: int) -> UDotElement:
    """p_{a,c} of a PBW monomial F^(i) K^j E^(l): 1_a F^(i) K^j E^(l) 1_c."""
    if mono.eps != c % 2:
        return UDotElement()
    top = c + 2 * mono.c
    if top - 2 * mono.a != a:
        return UDotElement()
    return _fe_element(mono.a, top, mono.c, q_pow(mono.b * top) * coef)


def coproduct_dot(x: UDotElement, a: int, b: int, c: int, d: int) -> dict[tuple[UMono, UMono], object]:
    """Delta_{a,b,c,d}(p_{a+b,c+d}(x)) as {(EF mono, EF mono): coefficient}."""
    out: dict = {}
    for m, coef in x.terms.items():
        if (m.left, m.right) != (a + b, c + d):
            continue
        eps = m.n % 2
        lift = pbw_multiply(monomial(eps, 0, 0, m.a), monomial(eps, m.b, 0, 0))
        dt = coproduct(lift)
        for (u1, u2), w in dt.terms.items():
            left = _project(u1, ONE, a, c)
            if left.is_zero():
                continue
            right = _project(u2, ONE, b, d)
            for k1, v1 in left.terms.items():
                for k2, v2 in right.terms.items():
                    _acc(out, (k1, k2), coef * w * v1 * v2)
    return {k: simplify(v) for k, v in out.items() if not v.is_zero()}


# ---------------------------------------------------------------------------
# bilinear form


@lru_cache(maxsize=None)
def form_f(a: int) -> PiRational:
    """(theta^(a), theta^(a)) = pi^a q^{C(a+1,2)} (pi q - q^-1)^-a / [a]!."""
    return PiRational.coerce(pi_pow(a) * q_pow(comb(a + 1, 2))) / (DQ ** a * qfact(a))


def form_f_product(a: int) -> PiRational:
    """The same value as prod_{s=1}^a pi^{s-1} / (1 - (pi q^-2)^s)."""
    out = PiRational.coerce(1)
    for s in range(1, a + 1):
        out = out * PiRational.coerce(pi_pow(s - 1)) / (ONE - (PI * q_pow(-2)) ** s)
    return out


def _rho_e(eps: int, a: int, single: bool) -> PBWElement:
    return apply_morphism("rho", monomial(eps, 0, 0, 1 if single else a))


def _form_mono(m1: UMono, m2: UMono, strategy: str, memo: dict):
    key = (m1, m2, strategy)
    if key in memo:
        return memo[key]
    if (m1.left, m1.right) != (m2.left, m2.right):
        val = PiRational.coerce(0)
    elif m1.a == 0 and m2.a == 0:
        # 1_n F^(b) = F^(b) 1_{n+2b}
        val = form_f(m1.b) if m1.b == m2.b else PiRational.coerce(0)
    elif m1.a == 0:
        val = _form_mono(m2, m1, strategy, memo)
    else:
        eps = m1.n % 2
        if strategy == "single":
            # E^(a) x' = E E^(a-1) x' / [a]
            rest = UMono(m1.a - 1, m1.n, m1.b)
            u = _rho_e(eps, 1, True)
            scale = PiRational.coerce(qfact(m1.a - 1)) / qfact(m1.a)
        else:
            rest = UMono(0, m1.n, m1.b)
            u = _rho_e(eps, m1.a, False)
            scale = PiRational.coerce(1)
        y = bimodule_act(u, UDotElement({m2: ONE}))
        val = PiRational.coerce(0)
        for m, c in y.terms.items():
            if m.a + rest.a >= m1.a + m2.a:
                raise RuntimeError("form recursion does not reduce degree")
            val = val + _form_mono(rest, m, strategy, memo) * c
        val = val * scale
    memo[key] = val
    return val


def bilinear_form(x: UDotElement, y: UDotElement, strategy: str = "block"):
    """Bilinear form from block orthogonality, (ux, y) = (x, rho(u) y) and
    the values on pure F parts.  ``strategy`` selects how divided powers of E
    are stripped: the whole E^(a) at once ("block") or one E at a time
    ("single")."""
    if strategy not in ("block", "single"):
        raise ValueError(f"unknown strategy {strategy!r}")
    memo: dict = {}
    total = PiRational.coerce(0)
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            if (m1.left, m1.right) != (m2.left, m2.right):
                continue
            total = total + _form_mono(m1, m2, strategy, memo) * c1 * c2
    return simplify(total)


# ---------------------------------------------------------------------------
# text


def format_umono(m: UMono) -> str:
    parts = []
    if m.a:
        parts.append(f"E^({m.a})")
    parts.append(f"1_{{{m.n}}}")
    if m.b:
        parts.append(f"F^({m.b})")
    return " ".join(parts)


def _coeff_prefix(c) -> str:
    s = simplify(c)
    txt = format_coefficient(s)
    if txt == "1":
        return ""
    if isinstance(s, PiScalar) and len(s.terms()) > 1:
        txt = f"({txt})"
    return txt + " * "


def _umono_key(m: UMono):
    return (m.left, m.right, m.a)


def format_udot(x: UDotElement) -> str:
    if not x.terms:
        return "0"
    return " + ".join(_coeff_prefix(x.terms[m]) + format_umono(m) for m in sorted(x.terms, key=_umono_key))


def format_cb_element(a: int, b: int, k: int) -> str:
    """Natural shape of the canonical basis element."""
    form, n = cb_shape(a, b, k)
    if form == "EF":
        return format_umono(UMono(a, n, b))
    parts = []
    if b:
        parts.append(f"F^({b})")
    parts.append(f"1_{{{n}}}")
    if a:
        parts.append(f"E^({a})")
    body = " ".join(parts)
    return ("p * " + body) if (a * b) % 2 else body


def format_cb_expansion(exp: Mapping) -> str:
    if not exp:
        return "0"
    keys = sorted(exp, key=lambda i: (i.left, i.right, i.a, i.b))
    return " + ".join(_coeff_prefix(exp[i]) + f"CB({i.a},{i.b},{i.k})" for i in keys)


def _parse_ud_factor(cur: Cursor):
    """Returns ('E'|'F', power) or ('1', n) or ('CB', (a, b, k))."""
    cur.skip()
    if cur.accept("CB"):
        cur.expect("(")
        a = cur.int()
        cur.expect(",")
        b = cur.int()
        cur.expect(",")
        k = cur.int()
        cur.expect(")")
        return "CB", (a, b, k)
    if cur.accept("1_"):
        brace = cur.accept("{")
        n = cur.int()
        if brace:
            cur.expect("}")
        return "1", n
    for g in ("E", "F"):
        if cur.accept(g):
            p = 1
            if cur.accept("^"):
                paren = cur.accept("(")
                p = cur.int()
                if paren:
                    cur.expect(")")
            if p < 0:
                cur.fail("divided power must be nonnegative")
            return g, p
    cur.fail("expected E, F, 1_{n} or CB(a,b,k)")


def _is_factor_start(cur: Cursor) -> bool:
    cur.skip()
    return any(cur.text.startswith(t, cur.pos) for t in ("E", "F", "1_", "CB"))


def _parse_ud_term(cur: Cursor) -> UDotElement:
    coeff = None
    if not _is_factor_start(cur):
        coeff = parse_coefficient_at(cur)
        cur.expect("*")
    factors = [_parse_ud_factor(cur)]
    while _is_factor_start(cur):
        factors.append(_parse_ud_factor(cur))
    anchors = [i for i, (kind, _) in enumerate(factors) if kind in ("1", "CB")]
    if len(anchors) != 1:
        cur.fail("each term needs exactly one idempotent 1_{n} or CB(a,b,k)")
    i0 = anchors[0]
    kind, val = factors[i0]
    x = idempotent(val) if kind == "1" else cb_element(*val)
    for g, p in reversed(factors[:i0]):
        x = _left_gen(g, p, x)
    for g, p in factors[i0 + 1 :]:
        x = _right_gen(x, g, p)
    return x.scale(coeff) if coeff is not None else x


def _left_gen(g: str, p: int, x: UDotElement) -> UDotElement:
    out = UDotElement()
    for L in {m.left for m in x.terms}:
        u = monomial(L % 2, 0, 0, p) if g == "E" else monomial(L % 2, p, 0, 0)
        block = UDotElement._raw({m: c for m, c in x.terms.items() if m.left == L})
        out = out + bimodule_act(u, block)
    return out


def _right_gen(x: UDotElement, g: str, p: int) -> UDotElement:
    out = UDotElement()
    for R in {m.right for m in x.terms}:
        v = monomial(R % 2, 0, 0, p) if g == "E" else monomial(R % 2, p, 0, 0)
        block = UDotElement._raw({m: c for m, c in x.terms.items() if m.right == R})
        out = out + bimodule_act(None, block, v)
    return out


def parse_udot(text: str) -> UDotElement:
    cur = Cursor(text)
    if cur.accept("0") and cur.at_end():
        return UDotElement()
    cur.pos = 0
    out = _parse_ud_term(cur)
    while not cur.at_end():
        if cur.accept("+"):
            out = out + _parse_ud_term(cur)
        elif cur.accept("-"):
            out = out - _parse_ud_term(cur)
        else:
            cur.fail("expected '+' or end of input")
    return out.simplified()
