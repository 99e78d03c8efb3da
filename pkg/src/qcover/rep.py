"""Weight modules: L(n, +-), truncated Vermas, omega-twists and tensor products.

Each module exposes the action of the three kinds of PBW pieces (E^(c),
K^b, F^(a)) on basis labels; monomials and elements are composed from those.
Tensor products act through the closed coproduct formulas for divided powers
with the sign (u (x) v)(m (x) n) = pi^{p(v) p(m)} um (x) vn.
"""

from __future__ import annotations

import json
from functools import lru_cache
from math import comb
from typing import Hashable, Iterable, Mapping

from .linalg import nullspace, rank
from .pi_ring import (
    DQ,
    ONE,
    PI,
    QPI,
    PiRational,
    PiScalar,
    RatFunc,
    cone_membership,
    format_coefficient,
    format_scalar,
    qbinom,
    qfact,
    qint,
    simplify,
    theta_coeff,
)
from .upi_algebra import (
    PBWElement,
    PBWMonomial,
    TensorElement,
    _morphism_mono,
    casimir,
    coproduct,
    multiply,
    pi_pow,
    q_pow,
)

__all__ = [
    "WeightModule",
    "ModuleVector",
    "SimpleModule",
    "VermaModule",
    "OmegaTwist",
    "TensorModule",
    "simple_module",
    "verma_truncated",
    "omega_twist",
    "tensor",
    "tensor_st",
    "act_tensor_element",
    "theta_apply",
    "theta_bar_apply",
    "psi_apply",
    "delta_bar",
    "theta_scalar_b",
    "tensor_cb",
    "tensor_cb_closed_form",
    "casimir_scalar",
    "casimir_decompose",
    "casimir_c2_matrix",
    "singular_vector_count",
    "verma_singular_levels",
    "cb_table_json",
]


def _acc(out: dict, k, v) -> None:
    if k in out:
        out[k] = out[k] + v
    else:
        out[k] = v


def _clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if not v.is_zero()}


class WeightModule:
    """Base class; subclasses implement ``_piece``."""

    basis: tuple

    def __init__(self) -> None:
        self._cache: dict = {}

    # bookkeeping -----------------------------------------------------------
    def weight(self, label) -> int:
        raise NotImplementedError

    def k_sign(self, label) -> int:
        raise NotImplementedError

    def parity(self, label) -> int:
        raise NotImplementedError

    def sector(self, label) -> int:
        return self.weight(label) % 2

    @property
    def dim(self) -> int:
        return len(self.basis)

    # actions ---------------------------------------------------------------
    def _piece(self, kind: str, sector: int, power: int, label) -> dict:
        raise NotImplementedError

    def piece(self, kind: str, sector: int, power: int, label) -> dict:
        """E^(power), F^(power) or K^power of the given sector on a basis label."""
        key = (kind, sector, power, label)
        hit = self._cache.get(key)
        if hit is None:
            if self.sector(label) != sector:
                hit = {}
            elif power == 0 and kind != "K":
                hit = {label: ONE}
            else:
                hit = _clean(self._piece(kind, sector, power, label))
            self._cache[key] = hit
        return hit

    def _k_piece(self, power: int, label) -> dict:
        s = self.k_sign(label)
        c = q_pow(power * self.weight(label))
        return {label: c if s == 1 or power % 2 == 0 else -c}

    def apply_piece(self, kind: str, sector: int, power: int, vec: Mapping) -> dict:
        out: dict = {}
        for lab, c in vec.items():
            for lab2, d in self.piece(kind, sector, power, lab).items():
                _acc(out, lab2, c * d)
        return _clean(out)

    def act_monomial(self, m: PBWMonomial, label) -> dict:
        key = ("mono", m, label)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        v = {label: ONE}
        v = self.apply_piece("E", m.eps, m.c, v)
        if v and m.b:
            v = self.apply_piece("K", m.eps, m.b, v)
        if v:
            v = self.apply_piece("F", m.eps, m.a, v)
        self._cache[key] = v
        return v

    def act(self, u: PBWElement, v: "ModuleVector") -> "ModuleVector":
        out: dict = {}
        for lab, c in v.coeffs.items():
            for m, cu in u.terms.items():
                for lab2, d in self.act_monomial(m, lab).items():
                    _acc(out, lab2, c * cu * d)
        return ModuleVector(self, out)

    def vector(self, coeffs: Mapping | None = None) -> "ModuleVector":
        return ModuleVector(self, dict(coeffs or {}))

    def basis_vector(self, label) -> "ModuleVector":
        return ModuleVector(self, {label: ONE})

    def weight_spaces(self) -> dict[int, list]:
        out: dict[int, list] = {}
        for lab in self.basis:
            out.setdefault(self.weight(lab), []).append(lab)
        return out


class ModuleVector:
    __slots__ = ("module", "coeffs")

    def __init__(self, module: WeightModule, coeffs: Mapping):
        self.module = module
        self.coeffs = {
            k: (PiScalar.coerce(v) if isinstance(v, int) else v)
            for k, v in coeffs.items()
            if not (v == 0 if isinstance(v, int) else v.is_zero())
        }

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            _acc(out, k, v)
        return ModuleVector(self.module, out)

    def __neg__(self) -> "ModuleVector":
        return ModuleVector(self.module, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        return self + (-other)

    def scale(self, s) -> "ModuleVector":
        return ModuleVector(self.module, {k: v * s for k, v in self.coeffs.items()})

    def bar(self) -> "ModuleVector":
        return ModuleVector(self.module, {k: v.bar() for k, v in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleVector):
            return NotImplemented
        if self.coeffs.keys() != other.coeffs.keys():
            return False
        return all(v == other.coeffs[k] for k, v in self.coeffs.items())

    def simplified(self) -> "ModuleVector":
        return ModuleVector(self.module, {k: simplify(v) for k, v in self.coeffs.items()})

    def __repr__(self) -> str:
        items = ", ".join(f"{k}: {format_coefficient(v)}" for k, v in sorted(self.coeffs.items()))
        return f"ModuleVector({{{items}}})"


# ---------------------------------------------------------------------------
# concrete modules


class SimpleModule(WeightModule):
    """L(n, sign) with basis j <-> F^(j) nu."""

    def __init__(self, n: int, sign: int = 1):
        if n < 0:
            raise ValueError("simple module needs n >= 0")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        super().__init__()
        self.n = n
        self.sign = sign
        self.eps = n % 2
        self.basis = tuple(range(n + 1))

    def __repr__(self) -> str:
        return f"L({self.n},{'+' if self.sign == 1 else '-'})"

    def weight(self, j: int) -> int:
        return self.n - 2 * j

    def k_sign(self, j: int) -> int:
        return self.sign

    def parity(self, j: int) -> int:
        return j % 2

    def sector(self, j: int) -> int:
        return self.eps

    def _piece(self, kind, sector, power, j):
        if kind == "K":
            return self._k_piece(power, j)
        if kind == "F":
            return {j + power: qbinom(j + power, power)} if j + power <= self.n else {}
        if kind == "E":
            c = power
            if c > j:
                return {}
            coef = pi_pow(c * (1 - j) + comb(c, 2)) * qbinom(self.n - j + c, c)
            if self.sign == -1 and c % 2:
                coef = -coef
            return {j - c: coef}
        raise ValueError(kind)


class VermaModule(WeightModule):
    """Verma module of highest weight sign*q^n in sector eps, truncated at ``cutoff``."""

    def __init__(self, n: int, sign: int, cutoff: int, eps: int | None = None):
        if cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        super().__init__()
        self.n = n
        self.sign = sign
        self.cutoff = cutoff
        self.eps = n % 2 if eps is None else eps
        self.basis = tuple(range(cutoff + 1))

    def __repr__(self) -> str:
        return f"M({'+' if self.sign == 1 else '-'}q^{self.n}, eps={self.eps}, cutoff={self.cutoff})"

    def weight(self, j: int) -> int:
        return self.n - 2 * j

    def k_sign(self, j: int) -> int:
        return self.sign

    def parity(self, j: int) -> int:
        return j % 2

    def sector(self, j: int) -> int:
        return self.eps

    def e_coefficient(self, j: int):
        """E F^(j) nu = pi^(1-j) [K;1-j](lambda) F^(j-1) nu."""
        if j == 0:
            return PiScalar()
        m = 1 - j
        num = (QPI ** m) * pi_pow(self.eps) * q_pow(self.n) - q_pow(-m) * q_pow(-self.n)
        num = num * self.sign
        return simplify(PiRational.coerce(num * pi_pow(1 - j)) / DQ)

    def _piece(self, kind, sector, power, j):
        if kind == "K":
            return self._k_piece(power, j)
        if kind == "F":
            return {j + power: qbinom(j + power, power)} if j + power <= self.cutoff else {}
        if kind == "E":
            if power > j:
                return {}
            coef = PiRational.coerce(1)
            for i in range(power):
                coef = coef * self.e_coefficient(j - i)
            return {j - power: simplify(coef / qfact(power))}
        raise ValueError(kind)


class OmegaTwist(WeightModule):
    """u . m = omega(u) m; labels are those of the inner module."""

    def __init__(self, inner: WeightModule):
        super().__init__()
        self.inner = inner
        self.basis = inner.basis

    def __repr__(self) -> str:
        return f"^w{self.inner!r}"

    def weight(self, lab) -> int:
        return -self.inner.weight(lab)

    def k_sign(self, lab) -> int:
        return self.inner.k_sign(lab)

    def parity(self, lab) -> int:
        return self.inner.parity(lab)

    def sector(self, lab) -> int:
        return self.inner.sector(lab)

    def _piece(self, kind, sector, power, lab):
        if kind == "K":
            return self.inner.piece("K", sector, -power, lab)
        if kind == "E":
            return self.inner.piece("F", sector, power, lab)
        if kind == "F":
            s = pi_pow(power * (1 - sector))
            return {k: v * s for k, v in self.inner.piece("E", sector, power, lab).items()}
        raise ValueError(kind)


class TensorModule(WeightModule):
    """left (x) right with U acting through the coproduct."""

    def __init__(self, left: WeightModule, right: WeightModule):
        super().__init__()
        self.left = left
        self.right = right
        self.basis = tuple((l, r) for l in left.basis for r in right.basis)

    def __repr__(self) -> str:
        return f"({self.left!r} (x) {self.right!r})"

    def weight(self, lab) -> int:
        return self.left.weight(lab[0]) + self.right.weight(lab[1])

    def k_sign(self, lab) -> int:
        return self.left.k_sign(lab[0]) * self.right.k_sign(lab[1])

    def parity(self, lab) -> int:
        return (self.left.parity(lab[0]) + self.right.parity(lab[1])) % 2

    def sector(self, lab) -> int:
        return (self.left.sector(lab[0]) + self.right.sector(lab[1])) % 2

    def _piece(self, kind, sector, power, lab):
        l, r = lab
        eps, kap = self.left.sector(l), self.right.sector(r)
        pl = self.left.parity(l)
        out: dict = {}
        if kind == "K":
            for l2, c in self.left.piece("K", eps, power, l).items():
                for r2, d in self.right.piece("K", kap, power, r).items():
                    _acc(out, (l2, r2), c * d)
            return out
        for a in range(power + 1):
            b = power - a
            sign = pi_pow(b * pl)
            if kind == "E":
                # pi^{eps b} q^{ab} E^(a) K^b (x) E^(b)
                coef = sign * pi_pow(eps * b) * q_pow(a * b)
                lv = self.left.apply_piece("K", eps, b, {l: ONE}) if b else {l: ONE}
                lv = self.left.apply_piece("E", eps, a, lv)
                rv = self.right.piece("E", kap, b, r)
            elif kind == "F":
                # (pi q)^{-ab} F^(a) (x) K^{-a} F^(b)
                coef = sign * (QPI ** (-a * b))
                lv = self.left.piece("F", eps, a, l)
                rv = self.right.apply_piece("F", kap, b, {r: ONE})
                if a:
                    rv = self.right.apply_piece("K", kap, -a, rv)
            else:
                raise ValueError(kind)
            for l2, c in lv.items():
                for r2, d in rv.items():
                    _acc(out, (l2, r2), coef * c * d)
        return out


def simple_module(n: int, sign: int = 1) -> SimpleModule:
    return SimpleModule(n, sign)


def verma_truncated(n: int, sign: int, cutoff: int, eps: int | None = None) -> VermaModule:
    return VermaModule(n, sign, cutoff, eps)


def omega_twist(m: WeightModule) -> OmegaTwist:
    return OmegaTwist(m)


def tensor(m: WeightModule, n: WeightModule) -> TensorModule:
    return TensorModule(m, n)


@lru_cache(maxsize=None)
def tensor_st(s: int, t: int) -> TensorModule:
    """L(s,t) = ^omega L(s) (x) L(t)."""
    return TensorModule(OmegaTwist(SimpleModule(s, 1)), SimpleModule(t, 1))


# ---------------------------------------------------------------------------
# quasi-R-matrix


def _require_tensor(v: ModuleVector) -> TensorModule:
    if not isinstance(v.module, TensorModule):
        raise TypeError("operation needs a vector in a tensor product module")
    return v.module


def act_tensor_element(t: TensorElement, v: ModuleVector) -> ModuleVector:
    """Action of U (x) U on a two-factor tensor module."""
    M = _require_tensor(v)
    out: dict = {}
    for (l, r), c in v.coeffs.items():
        pl = M.left.parity(l)
        for (x, y), cu in t.terms.items():
            lv = M.left.act_monomial(x, l)
            if not lv:
                continue
            rv = M.right.act_monomial(y, r)
            if not rv:
                continue
            s = pi_pow(y.parity * pl) * c * cu
            for l2, a in lv.items():
                for r2, b in rv.items():
                    _acc(out, (l2, r2), s * a * b)
    return ModuleVector(M, out)


def _theta_generic(v: ModuleVector, coeff) -> ModuleVector:
    M = _require_tensor(v)
    out: dict = {}
    for (l, r), c in v.coeffs.items():
        eps, kap = M.left.sector(l), M.right.sector(r)
        pl = M.left.parity(l)
        n = 0
        while True:
            lv = M.left.piece("F", eps, n, l)
            rv = M.right.piece("E", kap, n, r)
            if not lv or not rv:
                break
            s = coeff(n) * pi_pow(n * pl) * c
            for l2, a in lv.items():
                for r2, b in rv.items():
                    _acc(out, (l2, r2), s * a * b)
            n += 1
    return ModuleVector(M, out)


def theta_apply(v: ModuleVector) -> ModuleVector:
    return _theta_generic(v, theta_coeff)


def theta_bar_apply(v: ModuleVector) -> ModuleVector:
    return _theta_generic(v, lambda n: theta_coeff(n).bar())


def psi_apply(v: ModuleVector) -> ModuleVector:
    """Psi = Theta o (bar x bar); the module bar fixes the standard basis."""
    return theta_apply(v.bar())


def delta_bar(u: PBWElement) -> TensorElement:
    """(psi (x) psi) o Delta o psi."""
    from .upi_algebra import apply_morphism

    d = coproduct(apply_morphism("psi", u))
    out: dict = {}
    for (x, y), c in d.terms.items():
        img = TensorElement.pure(_morphism_mono("psi", x), _morphism_mono("psi", y))
        for k, v in img.terms.items():
            _acc(out, k, v * c.bar())
    return TensorElement._raw(out)


def theta_scalar_b(n: int) -> PiScalar:
    """Coefficient of F^(n) (x) E^(n) in Theta Theta-bar."""
    total = PiScalar()
    for m in range(n + 1):
        k = n - m
        total = total + pi_pow(m * k) * theta_coeff(m) * theta_coeff(k).bar() * qbinom(n, k) * qbinom(n, k)
    return total


# ---------------------------------------------------------------------------
# canonical basis of L(s,t)


def tensor_cb_closed_form(s: int, t: int, a: int, b: int) -> dict[tuple[int, int], PiScalar]:
    """Coefficients of (E^(a) <> F^(b))_{s,t}; valid when s - a >= t - b."""
    out = {}
    for j in range(min(a, b) + 1):
        c = pi_pow(s * j + comb(j + 1, 2) - b * j) * q_pow(j * (a - j - s)) * qbinom(j - b + t, j)
        if not c.is_zero():
            out[(a - j, b - j)] = c
    return out


def psi_matrix(s: int, t: int) -> dict:
    """r[h][h'] with Psi(b_h) = sum r[h][h'] b_h'."""
    M = tensor_st(s, t)
    return {h: {k: simplify(v) for k, v in psi_apply(M.basis_vector(h)).coeffs.items()} for h in M.basis}


def tensor_cb(s: int, t: int, check: bool = True) -> dict[tuple[int, int], ModuleVector]:
    """Canonical basis {(E^(a) <> F^(b))_{s,t}} of L(s,t).

    Closed form where s - a >= t - b, triangular solver elsewhere.  With
    ``check`` the solver is also run on the closed-form region and the two
    must agree.
    """
    from .cb_engine import TriangularSystem, triangular_bar_solve

    M = tensor_st(s, t)
    r = psi_matrix(s, t)

    def below(h):
        a, b = h
        return [(a - j, b - j) for j in range(1, min(a, b) + 1)]

    sys_ = TriangularSystem(index=list(M.basis), lower=below, r=r)
    solved = triangular_bar_solve(sys_)
    out: dict = {}
    for h in M.basis:
        a, b = h
        if s - a >= t - b:
            cf = tensor_cb_closed_form(s, t, a, b)
            if check and cf != solved[h]:
                raise AssertionError(f"closed form and solver disagree at s={s}, t={t}, (a,b)={h}")
            out[h] = ModuleVector(M, cf)
        else:
            out[h] = ModuleVector(M, solved[h])
    return out


def cb_table_json(s: int, t: int, table: Mapping) -> dict:
    return {
        "s": s,
        "t": t,
        "cb": [
            {
                "a": a,
                "b": b,
                "coeffs": [
                    {"m": m, "n": n, "scalar": format_coefficient(c)}
                    for (m, n), c in sorted(table[(a, b)].coeffs.items(), reverse=True)
                ],
            }
            for (a, b) in sorted(table)
        ],
    }


# ---------------------------------------------------------------------------
# Casimir and decomposition


def casimir_scalar(n: int) -> PiRational:
    """Scalar by which C^2 acts on a highest weight module of weight +-q^n."""
    num = QPI ** (n + 1) + q_pow(-n - 1)
    return PiRational.coerce(num * num) / (DQ * DQ * DQ * DQ)


def casimir_scalar_literal(n: int) -> PiRational:
    """[n+1]^2 / (pi q - q^-1)^2, the value asserted for C^2 in the source."""
    return PiRational.coerce(qint(n + 1) * qint(n + 1)) / (DQ * DQ)


def casimir_square() -> PBWElement:
    c = casimir(0) + casimir(1)
    return multiply(c, c)


def _specialized_block(M: WeightModule, u: PBWElement, labels: list, targets: list, sign: int) -> list:
    """Matrix rows = targets, cols = labels, entries of u at pi = sign."""
    idx = {lab: i for i, lab in enumerate(targets)}
    zero = RatFunc(0)
    cols = []
    for lab in labels:
        col = [zero] * len(targets)
        for m, cu in u.terms.items():
            for lab2, d in M.act_monomial(m, lab).items():
                if lab2 not in idx:
                    raise AssertionError("operator leaves the target space")
                col[idx[lab2]] = col[idx[lab2]] + PiRational.coerce(cu * d).specialize(sign)
        cols.append(col)
    return [[cols[j][i] for j in range(len(labels))] for i in range(len(targets))]


def casimir_c2_matrix(M: WeightModule, weight: int, sign: int) -> list:
    labs = M.weight_spaces()[weight]
    return _specialized_block(M, casimir_square(), labs, labs, sign)


def casimir_decompose(M: WeightModule) -> list[tuple[int, int]]:
    """Isotypic content [(n, multiplicity)] of a finite-dimensional module.

    C^2 is computed on each weight space at pi = +1 and pi = -1; the
    multiplicity of L(n) is the dimension of the C^2 = lambda_n eigenspace
    divided by n + 1.  Both specializations must agree.
    """
    spaces = M.weight_spaces()
    results = []
    for sign in (1, -1):
        dims: dict[int, int] = {}
        total = 0
        for w, labs in spaces.items():
            mat = casimir_c2_matrix(M, w, sign)
            found = 0
            for n in sorted({abs(x) for x in spaces}):
                if (n - w) % 2 or n < abs(w):
                    continue
                lam = casimir_scalar(n).specialize(sign)
                shifted = [[x - lam if i == j else x for j, x in enumerate(row)] for i, row in enumerate(mat)]
                k = len(labs) - rank(shifted)
                if k:
                    sq = _square(shifted)
                    if len(labs) - rank(sq) != k:
                        raise AssertionError(f"C^2 is not semisimple on weight {w}")
                    dims[n] = dims.get(n, 0) + k
                    found += k
            if found != len(labs):
                raise AssertionError(f"C^2 eigenvalue on weight {w} matches no highest weight (pi={sign})")
            total += found
        res = []
        for n in sorted(dims, reverse=True):
            if dims[n] % (n + 1):
                raise AssertionError(f"isotypic dimension {dims[n]} not divisible by {n + 1}")
            res.append((n, dims[n] // (n + 1)))
        results.append(res)
    if results[0] != results[1]:
        raise AssertionError(f"specializations disagree: {results[0]} vs {results[1]}")
    return results[0]


def _square(m: list) -> list:
    from .linalg import matmul

    return matmul(m, m)


def singular_vector_count(M: WeightModule, sign: int) -> dict[int, int]:
    """dim ker E on each weight space at pi = sign (independent oracle)."""
    spaces = M.weight_spaces()
    out = {}
    for w, labs in spaces.items():
        eps = M.sector(labs[0])
        e = PBWElement({PBWMonomial(eps, 0, 0, 1): ONE})
        targets = spaces.get(w + 2, [])
        if not targets:
            out[w] = len(labs)
            continue
        mat = _specialized_block(M, e, labs, targets, sign)
        k = len(labs) - rank(mat)
        if k:
            out[w] = k
    return out


def verma_singular_levels(n: int, sign: int, cutoff: int, eps: int | None = None, pi: int | None = None) -> list[int]:
    """Levels t >= 1 with E F^(t) nu = 0.

    ``pi=None`` tests vanishing in the covering ring; pi=+-1 tests one
    specialization only.
    """
    V = VermaModule(n, sign, cutoff, eps)
    out = []
    for t in range(1, cutoff + 1):
        c = PiRational.coerce(V.e_coefficient(t))
        zero = c.is_zero() if pi is None else not c.specialize(pi)
        if zero:
            out.append(t)
    return out
