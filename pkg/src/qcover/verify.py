"""Verification suites: exhaustive identity checks over finite boxes.

Every suite returns a one-line "OK: ..." summary or raises
``VerificationError`` carrying the first counterexample.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb
from typing import Callable

from .pi_ring import ONE, PI, PiRational, PiScalar, cone_membership, format_coefficient, qfact, qint, simplify
from .upi_algebra import (
    PBWElement,
    PBWMonomial,
    TensorElement,
    antipode,
    apply_morphism,
    casimir,
    casimir_ef_form,
    coproduct,
    coproduct_generator,
    coproduct_n,
    counit,
    format_element,
    generator,
    k_binom,
    k_bracket,
    monomial,
    multiply,
    naive_multiply,
    pi_pow,
    tensor_contract,
    tensor_multiply,
    unit,
)


class VerificationError(AssertionError):
    pass


def _fail(msg: str) -> None:
    raise VerificationError(msg)


@dataclass
class SuiteConfig:
    max_rs: int = 6
    samples: int = 100
    degree: int = 4
    seed: int = 0
    max_power: int = 4
    max_n: int = 10
    modules: int = 4
    casimir_n: int = 8
    cutoff: int = 10
    B: int = 4
    K: int = 12
    pos_B: int = 3
    pos_K: int = 8
    form_B: int = 3
    form_K: int = 6
    form_f: int = 5


# ---------------------------------------------------------------------------
# U: commutation identities


def _E(eps: int, s: int) -> PBWElement:
    return monomial(eps, 0, 0, s)


def _F(eps: int, s: int) -> PBWElement:
    return monomial(eps, s, 0, 0)


def commutation_identities(eps: int, r: int, s: int) -> list[tuple[str, PBWElement, PBWElement]]:
    """(name, lhs, rhs) for the four divided-power commutation identities.

    Products are formed with ``naive_multiply`` (ordinary powers and the
    defining relations) so the check is independent of the normal-form
    multiplication, which is compared separately.
    """
    nm = naive_multiply
    out = []
    lhs = nm(_E(eps, 1), _F(eps, s)).scale(pi_pow(s))
    rhs = nm(_F(eps, s), _E(eps, 1)) + nm(_F(eps, s - 1), k_bracket(eps, 1 - s)).scale(PI)
    out.append(("E F^(s)", lhs, rhs))
    lhs = nm(_E(eps, r), _F(eps, s)).scale(pi_pow(r * s))
    rhs = PBWElement()
    for i in range(min(r, s) + 1):
        rhs = rhs + nm(nm(_F(eps, s - i), k_binom(eps, 2 * i - (r + s), i)), _E(eps, r - i)).scale(pi_pow(comb(i + 1, 2)))
    out.append(("E^(r) F^(s)", lhs, rhs))
    lhs = nm(_F(eps, 1), _E(eps, s)).scale(pi_pow(s))
    rhs = nm(_E(eps, s), _F(eps, 1)) - nm(_E(eps, s - 1), k_bracket(eps, s - 1)).scale(pi_pow(1 - s))
    out.append(("F E^(s)", lhs, rhs))
    lhs = nm(_F(eps, s), _E(eps, r)).scale(pi_pow(r * s))
    rhs = PBWElement()
    for i in range(min(r, s) + 1):
        term = nm(nm(_E(eps, r - i), k_binom(eps, r + s - (i + 1), i)), _F(eps, s - i))
        rhs = rhs + term.scale(pi_pow(i * (r + s)) * (-1) ** i)
    out.append(("F^(s) E^(r)", lhs, rhs))
    return out


def suite_relations(cfg: SuiteConfig) -> str:
    n = 0
    for eps in (0, 1):
        for r in range(1, cfg.max_rs + 1):
            for s in range(1, cfg.max_rs + 1):
                for name, lhs, rhs in commutation_identities(eps, r, s):
                    n += 1
                    if lhs != rhs:
                        _fail(f"{name} fails at sector {eps}, r={r}, s={s}: lhs = {format_element(lhs)}")
                a, b = _E(eps, r), _F(eps, s)
                if multiply(a, b) != naive_multiply(a, b):
                    _fail(f"normal-form product E^({r}) F^({s}) disagrees with the naive product in sector {eps}")
    return f"OK: {n} commutation identities hold for 1 <= r,s <= {cfg.max_rs}, both sectors"


# ---------------------------------------------------------------------------
# automorphisms


def random_scalar(rng: random.Random) -> PiScalar:
    out = PiScalar()
    for _ in range(rng.randint(1, 2)):
        out = out + PiScalar.monomial(rng.randint(-2, 2), rng.randint(0, 1), rng.choice((-2, -1, 1, 2)))
    return out


def random_element(rng: random.Random, eps: int, degree: int, terms: int = 3) -> PBWElement:
    out = PBWElement()
    for _ in range(terms):
        a = rng.randint(0, degree)
        c = rng.randint(0, degree - a)
        b = rng.randint(-2, 2)
        out = out + monomial(eps, a, b, c, random_scalar(rng))
    return out


def _compose(*names: str) -> Callable[[PBWElement], PBWElement]:
    def f(x: PBWElement) -> PBWElement:
        for nm in reversed(names):
            x = apply_morphism(nm, x)
        return x

    return f


def group_relations(eps: int) -> list[tuple[str, Callable, Callable]]:
    ident = _compose()
    rels = [
        ("tau^2 = 1", _compose("tau", "tau"), ident),
        ("psi^2 = 1", _compose("psi", "psi"), ident),
        ("psi tau = tau psi", _compose("psi", "tau"), _compose("tau", "psi")),
        ("psi omega = omega psi", _compose("psi", "omega"), _compose("omega", "psi")),
        ("rho^2 = 1", _compose("rho", "rho"), ident),
    ]
    if eps == 0:
        rels += [
            ("omega^4 = 1", _compose(*["omega"] * 4), ident),
            ("tau omega = omega^3 tau", _compose("tau", "omega"), _compose("omega", "omega", "omega", "tau")),
        ]
    else:
        rels += [
            ("omega^2 = 1", _compose("omega", "omega"), ident),
            ("tau omega = omega tau", _compose("tau", "omega"), _compose("omega", "tau")),
        ]
    return rels


_ANTI = {"tau", "rho"}


def suite_automorphisms(cfg: SuiteConfig) -> str:
    rng = random.Random(cfg.seed)
    checked = 0
    for eps in (0, 1):
        gens = [generator(g, eps) for g in "EFK"] + [generator("K", eps, -1)]
        elems = gens + [random_element(rng, eps, cfg.degree) for _ in range(cfg.samples)]
        for name, lhs, rhs in group_relations(eps):
            for x in elems:
                checked += 1
                if lhs(x) != rhs(x):
                    _fail(f"{name} fails in sector {eps} on {format_element(x)}")
        # (anti-)multiplicativity on generator pairs
        for nm in ("psi", "omega", "tau", "rho"):
            for x in gens:
                for y in gens:
                    img = apply_morphism(nm, multiply(x, y))
                    fx, fy = apply_morphism(nm, x), apply_morphism(nm, y)
                    want = multiply(fy, fx) if nm in _ANTI else multiply(fx, fy)
                    if img != want:
                        _fail(f"{nm} is not an (anti-)homomorphism on {format_element(x)} * {format_element(y)}")
    return f"OK: automorphism group relations hold on {checked} (relation, element) pairs, both sectors"


# ---------------------------------------------------------------------------
# Hopf structure


def _counit_left(t: TensorElement) -> PBWElement:
    out = PBWElement()
    for (m1, m2), c in t.terms.items():
        e = counit(PBWElement({m1: ONE}))
        if not (e == 0 if isinstance(e, int) else e.is_zero()):
            out = out + PBWElement({m2: c * e})
    return out.simplified()


def _counit_right(t: TensorElement) -> PBWElement:
    out = PBWElement()
    for (m1, m2), c in t.terms.items():
        e = counit(PBWElement({m2: ONE}))
        if not (e == 0 if isinstance(e, int) else e.is_zero()):
            out = out + PBWElement({m1: c * e})
    return out.simplified()


def suite_hopf(cfg: SuiteConfig) -> str:
    one = unit()
    ident = lambda y: y  # noqa: E731
    for eps in (0, 1):
        gens = {g: generator(g, eps) for g in "EFK"}
        gens["K^-1"] = generator("K", eps, -1)
        for g, x in gens.items():
            d = coproduct(x)
            c = counit(x)
            if tensor_contract(d, antipode, ident) != one.scale(c):
                _fail(f"m(S x 1)Delta != counit on {g}{eps}")
            if tensor_contract(d, ident, antipode) != one.scale(c):
                _fail(f"m(1 x S)Delta != counit on {g}{eps}")
            if _counit_left(d) != x or _counit_right(d) != x:
                _fail(f"counit axiom fails on {g}{eps}")
        for g in "EFK":
            for p in range(1, cfg.max_power + 1):
                x = generator(g, eps, p)
                d = coproduct(x)
                if coproduct_n(d, 0) != coproduct_n(d, 1):
                    _fail(f"coassociativity fails on {g}{eps}^({p})")
                if g == "K":
                    continue
                lhs = coproduct_generator(g, eps, p)
                d1 = coproduct(generator(g, eps))
                acc = d1
                for _ in range(p - 1):
                    acc = tensor_multiply(acc, d1)
                acc = acc.scale(PiRational.coerce(qfact(p)).inverse()).simplified()
                if lhs != acc:
                    _fail(f"divided-power coproduct formula fails for {g}{eps}^({p})")
        names = list(gens)
        for g1 in names:
            for g2 in names:
                x, y = gens[g1], gens[g2]
                if coproduct(multiply(x, y)) != tensor_multiply(coproduct(x), coproduct(y)):
                    _fail(f"Delta is not multiplicative on {g1}{eps} * {g2}{eps}")
    return f"OK: Hopf axioms on generators, coassociativity and divided-power coproducts for powers <= {cfg.max_power}"


# ---------------------------------------------------------------------------
# quasi-R-matrix


def suite_theta(cfg: SuiteConfig) -> str:
    from .rep import act_tensor_element, delta_bar, simple_module, tensor, theta_apply, theta_scalar_b

    for n in range(1, cfg.max_n + 1):
        b = theta_scalar_b(n)
        if not b.is_zero():
            _fail(f"b_{n} = {format_coefficient(b)} is not 0")
    for s in range(cfg.modules + 1):
        for t in range(cfg.modules + 1):
            M = tensor(simple_module(s), simple_module(t))
            for eps in (0, 1):
                for g in ("E", "F", "K"):
                    u = generator(g, eps)
                    du, dbu = coproduct(u), delta_bar(u)
                    for h in M.basis:
                        v = M.basis_vector(h)
                        lhs = act_tensor_element(du, theta_apply(v)).simplified()
                        rhs = theta_apply(act_tensor_element(dbu, v)).simplified()
                        if lhs != rhs:
                            _fail(f"Delta(u) Theta != Theta Delta-bar(u) for u={g}{eps} on L({s}) (x) L({t}) at {h}")
    return (
        f"OK: b_n = 0 for 1 ≤ n ≤ {cfg.max_n}; intertwining verified on L(s)⊗L(t), s,t ≤ {cfg.modules}"
    )


# ---------------------------------------------------------------------------
# Casimir and classification


def casimir_checks(cfg: SuiteConfig) -> None:
    from .rep import casimir_decompose, casimir_scalar, casimir_square, simple_module, tensor

    for eps in (0, 1):
        C = casimir(eps)
        if C != casimir_ef_form(eps):
            _fail(f"the two expressions of the Casimir disagree in sector {eps}")
        for g in "EFK":
            x = generator(g, eps)
            sign = PI if g != "K" else ONE
            if multiply(C, x) != multiply(x, C).scale(sign):
                _fail(f"C u != pi^p(u) u C for u = {g}{eps}")
    C2 = casimir_square()
    for n in range(cfg.casimir_n + 1):
        for sg in (1, -1):
            M = simple_module(n, sg)
            lam = casimir_scalar(n)
            for h in M.basis:
                v = M.basis_vector(h)
                got = M.act(C2, v)
                want = v.scale(lam)
                if (got - want).simplified().coeffs:
                    _fail(f"C^2 is not the expected scalar on L({n},{'+' if sg > 0 else '-'}) at basis vector {h}")
    for s in range(cfg.modules + 1):
        for t in range(cfg.modules + 1):
            d = casimir_decompose(tensor(simple_module(s), simple_module(t)))
            want = [(s + t - 2 * i, 1) for i in range(min(s, t) + 1)]
            if d != want:
                _fail(f"L({s}) (x) L({t}) decomposes as {d}, expected {want}")


def suite_casimir(cfg: SuiteConfig) -> str:
    casimir_checks(cfg)
    return (
        f"OK: C^2 acts on L(n,±) by ((pi q)^(n+1) + q^(-n-1))^2/(pi q - q^-1)^4 for n ≤ {cfg.casimir_n}; "
        f"L(s)⊗L(t) is multiplicity free with the expected summands for s,t ≤ {cfg.modules}"
    )


def suite_classification(cfg: SuiteConfig) -> str:
    from .rep import verma_singular_levels

    for n in range(cfg.casimir_n + 1):
        for sg in (1, -1):
            lv = verma_singular_levels(n, sg, cfg.cutoff)
            if lv != [n + 1]:
                _fail(f"Verma of weight {sg:+d}q^{n}, sector {n % 2}: singular levels {lv}, expected [{n + 1}]")
            wrong = verma_singular_levels(n, sg, cfg.cutoff, eps=1 - n % 2)
            if wrong:
                _fail(f"Verma of weight {sg:+d}q^{n} in the wrong sector has singular levels {wrong}")
    for n in range(-3, 0):
        for sg in (1, -1):
            lv = verma_singular_levels(n, sg, cfg.cutoff)
            if lv:
                _fail(f"Verma of negative weight {sg:+d}q^{n} has singular levels {lv}")
    return f"OK: truncated Vermas (cutoff {cfg.cutoff}) are singular exactly at t = n+1 for n ≤ {cfg.casimir_n}, n ≡ ε"


# ---------------------------------------------------------------------------
# canonical bases


def suite_cb_tensor(cfg: SuiteConfig) -> str:
    from .rep import psi_apply, tensor_cb

    for s in range(cfg.modules + 1):
        for t in range(cfg.modules + 1):
            table = tensor_cb(s, t, check=True)
            for h, v in table.items():
                if v.coeffs.get(h) != ONE:
                    _fail(f"tensor CB ({s},{t}) entry {h} is not unitriangular")
                for k, c in v.coeffs.items():
                    if k != h and not (cone_membership(c, "q_minus_lattice") and cone_membership(c, "positive")):
                        _fail(f"tensor CB ({s},{t}) entry {h} has coefficient {format_coefficient(c)} at {k}")
                if psi_apply(v).simplified() != v:
                    _fail(f"tensor CB ({s},{t}) entry {h} is not Psi-invariant")
    return f"OK: tensor canonical bases for s,t ≤ {cfg.modules} are Psi-invariant, unitriangular and positive; closed form agrees with the solver"


def suite_cb_udot(cfg: SuiteConfig) -> str:
    from .rep import tensor_cb
    from .udot import CBIndex, UDotElement, UMono, act_on_tensor, bar, cb_element, cb_expand, from_cb

    for a in range(cfg.B + 1):
        for b in range(cfg.B + 1):
            for k in range(-cfg.K, cfg.K + 1):
                x = cb_element(a, b, k)
                if bar(x) != x:
                    _fail(f"CB({a},{b},{k}) is not bar-invariant")
                if cb_expand(x) != {CBIndex(a, b, k): ONE}:
                    _fail(f"cb_expand(CB({a},{b},{k})) is not the unit vector")
                m = UDotElement({UMono(a, k - 2 * b, b): ONE})
                if from_cb(cb_expand(m)) != m:
                    _fail(f"E^({a}) 1_{{{k - 2 * b}}} F^({b}) does not survive the CB round trip")
    for s in range(cfg.modules + 1):
        for t in range(cfg.modules + 1):
            table = tensor_cb(s, t, check=False)
            for (a, b), want in table.items():
                got = act_on_tensor(cb_element(a, b, t - s), s, t).simplified()
                if got != want:
                    _fail(f"CB({a},{b},{t - s}) acting on L({s},{t}) differs from the tensor canonical basis")
    return f"OK: U-dot canonical basis round trips and is bar-invariant on a,b ≤ {cfg.B}, |k| ≤ {cfg.K}; compatible with L(s,t), s,t ≤ {cfg.modules}"


def positivity_box(B: int, K: int):
    """Composable pairs (i1, i2) with both indices in the box."""
    from .udot import CBIndex

    box = [CBIndex(a, b, k) for a in range(B + 1) for b in range(B + 1) for k in range(-K, K + 1)]
    by_right: dict[int, list] = {}
    for i in box:
        by_right.setdefault(i.right, []).append(i)
    for i2 in box:
        for i1 in by_right.get(i2.left, ()):
            yield i1, i2


def suite_positivity(cfg: SuiteConfig) -> str:
    from .udot import PositivityError, structure_constants

    n = 0
    for i1, i2 in positivity_box(cfg.pos_B, cfg.pos_K):
        try:
            structure_constants(i1, i2)
        except PositivityError as exc:
            _fail(str(exc))
        n += 1
    return f"OK: {n} canonical-basis products in the box a,b ≤ {cfg.pos_B}, |k| ≤ {cfg.pos_K} have structure constants in N[q,q^-1,pi]"


def suite_specialize(cfg: SuiteConfig) -> str:
    from .cb_engine import native_cb_element, sl2_cb_oracle, specialize_udot
    from .udot import cb_element

    oracle = sl2_cb_oracle(cfg.B, cfg.K, sign=1)
    for (a, b, k), want in oracle.items():
        if specialize_udot(cb_element(a, b, k), 1) != want:
            _fail(f"CB({a},{b},{k}) at pi = +1 differs from the sl(2) oracle")
        if specialize_udot(cb_element(a, b, k), -1) != native_cb_element(-1, a, b, k):
            _fail(f"CB({a},{b},{k}) at pi = -1 differs from the natively computed basis")
    return f"OK: specializations at pi = ±1 match the native canonical bases on a,b ≤ {cfg.B}, |k| ≤ {cfg.K}"


# ---------------------------------------------------------------------------
# bilinear form


def form_box(B: int, K: int):
    from .udot import UMono

    return [UMono(a, k - 2 * b, b) for a in range(B + 1) for b in range(B + 1) for k in range(-K, K + 1)]


def suite_form(cfg: SuiteConfig) -> str:
    from .udot import UDotElement, bilinear_form, form_f, form_f_product, standard_monomial

    for a in range(cfg.form_f + 1):
        if form_f(a) != form_f_product(a):
            _fail(f"the two expressions of (theta^({a}), theta^({a})) disagree")
        x = standard_monomial("FE", a, 0, 0)
        if bilinear_form(x, x) != simplify(form_f(a)):
            _fail(f"(F^({a}) 1_0, F^({a}) 1_0) does not match the f-form value")
    box = form_box(cfg.form_B, cfg.form_K)
    blocks: dict[tuple[int, int], list] = {}
    for m in box:
        blocks.setdefault((m.left, m.right), []).append(m)
    n = 0
    for m1 in box:
        x = UDotElement({m1: ONE})
        for m2 in blocks.get((m1.left, m1.right), ()):
            y = UDotElement({m2: ONE})
            v = bilinear_form(x, y)
            if v != bilinear_form(y, x):
                _fail(f"form is not symmetric on {m1}, {m2}")
            if v != bilinear_form(x, y, strategy="single"):
                _fail(f"strip orders disagree on {m1}, {m2}")
            n += 1
        # orthogonality against a neighbouring block
        other = UDotElement({m1._replace(n=m1.n + 2): ONE})
        if not _is_zero(bilinear_form(x, other)):
            _fail(f"form is not block-orthogonal on {m1}")
    return f"OK: form symmetric, block-orthogonal and strip-order independent on {n} pairs; pure-F values match for a ≤ {cfg.form_f}"


def _is_zero(v) -> bool:
    return v == 0 if isinstance(v, int) else v.is_zero()


SUITES: dict[str, Callable[[SuiteConfig], str]] = {
    "relations": suite_relations,
    "automorphisms": suite_automorphisms,
    "hopf": suite_hopf,
    "theta": suite_theta,
    "casimir": suite_casimir,
    "classification": suite_classification,
    "cb-tensor": suite_cb_tensor,
    "cb-udot": suite_cb_udot,
    "positivity": suite_positivity,
    "form": suite_form,
    "specialize": suite_specialize,
}


def run_suite(name: str, cfg: SuiteConfig | None = None) -> str:
    return SUITES[name](cfg or SuiteConfig())
