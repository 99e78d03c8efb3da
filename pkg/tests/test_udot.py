import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from qcover.pi_ring import ONE, PI, Q, PiRational, ScalarParseError, qbinom, qint, simplify
from qcover.rep import tensor_cb, tensor_st
from qcover.udot import (
    CBIndex,
    PositivityError,
    UDotElement,
    UMono,
    act_on_tensor,
    bar,
    bilinear_form,
    bimodule_act,
    cb_element,
    cb_expand,
    coproduct_dot,
    form_f,
    form_f_product,
    format_cb_element,
    format_udot,
    from_cb,
    idempotent,
    morphism_dot,
    multiply,
    parse_udot,
    standard_monomial,
    structure_constants,
)
from qcover.upi_algebra import apply_morphism, generator, k_binom, pi_pow, q_pow
from qcover.upi_algebra import multiply as pbw_multiply

from .strategies import sectors, udot_elements, udot_monomials

QI = Q.unit_inverse()


def um(a, n, b, c=ONE):
    return UDotElement({UMono(a, n, b): c})


def E_left(x):
    """E x, with E taken in the sector of the left weight."""
    return _left("E", x)


def F_left(x):
    return _left("F", x)


def _left(g, x):
    out = UDotElement()
    for L in {m.left for m in x.terms}:
        block = UDotElement({m: c for m, c in x.terms.items() if m.left == L})
        out = out + bimodule_act(generator(g, L % 2), block)
    return out


# ---------------------------------------------------------------------------
# monomials and multiplication


def test_standard_monomial_examples():
    assert standard_monomial("EF", 0, 5, 0) == idempotent(5)
    # E 1_0 F = pi F 1_4 E + [2] 1_2
    fe = standard_monomial("FE", 1, 4, 1)
    assert um(1, 0, 1) == fe.scale(PI) + idempotent(2).scale(qint(2))
    with pytest.raises(ValueError):
        standard_monomial("EF", -1, 0, 0)


def test_weights():
    m = UMono(2, 1, 3)
    assert (m.left, m.right) == (5, 7)


@given(st.integers(-6, 6), st.integers(-6, 6))
def test_idempotents_orthogonal(m, n):
    prod = multiply(idempotent(m), idempotent(n))
    assert prod == (idempotent(n) if m == n else UDotElement())


@pytest.mark.parametrize("n", range(-5, 6))
def test_ef_minus_fe_on_idempotent(n):
    ef = E_left(F_left(idempotent(n)))
    fe = F_left(E_left(idempotent(n)))
    assert ef - fe.scale(PI) == idempotent(n).scale(qint(n))


@st.composite
def composable_triples(draw):
    x = draw(udot_monomials(2))
    y = draw(udot_monomials(2, weight=None))
    y = UMono(y.a, x.right - 2 * y.a, y.b)
    z = draw(udot_monomials(2))
    z = UMono(z.a, y.right - 2 * z.a, z.b)
    return x, y, z


@given(composable_triples())
def test_multiply_associative(t):
    x, y, z = (um(*m) for m in t)
    assert multiply(multiply(x, y), z) == multiply(x, multiply(y, z))


@given(udot_elements())
def test_idempotent_sum_is_unit(x):
    lefts = {m.left for m in x.terms}
    rights = {m.right for m in x.terms}
    one_l = sum((idempotent(n) for n in lefts), UDotElement())
    one_r = sum((idempotent(n) for n in rights), UDotElement())
    assert multiply(one_l, x) == x
    assert multiply(x, one_r) == x


# ---------------------------------------------------------------------------
# bimodule structure


@pytest.mark.parametrize("n", range(-4, 5))
def test_bimodule_examples(n):
    eps = n % 2
    assert bimodule_act(generator("K", eps), idempotent(n)) == idempotent(n).scale(q_pow(n))
    assert bimodule_act(generator("K", 1 - eps), idempotent(n)) == UDotElement()
    assert bimodule_act(generator("E", eps), idempotent(n)) == um(1, n, 0)
    assert bimodule_act(None, idempotent(n + 2), generator("E", eps)) == um(1, n, 0)
    for m in range(-2, 3):
        for a in range(3):
            got = bimodule_act(k_binom(eps, m, a), idempotent(n))
            assert got == idempotent(n).scale(qbinom(m + n, a))


@given(udot_monomials(2), st.sampled_from("EFK"), st.sampled_from("EFK"), sectors)
def test_bimodule_is_associative(m, g1, g2, eps):
    x = um(*m)
    u1, u2 = generator(g1, eps), generator(g2, eps)
    lhs = bimodule_act(u1, bimodule_act(u2, x))
    assert lhs.simplified() == bimodule_act(pbw_multiply(u1, u2), x).simplified()
    rhs = bimodule_act(None, bimodule_act(None, x, u1), u2)
    assert rhs.simplified() == bimodule_act(None, x, pbw_multiply(u1, u2)).simplified()


# ---------------------------------------------------------------------------
# bar


def test_bar_examples():
    for n in range(-3, 4):
        assert bar(idempotent(n)) == idempotent(n)
    for k in range(-6, 7):
        x = cb_element(1, 1, k)
        assert bar(x) == x
    x = um(1, 0, 1, Q)
    assert bar(x) == um(1, 0, 1, Q.bar())


@given(composable_triples())
def test_bar_is_multiplicative(t):
    x, y = um(*t[0], Q + PI), um(*t[1], QI)
    assert bar(multiply(x, y)) == multiply(bar(x), bar(y))


@given(udot_elements())
def test_bar_involution(x):
    assert bar(bar(x)) == x


# ---------------------------------------------------------------------------
# canonical basis


def test_cb_element_examples():
    for k in range(-4, 5):
        assert cb_element(0, 0, k) == idempotent(k)
    # E 1_{-2} F = pi F 1_2 E
    assert cb_element(1, 1, 0) == um(1, -2, 1)
    assert cb_element(1, 1, 0) == standard_monomial("FE", 1, 2, 1).scale(PI)
    assert cb_element(1, 0, 4) == um(1, 4, 0)
    assert format_cb_element(1, 0, 4) == "1_{6} E^(1)"
    assert format_cb_element(1, 1, 1) == "p * F^(1) 1_{3} E^(1)"


def test_cb_expand_examples():
    assert cb_expand(idempotent(3)) == {CBIndex(0, 0, 3): ONE}
    assert cb_expand(um(1, -1, 1)) == {CBIndex(1, 1, 1): ONE, CBIndex(0, 0, 1): ONE}


def test_cb_basis_property_box():
    B, K = 4, 12
    for a in range(B + 1):
        for b in range(B + 1):
            for k in range(-K, K + 1):
                x = cb_element(a, b, k)
                assert bar(x) == x
                assert cb_expand(x) == {CBIndex(a, b, k): ONE}
                # unitriangular against the EF monomial of the same shape
                lead = UMono(a, k - 2 * b, b)
                assert x.terms[lead] in (ONE, PI)


@given(udot_elements())
def test_cb_round_trip(x):
    assert from_cb(cb_expand(x)) == x


@given(st.integers(0, 3), st.integers(0, 3), st.integers(-8, 8))
def test_structure_constants_with_idempotent(a, b, k):
    idx = CBIndex(a, b, k)
    assert structure_constants((0, 0, idx.left), idx) == {idx: ONE}
    assert structure_constants(idx, (0, 0, k)) == {idx: ONE}
    assert structure_constants((0, 0, idx.left + 2), idx) == {}


def test_structure_constant_example():
    # E 1_0 F = CB(1,1,2) + [2] 1_2
    sc = structure_constants((1, 0, 0), (0, 1, 2))
    assert sc == {CBIndex(1, 1, 2): ONE, CBIndex(0, 0, 2): qint(2)}


def test_positivity_error_is_raised(monkeypatch):
    import qcover.udot as ud

    monkeypatch.setattr(ud, "cb_expand", lambda x: {CBIndex(0, 0, 0): -ONE})
    with pytest.raises(PositivityError):
        ud.structure_constants((0, 0, 0), (0, 0, 0))


# ---------------------------------------------------------------------------
# modules and coproduct


def test_act_on_tensor_examples():
    for s in range(3):
        for t in range(3):
            v = act_on_tensor(idempotent(t - s), s, t)
            assert v.coeffs == {(0, 0): ONE}
            assert not act_on_tensor(idempotent(t - s + 2), s, t).coeffs
    v = act_on_tensor(cb_element(1, 1, -1), 2, 1)
    assert v.coeffs == {(1, 1): ONE, (0, 0): QI * QI}


@pytest.mark.parametrize("s", range(5))
@pytest.mark.parametrize("t", range(5))
def test_act_on_tensor_matches_tensor_cb(s, t):
    table = tensor_cb(s, t, check=False)
    for (a, b), want in table.items():
        assert act_on_tensor(cb_element(a, b, t - s), s, t).simplified() == want


@given(st.integers(-4, 4), st.integers(-4, 4))
def test_coproduct_dot_idempotent(m, n):
    d = coproduct_dot(idempotent(m + n), m, n, m, n)
    assert d == {(UMono(0, m, 0), UMono(0, n, 0)): ONE}


@given(st.integers(-4, 4), st.integers(-4, 4))
def test_coproduct_dot_e(c, d):
    x = um(1, c + d, 0)
    # E (x) 1 part and K (x) E part
    assert coproduct_dot(x, c + 2, d, c, d) == {(UMono(1, c, 0), UMono(0, d, 0)): ONE}
    assert coproduct_dot(x, c, d + 2, c, d) == {(UMono(0, c, 0), UMono(1, d, 0)): pi_pow(c) * q_pow(c)}
    # weight bookkeeping: nothing else survives
    assert coproduct_dot(x, c + 1, d + 1, c, d) == {}


@given(udot_monomials(2), st.integers(-3, 3))
def test_coproduct_dot_integral(m, c):
    x = um(*m)
    d = m.right - c
    for a in range(m.left - d - 4, m.left - d + 5):
        for v in coproduct_dot(x, a, m.left - a, c, d).values():
            assert isinstance(simplify(v), type(ONE))


# ---------------------------------------------------------------------------
# morphisms


@pytest.mark.parametrize("n", range(-4, 5))
def test_morphisms_on_idempotents(n):
    assert morphism_dot("omega", idempotent(n)) == idempotent(-n)
    assert morphism_dot("tau", idempotent(n)) == idempotent(-n)
    assert morphism_dot("rho", idempotent(n)) == idempotent(n)


@given(udot_monomials(2), st.sampled_from("EF"))
def test_omega_respects_bimodule(m, g):
    x = um(*m)
    eps = m.left % 2
    u = generator(g, eps)
    lhs = morphism_dot("omega", bimodule_act(u, x))
    rhs = bimodule_act(apply_morphism("omega", u), morphism_dot("omega", x))
    assert lhs.simplified() == rhs.simplified()


# ---------------------------------------------------------------------------
# bilinear form


def test_form_examples():
    for a in range(-3, 4):
        assert bilinear_form(idempotent(a), idempotent(a)) == ONE
        assert bilinear_form(idempotent(a), idempotent(a + 2)) == 0
        f1 = um(0, a - 2, 1)  # F 1_a = 1_{a-2} F
        want = PiRational.coerce(ONE) / (ONE - PI * QI * QI)
        assert bilinear_form(f1, f1) == simplify(want)


@pytest.mark.parametrize("a", range(0, 6))
def test_form_pure_f_values(a):
    assert form_f(a) == form_f_product(a)
    for k in (-2, 0, 3):
        x = um(0, k - 2 * a, a)
        assert bilinear_form(x, x) == simplify(form_f(a))


@pytest.mark.parametrize("m", range(-3, 4))
def test_form_e_hand_value(m):
    # (E 1_m, E 1_m) = q^{m+1} (pi q^{m-1}/(1 - pi q^-2) - pi [m])
    x = um(1, m, 0)
    want = PiRational.coerce(q_pow(m + 1)) * (
        PiRational.coerce(PI * q_pow(m - 1)) / (ONE - PI * QI * QI) - PiRational.coerce(PI * qint(m))
    )
    assert bilinear_form(x, x) == simplify(want)


@st.composite
def same_block_pairs(draw):
    x = draw(udot_monomials(2))
    b = draw(st.integers(0, 2))
    a = b + (x.a - x.b)
    assume(a >= 0)
    return x, UMono(a, x.right - 2 * b, b)


@given(same_block_pairs())
def test_form_symmetric_and_order_independent(p):
    x, y = um(*p[0]), um(*p[1])
    v = bilinear_form(x, y)
    assert v == bilinear_form(y, x)
    assert v == bilinear_form(x, y, strategy="single")


@given(udot_monomials(2), st.integers(0, 2), st.sampled_from("FK"))
def test_form_contravariance(m, b, g):
    # (u x, y) = (x, rho(u) y); F and K are not used by the recursion
    shift = -1 if g == "F" else 0
    a = b + m.a - m.b + shift
    assume(a >= 0)
    x, y = um(*m), um(a, m.right - 2 * b, b)
    u = generator(g, m.left % 2)
    rho_u = apply_morphism("rho", generator(g, y.terms and next(iter(y.terms)).left % 2))
    assert bilinear_form(bimodule_act(u, x), y) == bilinear_form(x, bimodule_act(rho_u, y))


def test_form_block_orthogonal():
    x = um(1, 0, 1)
    assert bilinear_form(x, um(1, 2, 1)) == 0
    assert bilinear_form(x, um(0, 0, 0)) == 0


def test_form_rejects_unknown_strategy():
    with pytest.raises(ValueError):
        bilinear_form(idempotent(0), idempotent(0), strategy="diagonal")


# ---------------------------------------------------------------------------
# text


@given(udot_elements())
def test_udot_round_trip(x):
    text = format_udot(x)
    assert parse_udot(text) == x
    assert format_udot(parse_udot(text)) == text


def test_parse_forms():
    assert parse_udot("E^(2) 1_{3} F") == um(2, 3, 1)
    assert parse_udot("F 1_{4} E") == standard_monomial("FE", 1, 4, 1)
    assert parse_udot("CB(1,1,1)") == cb_element(1, 1, 1)
    assert format_udot(idempotent(5)) == "1_{5}"
    assert parse_udot("0") == UDotElement()
    assert parse_udot("(q + p*q^-1) * E 1_{0} - 2 * 1_{0}") == um(1, 0, 0, Q + PI * QI) - idempotent(0).scale(2)


@pytest.mark.parametrize("bad", ["E 1_{x}", "E F", "1_{0} 1_{2}", "CB(1,1)", "E^(-1) 1_{0}"])
def test_parse_errors(bad):
    with pytest.raises(ScalarParseError):
        parse_udot(bad)
