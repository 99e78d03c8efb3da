import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcover.cb_engine import (
    SolverError,
    SpecLaurent,
    TriangularSystem,
    native_cb_element,
    native_tensor_cb,
    sl2_cb_oracle,
    specialize_udot,
    triangular_bar_solve,
)
from qcover.pi_ring import ONE, PI, Q, Laurent, cone_membership, qint, specialize
from qcover.rep import psi_apply, tensor_cb, tensor_st
from qcover.udot import CBIndex, cb_element, idempotent, structure_constants

QI = Q.unit_inverse()


def L(terms):
    return Laurent.from_terms(terms)


def chain(n, r):
    index = list(range(n))
    return TriangularSystem(index=index, lower=lambda h: range(h), r=r)


# ---------------------------------------------------------------------------
# solver


def test_diagonal_system():
    sys_ = chain(3, {h: {h: ONE} for h in range(3)})
    assert triangular_bar_solve(sys_) == {h: {h: ONE} for h in range(3)}


def test_two_step_system():
    # Psi(b1) = b1 + (q - p q^-1) b0
    x = Q - PI * QI
    sys_ = chain(2, {0: {0: ONE}, 1: {1: ONE, 0: x}})
    p = triangular_bar_solve(sys_)[1]
    assert set(p) == {0, 1}
    c = p[0]
    assert cone_membership(c, "q_minus_lattice")
    # bar invariance of b1 + c b0 under Psi
    assert c.bar() + x == c


def test_tensor_system_l21():
    cb = tensor_cb(2, 1)
    assert cb[(1, 1)].coeffs == {(1, 1): ONE, (0, 0): QI * QI}
    for v in cb.values():
        assert psi_apply(v).simplified() == v


@pytest.mark.parametrize(
    "r, msg",
    [
        ({0: {0: ONE + ONE}}, "diagonal"),
        ({0: {0: ONE}, 1: {1: ONE, 2: ONE}, 2: {2: ONE}}, "lower interval"),
        ({0: {0: ONE}, 1: {1: ONE, 0: ONE}}, "involution"),
    ],
)
def test_malformed_systems(r, msg):
    sys_ = chain(len(r), r)
    with pytest.raises(SolverError, match=msg):
        triangular_bar_solve(sys_)


def test_unchecked_solve_reports_inconsistency():
    # Psi(b1) = b1 + 1 b0 is not an involution; the constant term is caught during solving
    sys_ = chain(2, {0: {0: ONE}, 1: {1: ONE, 0: ONE}})
    with pytest.raises(SolverError, match="constant term"):
        triangular_bar_solve(sys_, check=False)


def test_perturbation_breaks_invariance():
    M = tensor_st(2, 2)
    v = tensor_cb(2, 2)[(2, 2)]
    # at a non-minimal index, a q^0 shift destroys Psi-invariance
    w = v + M.basis_vector((1, 1))
    assert psi_apply(w).simplified() != w
    # at the minimal index Psi fixes b_{0,0}, so the shift only leaves the q^-1 lattice
    w = v + M.basis_vector((0, 0))
    assert psi_apply(w).simplified() == w.simplified()
    assert not cone_membership(w.coeffs[(0, 0)], "q_minus_lattice")
    # a q^-1 shift at the minimal index breaks Psi-invariance too
    w = v + M.basis_vector((0, 0)).scale(QI)
    assert psi_apply(w).simplified() != w


# ---------------------------------------------------------------------------
# specialized scalars


def test_spec_laurent_bar():
    for sign in (1, -1):
        q = SpecLaurent.mono(1, sign)
        assert q.bar() == SpecLaurent.mono(-1, sign, sign)
        assert q.bar().bar() == q


@given(st.dictionaries(st.integers(-4, 4), st.integers(-5, 5), max_size=5), st.sampled_from([1, -1]))
def test_spec_laurent_parts(terms, sign):
    x = SpecLaurent(L(terms), sign)
    assert x.negative_part() + x.constant_part() + x.positive_part() == x
    assert x.bar().bar() == x


# ---------------------------------------------------------------------------
# specialization and the native oracle


def test_specialize_udot_examples():
    for n in range(-3, 4):
        for sign in (1, -1):
            assert specialize_udot(idempotent(n), sign) == {(0, n, 0): L({0: 1})}
    sc = structure_constants((1, 0, 0), (0, 1, 2))
    assert specialize(sc[CBIndex(0, 0, 2)], 1) == L({1: 1, -1: 1})
    assert specialize(qint(2), 1) == L({1: 1, -1: 1})


def test_oracle_entries():
    oracle = sl2_cb_oracle(1, 8)
    for n in range(-8, 9):
        assert oracle[(0, 0, n)] == specialize_udot(cb_element(0, 0, n), 1)
        assert oracle[(1, 1, n)] == specialize_udot(cb_element(1, 1, n), 1)


@pytest.mark.parametrize("sign", [1, -1])
def test_native_solver_lattice(sign):
    # off-diagonal coefficients sit in q^-1 Z[q^-1] in the solver's own coordinates
    for s in range(4):
        for t in range(4):
            for h, v in native_tensor_cb(sign, s, t).items():
                for k, c in v.items():
                    if k != h:
                        assert all(e < 0 for e in c.poly.terms())


def test_oracle_known_value():
    # F 1_3 E = E 1_{-1} F - 1_1
    assert sl2_cb_oracle(1, 1)[(1, 1, 1)] == {(1, -1, 1): L({0: 1}), (0, 1, 0): L({0: -1})}


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("s", range(4))
@pytest.mark.parametrize("t", range(4))
def test_solver_commutes_with_specialization(sign, s, t):
    native = native_tensor_cb(sign, s, t)
    covering = tensor_cb(s, t)
    for h, v in covering.items():
        want = {k: specialize(c, sign) for k, c in v.coeffs.items()}
        got = {k: c.poly for k, c in native[h].items() if not c.is_zero()}
        assert got == want


@pytest.mark.parametrize("sign", [1, -1])
def test_native_cb_matches_specialization(sign):
    for a in range(3):
        for b in range(3):
            for k in range(-5, 6):
                assert specialize_udot(cb_element(a, b, k), sign) == native_cb_element(sign, a, b, k)
