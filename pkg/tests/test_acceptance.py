"""Acceptance criteria 1-11 at their stated sizes and runtime bounds.

Each test records a one-line verdict in ``RESULTS``; conftest prints them at
the end of the session.  Criterion 5 is checked literally and is expected to
fail: the stated scalar for C^2 does not match the action (see the ledger).
"""

import time

from qcover.verify import SuiteConfig, run_suite

RESULTS: dict[int, str] = {}

CFG = SuiteConfig()


def _record(n, title, seconds, limit, ok, detail=""):
    verdict = "PASS" if ok else "FAIL"
    line = f"criterion {n:2d} {verdict}  {title}  ({seconds:.1f} s, limit {limit} s){'  ' + detail if detail else ''}"
    RESULTS[n] = line
    print(line)


def _timed_suite(n, title, suite, limit):
    t0 = time.perf_counter()
    try:
        msg = run_suite(suite, CFG)
        ok, detail = True, ""
    except AssertionError as e:
        msg, ok, detail = None, False, str(e)
    dt = time.perf_counter() - t0
    ok = ok and dt < limit
    _record(n, title, dt, limit, ok, detail or ("over time limit" if dt >= limit else ""))
    assert msg is not None, detail
    assert dt < limit, f"{suite} took {dt:.1f} s"
    return msg


def test_criterion_01_commutation():
    _timed_suite(1, "commutation identities, 1 <= r,s <= 6, both sectors", "relations", 10)


def test_criterion_02_automorphisms():
    _timed_suite(2, "automorphism group relations on generators and 100 random elements", "automorphisms", 10)


def test_criterion_03_hopf():
    _timed_suite(3, "Hopf axioms, coassociativity, divided-power coproducts <= 4", "hopf", 30)


def test_criterion_04_theta():
    msg = _timed_suite(4, "quasi-R-matrix: b_n = 0 for n <= 10, intertwining on L(s)(x)L(t)", "theta", 60)
    assert msg == "OK: b_n = 0 for 1 ≤ n ≤ 10; intertwining verified on L(s)⊗L(t), s,t ≤ 4"


def test_criterion_05_casimir():
    from qcover.pi_ring import PiRational, simplify
    from qcover.rep import casimir_decompose, casimir_scalar_literal, casimir_square, simple_module, tensor

    t0 = time.perf_counter()
    C2 = casimir_square()
    mismatches = []
    for n in range(9):
        for sg in (1, -1):
            M = simple_module(n, sg)
            lam = PiRational.coerce(casimir_scalar_literal(n))
            v = M.basis_vector(M.basis[0])
            if (M.act(C2, v) - v.scale(simplify(lam))).simplified().coeffs:
                mismatches.append(f"L({n},{'+' if sg > 0 else '-'})")
    decomp_ok = all(
        casimir_decompose(tensor(simple_module(s), simple_module(t)))
        == [(s + t - 2 * i, 1) for i in range(min(s, t) + 1)]
        for s in range(5)
        for t in range(5)
    )
    example_ok = casimir_decompose(tensor(simple_module(1), simple_module(2))) == [(3, 1), (1, 1)]
    dt = time.perf_counter() - t0
    ok = not mismatches and decomp_ok and example_ok and dt < 60
    detail = (
        f"literal [n+1]^2/(pi q - q^-1)^2 fails on {len(mismatches)} of 18 modules; "
        f"decomposition {'ok' if decomp_ok else 'FAILS'}; L(1)(x)L(2) example {'ok' if example_ok else 'FAILS'}"
    )
    _record(5, "Casimir scalar on L(n,±), n <= 8; tensor decomposition s,t <= 4", dt, 60, ok, detail)
    assert decomp_ok and example_ok
    assert dt < 60
    assert not mismatches, detail


def test_criterion_06_tensor_cb():
    _timed_suite(6, "tensor canonical basis, s,t <= 4: Psi-invariant, lattice, closed form", "cb-tensor", 120)


def test_criterion_07_udot_cb():
    _timed_suite(7, "modified-algebra CB, a,b <= 4, |k| <= 12: round trip, bar, tensor compatibility", "cb-udot", 120)


def test_criterion_08_positivity():
    _timed_suite(8, "positivity of structure constants, a,b <= 3, |k| <= 8", "positivity", 180)


def test_criterion_09_specialize():
    _timed_suite(9, "specialization at pi = ±1 matches natively computed bases, a,b <= 4, |k| <= 12", "specialize", 120)


def test_criterion_10_form():
    _timed_suite(10, "bilinear form, a,b <= 3, |k| <= 6; pure-F values a <= 5", "form", 60)


def test_criterion_11_classification():
    _timed_suite(11, "Verma singular vectors at t = n+1, n <= 8, cutoff 10", "classification", 30)
