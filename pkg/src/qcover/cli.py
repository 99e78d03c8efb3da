"""Command-line front end.

Exit codes: 0 success, 1 domain error (including failed verification),
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from typing import Sequence

from .pi_ring import (
    PiRational,
    PiScalar,
    RatFunc,
    ScalarParseError,
    ZeroDivisorError,
    format_coefficient,
    format_laurent,
    parse_coefficient,
    specialize,
)
from .upi_algebra import (
    MORPHISMS,
    PBWElement,
    apply_morphism,
    coproduct,
    format_element,
    format_tensor,
    multiply,
    parse_element,
)

SCHEMA = "qcover/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401
        raise UsageError(message)


def _is_udot(text: str) -> bool:
    return "1_" in text or "CB(" in text


def _parse_any(text: str):
    if _is_udot(text):
        from .udot import parse_udot

        return parse_udot(text)
    return parse_element(text)


def _format_any(x) -> str:
    from .udot import UDotElement, format_udot

    return format_udot(x) if isinstance(x, UDotElement) else format_element(x)


def _triple(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"expected a,b,k but got {text!r}")
    try:
        return tuple(int(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise UsageError(f"expected three integers but got {text!r}") from None


def _pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    try:
        s, t = (int(p) for p in parts)
    except ValueError:
        raise UsageError(f"expected s,t but got {text!r}") from None
    return s, t


def _pi_sign(text: str) -> int:
    if text in ("+1", "1"):
        return 1
    if text == "-1":
        return -1
    raise UsageError(f"--pi must be +1 or -1, got {text!r}")


# ---------------------------------------------------------------------------
# commands: each returns (text, json-payload)


def cmd_normal_form(args):
    x = _parse_any(args.element)
    s = _format_any(x)
    return s, {"element": s}


def cmd_mul(args):
    x, y = _parse_any(args.x), _parse_any(args.y)
    if type(x) is not type(y):
        raise ValueError("cannot multiply an element of U with an element of the modified algebra")
    if isinstance(x, PBWElement):
        z = multiply(x, y)
    else:
        from .udot import multiply as umul

        z = umul(x, y)
    s = _format_any(z)
    return s, {"product": s}


def cmd_morphism(args):
    x = _parse_any(args.x)
    if isinstance(x, PBWElement):
        z = apply_morphism(args.name, x)
    elif args.name == "psi":
        from .udot import bar

        z = bar(x)
    else:
        from .udot import morphism_dot

        z = morphism_dot(args.name, x)
    s = _format_any(z)
    return s, {"morphism": args.name, "image": s}


def cmd_coproduct(args):
    x = parse_element(args.x)
    s = format_tensor(coproduct(x))
    return s, {"coproduct": s}


def cmd_cb(args):
    from .udot import cb_element, cb_shape, format_cb_element, format_udot

    shape, n = cb_shape(args.a, args.b, args.k)
    s = format_cb_element(args.a, args.b, args.k)
    ef = format_udot(cb_element(args.a, args.b, args.k))
    return s, {"idx": [args.a, args.b, args.k], "shape": shape, "n": n, "element": s, "ef_form": ef}


def cmd_cb_expand(args):
    from .udot import cb_expand, format_cb_expansion, parse_udot

    exp = cb_expand(parse_udot(args.x))
    s = format_cb_expansion(exp)
    keys = sorted(exp, key=lambda i: (i.left, i.right, i.a, i.b))
    return s, {"terms": [{"idx": list(i), "scalar": format_coefficient(exp[i])} for i in keys]}


def cmd_tensor_cb(args):
    from .rep import cb_table_json, tensor_cb

    table = tensor_cb(args.s, args.t)
    js = cb_table_json(args.s, args.t, table)
    lines = []
    for entry in js["cb"]:
        terms = " + ".join(
            (f"({c['scalar']}) * " if c["scalar"] != "1" else "") + f"b({c['m']},{c['n']})" for c in entry["coeffs"]
        )
        lines.append(f"({entry['a']},{entry['b']}): {terms}")
    return "\n".join(lines), js


def cmd_struct_const(args):
    from .udot import format_cb_expansion, structure_constants

    i1, i2 = _triple(args.i1), _triple(args.i2)
    sc = structure_constants(i1, i2)
    keys = sorted(sc, key=lambda i: (i.left, i.right, i.a, i.b))
    products = [{"idx": list(i), "scalar": format_coefficient(sc[i])} for i in keys]
    return format_cb_expansion(sc), {"i1": list(i1), "i2": list(i2), "products": products}


def cmd_form(args):
    from .udot import bilinear_form, parse_udot

    v = bilinear_form(parse_udot(args.x), parse_udot(args.y), strategy=args.strategy)
    s = format_coefficient(v)
    return s, {"form": s}


def _specialize_text(c, sign: int) -> str:
    v = specialize(c, sign)
    if isinstance(v, RatFunc):
        lv = v.to_laurent()
        if lv is None:
            return _ratfunc_text(v)
        v = lv
    return format_laurent(v)


def _ratfunc_text(v: RatFunc) -> str:
    return format_coefficient(PiRational(v, v))


def cmd_specialize(args):
    sign = _pi_sign(args.pi)
    text = args.x
    if _is_udot(text):
        from .cb_engine import specialize_udot
        from .udot import UMono, format_umono, parse_udot

        sp = specialize_udot(parse_udot(text), sign)
        keys = sorted(sp, key=lambda k: (UMono(*k).left, UMono(*k).right, k[0]))
        s = " + ".join(
            ("" if format_laurent(sp[k]) == "1" else f"({format_laurent(sp[k])}) * ") + format_umono(UMono(*k)) for k in keys
        ) or "0"
    elif any(ch in text for ch in "EFKe"):
        x = parse_element(text)
        parts = []
        from .upi_algebra import _mono_key, format_monomial

        for m in sorted(x.terms, key=_mono_key):
            c = _specialize_text(x.terms[m], sign)
            if c == "0":
                continue
            parts.append(("" if c == "1" else f"({c}) * ") + format_monomial(m))
        s = " + ".join(parts) or "0"
    else:
        s = _specialize_text(parse_coefficient(text), sign)
    return s, {"pi": sign, "value": s}


def cmd_decompose(args):
    from .rep import casimir_decompose, simple_module, tensor

    s, t = _pair(args.tensor)
    if s < 0 or t < 0:
        raise UsageError("tensor factors need nonnegative highest weights")
    d = casimir_decompose(tensor(simple_module(s), simple_module(t)))
    txt = " + ".join(f"L({n},+)" if m == 1 else f"{m}*L({n},+)" for n, m in d)
    return txt, {"s": s, "t": t, "summands": [{"n": n, "sign": "+", "multiplicity": m} for n, m in d]}


def _suite_job(job):
    from .verify import VerificationError, run_suite

    name, cfg = job
    try:
        return name, True, run_suite(name, cfg)
    except VerificationError as exc:
        return name, False, f"FAIL: {exc}"


def cmd_verify(args):
    from .verify import SUITES, SuiteConfig

    cfg = SuiteConfig(**{f.name: getattr(args, f.name) for f in fields(SuiteConfig) if getattr(args, f.name, None) is not None})
    names = list(SUITES) if args.suite == "all" else [args.suite]
    jobs = [(n, cfg) for n in names]
    threads = max(1, int(os.environ.get("QCOVER_THREADS", "1") or 1))
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_suite_job, jobs))
    else:
        results = [_suite_job(j) for j in jobs]
    ok = all(r[1] for r in results)
    if len(results) == 1:
        text = results[0][2]
    else:
        text = "\n".join(f"{n}: {msg}" for n, _, msg in results)
    payload = {"suites": [{"suite": n, "ok": good, "message": msg} for n, good, msg in results], "ok": ok}
    return text, payload, (0 if ok else 1)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcover", description="Exact computations in the covering quantum algebra of osp(1|2).")
    p.add_argument("--format", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
        sp.set_defaults(func=fn)
        return sp

    sp = add("normal-form", cmd_normal_form, "PBW (or EF) normal form of an element")
    sp.add_argument("element")
    sp = add("mul", cmd_mul, "product of two elements")
    sp.add_argument("x")
    sp.add_argument("y")
    sp = add("morphism", cmd_morphism, "apply psi, omega, tau or rho")
    sp.add_argument("name", choices=MORPHISMS)
    sp.add_argument("x")
    sp = add("coproduct", cmd_coproduct, "coproduct of an element of U")
    sp.add_argument("x")
    sp = add("cb", cmd_cb, "canonical basis element CB(a,b,k)")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp = add("cb-expand", cmd_cb_expand, "expand a modified-algebra element in the canonical basis")
    sp.add_argument("x")
    sp = add("tensor-cb", cmd_tensor_cb, "canonical basis of the tensor module L(s,t)")
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp = add("struct-const", cmd_struct_const, "structure constants of a canonical-basis product")
    sp.add_argument("--i1", required=True)
    sp.add_argument("--i2", required=True)
    sp = add("form", cmd_form, "bilinear form on the modified algebra")
    sp.add_argument("x")
    sp.add_argument("y")
    sp.add_argument("--strategy", choices=("block", "single"), default="block")
    sp = add("specialize", cmd_specialize, "specialize pi to +1 or -1")
    sp.add_argument("--pi", required=True)
    sp.add_argument("x")
    sp = add("decompose", cmd_decompose, "isotypic decomposition of L(s) (x) L(t)")
    sp.add_argument("--tensor", required=True)

    from .verify import SUITES

    sp = add("verify", cmd_verify, "run a verification suite")
    sp.add_argument("suite", choices=list(SUITES) + ["all"])
    for flag, dest in (
        ("--max-rs", "max_rs"),
        ("--samples", "samples"),
        ("--degree", "degree"),
        ("--seed", "seed"),
        ("--max-power", "max_power"),
        ("--max-n", "max_n"),
        ("--modules", "modules"),
        ("--casimir-n", "casimir_n"),
        ("--cutoff", "cutoff"),
        ("--box-b", "B"),
        ("--box-k", "K"),
        ("--pos-b", "pos_B"),
        ("--pos-k", "pos_K"),
        ("--form-b", "form_B"),
        ("--form-k", "form_K"),
        ("--form-f", "form_f"),
    ):
        sp.add_argument(flag, dest=dest, type=int, default=None)
    return p


def _emit(args, text: str, payload: dict, out) -> None:
    if args.format == "json":
        body = {"schema": SCHEMA, "command": args.cmd}
        body.update(payload)
        out.write(json.dumps(body, ensure_ascii=False, sort_keys=False) + "\n")
    else:
        out.write(text + "\n")


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        res = args.func(args)
    except (UsageError, ScalarParseError) as exc:
        err.write(f"parse error: {exc}\n")
        return 2
    except (ZeroDivisorError, ArithmeticError, ValueError, AssertionError) as exc:
        err.write(f"error: {exc}\n")
        return 1
    code = 0
    if len(res) == 3:
        text, payload, code = res
    else:
        text, payload = res
    _emit(args, text, payload, out)
    return code


def main() -> None:
    sys.exit(run())
