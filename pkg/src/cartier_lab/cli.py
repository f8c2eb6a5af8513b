"""Command-line surface: ``<noun> <verb> [flags]`` over every module.

Output goes to stdout, as canonical JSON with ``--json`` and as plain text
otherwise. Errors go to stderr. Exit codes: 0 success, 1 a check or
verification failed, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from pydantic import ValidationError

from . import codec
from .cartier import cartier_apply, cartier_normalize
from .congruence import (
    central_binom_congruence,
    congruence_sweep,
    hypergeom_half,
    legendre_fgl,
    legendre_integrality,
    legendre_log,
    legendre_omega_coeff,
)
from .errors import CartierLabError, InvalidArgument
from .formal_groups import (
    FormalGroupLaw,
    fgl_additive,
    fgl_base_change,
    fgl_from_log,
    fgl_log,
    fgl_multiplicative,
    fgl_validate,
    invariant_differential,
)
from .nilpotent import LambdaElement, lambda_inv, lambda_mul
from .rings import RingSpec, RingValue
from .settings import Settings, load_settings
from .verify import SUITES, verify_all
from .witt import (
    WittVector,
    frobenius,
    from_ghost,
    ghost,
    teichmuller,
    teichmuller_defect,
    verschiebung,
    witt_add,
    witt_mul,
    witt_neg,
)

logger = logging.getLogger(__name__)

LAWS = ("additive", "multiplicative", "legendre")


@dataclass
class Outcome:
    payload: Any
    text: str
    code: int = 0


# -- shared helpers -------------------------------------------------------------------


def _input(args: argparse.Namespace, verb: str) -> Any:
    if not args.input:
        raise InvalidArgument(f"--in is required for `{verb}` (inline JSON or @path)")
    return codec.decode_json(args.input)


def _ring(args: argparse.Namespace, data: Any = None, default: str = "Z") -> RingSpec:
    """--ring beats a payload's "ring" key, which beats the verb's default."""
    if args.ring:
        return RingSpec.parse(args.ring)
    return codec.payload_ring(data, RingSpec.parse(default))


def _trunc(args: argparse.Namespace, settings: Settings, dim: int = 1) -> int:
    if args.trunc is not None:
        return args.trunc
    return settings.trunc_univariate if dim == 1 else settings.trunc_multivariate


def _law(args: argparse.Namespace, settings: Settings) -> FormalGroupLaw:
    if args.law == "legendre":
        return legendre_fgl(_trunc(args, settings))
    if args.law:
        spec = _ring(args, default="Q")
        trunc = _trunc(args, settings, args.dim)
        if args.law == "additive":
            return fgl_additive(spec, args.dim, trunc)
        if args.dim != 1:
            raise InvalidArgument("--law multiplicative is one-dimensional")
        return fgl_multiplicative(spec, trunc)
    data = _input(args, "fgl")
    payload = codec.FglPayload.model_validate(data)
    return payload.build(_ring(args, data, "Q"), _trunc(args, settings, len(payload.components)))


# -- fgl --------------------------------------------------------------------------------


def _fgl_validate(args: argparse.Namespace, settings: Settings) -> Outcome:
    F = _law(args, settings)
    report = fgl_validate(F)
    text = (
        f"unit: {report.unit_ok}  commutative: {report.comm_ok}  associative: {report.assoc_ok}"
        f"  (through degree {report.max_degree_checked})"
    )
    return Outcome(report, text, 0 if report.ok else 1)


def _fgl_log(args: argparse.Namespace, settings: Settings) -> Outcome:
    logs = fgl_log(_law(args, settings))
    return Outcome(codec.encode_log(logs), "\n".join(str(ell) for ell in logs))


def _fgl_from_log(args: argparse.Namespace, settings: Settings) -> Outcome:
    data = _input(args, "fgl from-log")
    payload = codec.LogPayload.model_validate(data)
    spec = _ring(args, data, "Q")
    F = fgl_from_log(payload.build(spec, _trunc(args, settings, len(payload.components))))
    return Outcome(codec.encode_fgl(F), str(F))


def _fgl_invariant_form(args: argparse.Namespace, settings: Settings) -> Outcome:
    omega = invariant_differential(_law(args, settings))
    text = "\n".join(" + ".join(f"({g}) dx{i + 1}" for i, g in enumerate(row)) for row in omega.coeffs)
    return Outcome(codec.encode_form(omega), text)


def _parse_assignments(items: Sequence[str]) -> dict[str, str]:
    assignment = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise InvalidArgument(f"--assign expects name=value, got {item!r}")
        assignment[name.strip()] = value.strip()
    return assignment


def _fgl_base_change(args: argparse.Namespace, settings: Settings) -> Outcome:
    if not args.to:
        raise InvalidArgument("--to is required for `fgl base-change`")
    F = _law(args, settings)
    target = RingSpec.parse(args.to)
    G = fgl_base_change(F, target, _parse_assignments(args.assign))
    return Outcome(codec.encode_fgl(G), str(G))


# -- witt ----------------------------------------------------------------------------------


def _witt_vector(args: argparse.Namespace, verb: str) -> WittVector:
    data = _input(args, verb)
    return codec.WittPayload.model_validate(data).build(_ring(args, data), args.k)


def _witt_pair(args: argparse.Namespace, verb: str) -> tuple[WittVector, WittVector]:
    data = _input(args, verb)
    payload = codec.WittPairPayload.model_validate(data)
    spec = _ring(args, data)
    return payload.x.build(spec, args.k), payload.y.build(spec, args.k)


def _witt_result(a: WittVector) -> Outcome:
    return Outcome(codec.encode_witt(a), f"b = [{', '.join(a.spec.format(c) for c in a.b)}]")


def _witt_add(args: argparse.Namespace, settings: Settings) -> Outcome:
    return _witt_result(witt_add(*_witt_pair(args, "witt add")))


def _witt_mul(args: argparse.Namespace, settings: Settings) -> Outcome:
    return _witt_result(witt_mul(*_witt_pair(args, "witt mul")))


def _witt_neg(args: argparse.Namespace, settings: Settings) -> Outcome:
    return _witt_result(witt_neg(_witt_vector(args, "witt neg")))


def _witt_ghost(args: argparse.Namespace, settings: Settings) -> Outcome:
    a = _witt_vector(args, "witt ghost")
    w = ghost(a)
    return Outcome({"ring": str(a.spec), "values": codec.encode_values(w)}, f"w = [{', '.join(str(v) for v in w)}]")


def _witt_from_ghost(args: argparse.Namespace, settings: Settings) -> Outcome:
    data = _input(args, "witt from-ghost")
    payload = codec.ValuesPayload.model_validate(data)
    spec = _ring(args, data)
    return _witt_result(from_ghost([spec.from_json(v) for v in payload.values], spec, args.k))


def _witt_teich(args: argparse.Namespace, settings: Settings) -> Outcome:
    spec = _ring(args)
    k = args.k or settings.witt_length
    return _witt_result(teichmuller(RingValue(spec, spec.parse_text(args.c)), k))


def _witt_ver(args: argparse.Namespace, settings: Settings) -> Outcome:
    data = _input(args, "witt ver")
    a = codec.WittPayload.model_validate(data).build(_ring(args, data))
    return _witt_result(verschiebung(args.n, a, args.k))


def _witt_frob(args: argparse.Namespace, settings: Settings) -> Outcome:
    return _witt_result(frobenius(args.n, _witt_vector(args, "witt frob")))


# -- cartier -------------------------------------------------------------------------------


def _cartier_normalize(args: argparse.Namespace, settings: Settings) -> Outcome:
    vbound = args.vbound or settings.cartier_vbound
    if args.expr:
        xi = cartier_normalize(args.expr, _ring(args), vbound, args.order)
    else:
        data = _input(args, "cartier normalize")
        payload = codec.CartierPayload.model_validate(data)
        spec = _ring(args, data)
        if payload.expr is not None:
            xi = cartier_normalize(payload.expr, spec, payload.vbound or vbound, args.order)
        else:
            xi = payload.build(spec, vbound)
    return Outcome(codec.encode_cartier(xi), str(xi))


def _cartier_apply(args: argparse.Namespace, settings: Settings) -> Outcome:
    data = _input(args, "cartier apply")
    payload = codec.CartierApplyPayload.model_validate(data)
    spec = _ring(args, data)
    a = payload.vector.build(spec)
    xi = payload.element.build(spec, args.vbound or settings.cartier_vbound)
    return _witt_result(cartier_apply(xi, a, args.k))


def _cartier_defect(args: argparse.Namespace, settings: Settings) -> Outcome:
    spec = _ring(args, default="Z[c1,c2]")
    c1 = RingValue(spec, spec.parse_text(args.c1))
    c2 = RingValue(spec, spec.parse_text(args.c2))
    k = args.k or 4
    coords = teichmuller_defect(c1, c2, k)
    text = "\n".join(f"a_{n} = {a}" for n, a in enumerate(coords, start=1))
    return Outcome({"ring": str(spec), "k": k, "a": codec.encode_values(coords)}, text)


# -- lambda --------------------------------------------------------------------------------


def _lambda_operands(args: argparse.Namespace, verb: str) -> tuple[LambdaElement, Optional[LambdaElement]]:
    data = _input(args, verb)
    payload = codec.LambdaPayload.model_validate(data)
    return payload.build(_ring(args, data))


def _lambda_mul(args: argparse.Namespace, settings: Settings) -> Outcome:
    u, v = _lambda_operands(args, "lambda mul")
    if v is None:
        raise InvalidArgument("`lambda mul` needs operands u and v")
    product = lambda_mul(u, v)
    return Outcome(codec.encode_lambda(product), str(product))


def _lambda_inv(args: argparse.Namespace, settings: Settings) -> Outcome:
    u, _ = _lambda_operands(args, "lambda inv")
    inverse = lambda_inv(u)
    return Outcome(codec.encode_lambda(inverse), str(inverse))


# -- legendre ------------------------------------------------------------------------------


def _legendre_omega(args: argparse.Namespace, settings: Settings) -> Outcome:
    p = legendre_omega_coeff(args.n)
    return Outcome({"n": args.n, "coeffs": p.to_json()}, str(p))


def _legendre_log(args: argparse.Namespace, settings: Settings) -> Outcome:
    ell = legendre_log(_trunc(args, settings))
    return Outcome(codec.encode_series(ell), str(ell))


def _legendre_sweep(args: argparse.Namespace, settings: Settings) -> Outcome:
    max_n = settings.sweep_max_n if args.max_n is None else args.max_n
    workers = args.workers or settings.sweep_workers
    report = congruence_sweep(max_n, workers)
    lines = [
        f"n={check.n:>3} mod {check.modulus:>3}: {'ok' if check.ok else 'FAIL'}"
        for check in report.checks
    ]
    lines.append(f"{len(report.checks)} checks, ok={report.ok} in {report.seconds:.3f}s")
    payload = {
        "max_n": report.max_n,
        "ok": report.ok,
        "checks": [codec.encode_congruence(check) for check in report.checks],
    }
    return Outcome(payload, "\n".join(lines), 0 if report.ok else 1)


def _legendre_hypergeom(args: argparse.Namespace, settings: Settings) -> Outcome:
    F = hypergeom_half(_trunc(args, settings))
    return Outcome(codec.encode_series(F), str(F))


def _legendre_binom(args: argparse.Namespace, settings: Settings) -> Outcome:
    report = central_binom_congruence(args.n)
    text = (
        f"binom({args.n}, {args.n // 2}) = {report.value} mod {report.modulus}"
        f"  +-1: {report.is_pm_one}  prime modulus: {report.modulus_prime}"
    )
    return Outcome(report, text, 0 if report.ok else 1)


def _legendre_integrality(args: argparse.Namespace, settings: Settings) -> Outcome:
    report = legendre_integrality(_trunc(args, settings))
    text = f"odd primes in denominators through degree {report.trunc}: {report.odd_primes or 'none'}"
    return Outcome(report, text)


# -- verify ----------------------------------------------------------------------------------


def _verify(args: argparse.Namespace, settings: Settings) -> Outcome:
    seed = settings.seed if args.seed is None else args.seed
    report = verify_all(
        seed,
        args.suite or None,
        args.cases or settings.verify_cases,
        ghost_cases=args.cases or settings.ghost_cases,
    )
    lines = [
        f"{suite.suite:<9} {suite.cases:>7} cases  {len(suite.failures)} failures  {suite.seconds:.2f}s"
        for suite in report.suites
    ]
    for failure in report.failures:
        lines.append(f"FAIL {failure.relation}: expected {failure.expected}, got {failure.actual} ({failure.inputs})")
    return Outcome(report, "\n".join(lines), 0 if report.ok else 1)


# -- parser ----------------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", help="coefficient ring: Z, Q, Z/<m>, <base>[<vars>]")
    common.add_argument("--trunc", type=int, help="total-degree truncation N")
    common.add_argument("--k", type=int, help="Witt vector length")
    common.add_argument("--in", dest="input", help="input as inline JSON or @path")
    common.add_argument("--json", action="store_true", default=None, help="print canonical JSON")
    common.add_argument("--config", type=Path, help="JSON file overriding the built-in defaults")
    return common


def _leaf(
    group: argparse._SubParsersAction,
    name: str,
    handler: Callable[[argparse.Namespace, Settings], Outcome],
    common: argparse.ArgumentParser,
    summary: str,
) -> argparse.ArgumentParser:
    parser = group.add_parser(name, parents=[common], help=summary)
    parser.set_defaults(handler=handler)
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="cartier-lab",
        description="Exact formal group laws, Witt vectors, the Cartier ring and the Legendre congruences.",
    )
    nouns = parser.add_subparsers(dest="noun", required=True)

    fgl = nouns.add_parser("fgl", help="formal group laws").add_subparsers(dest="verb", required=True)
    for name, handler, summary in (
        ("validate", _fgl_validate, "check unit, commutativity and associativity"),
        ("log", _fgl_log, "logarithm by integrating the invariant differential"),
        ("invariant-form", _fgl_invariant_form, "normalized invariant differential"),
        ("base-change", _fgl_base_change, "map coefficients to another ring"),
    ):
        leaf = _leaf(fgl, name, handler, common, summary)
        leaf.add_argument("--law", choices=LAWS, help="a built-in law instead of --in")
        leaf.add_argument("--dim", type=int, default=1)
        if name == "base-change":
            leaf.add_argument("--to", help="target ring")
            leaf.add_argument("--assign", action="append", default=[], metavar="VAR=VALUE")
    _leaf(fgl, "from-log", _fgl_from_log, common, "law l^-1(l(x) + l(y)) from a logarithm")

    witt = nouns.add_parser("witt", help="big Witt vectors").add_subparsers(dest="verb", required=True)
    for name, handler, summary in (
        ("add", _witt_add, "Witt sum of x and y"),
        ("mul", _witt_mul, "Witt product of x and y"),
        ("neg", _witt_neg, "additive inverse"),
        ("ghost", _witt_ghost, "ghost components"),
        ("from-ghost", _witt_from_ghost, "Witt vector with the given ghost components"),
    ):
        _leaf(witt, name, handler, common, summary)
    _leaf(witt, "teich", _witt_teich, common, "Teichmuller representative [c]").add_argument("--c", required=True)
    _leaf(witt, "ver", _witt_ver, common, "Verschiebung V_n").add_argument("n", type=int)
    _leaf(witt, "frob", _witt_frob, common, "Frobenius F_n").add_argument("n", type=int)

    cartier = nouns.add_parser("cartier", help="the Cartier ring").add_subparsers(dest="verb", required=True)
    normalize = _leaf(cartier, "normalize", _cartier_normalize, common, "canonical form of an expression")
    normalize.add_argument("expr", nargs="?", help='for example "F2 V2" or "[c1] + [c2]"')
    normalize.add_argument("--order", choices=("left", "right"), default="left")
    for leaf in (normalize, _leaf(cartier, "apply", _cartier_apply, common, "act on a Witt vector")):
        leaf.add_argument("--vbound", type=int, help="V-filtration cutoff")
    defect = _leaf(cartier, "defect", _cartier_defect, common, "coordinates of [c1 + c2] - [c1] - [c2]")
    defect.add_argument("--c1", default="c1")
    defect.add_argument("--c2", default="c2")

    lam = nouns.add_parser("lambda", help="Lambda of nilpotent algebras").add_subparsers(dest="verb", required=True)
    _leaf(lam, "mul", _lambda_mul, common, "product of u and v")
    _leaf(lam, "inv", _lambda_inv, common, "inverse of u")

    legendre = nouns.add_parser("legendre", help="the Legendre family").add_subparsers(dest="verb", required=True)
    _leaf(legendre, "omega", _legendre_omega, common, "coefficient of x^n dx").add_argument("--n", type=int, required=True)
    _leaf(legendre, "log", _legendre_log, common, "logarithm over Q[l]")
    sweep = _leaf(legendre, "sweep", _legendre_sweep, common, "4D congruence for every even n <= max-n")
    sweep.add_argument("--max-n", type=int)
    sweep.add_argument("--workers", type=int)
    _leaf(legendre, "hypergeom", _legendre_hypergeom, common, "2F1(1/2, 1/2; 1; l) through l^N")
    _leaf(legendre, "binom", _legendre_binom, common, "binom(n, n/2) mod n+1").add_argument("--n", type=int, required=True)
    _leaf(legendre, "integrality", _legendre_integrality, common, "odd primes in the law's denominators")

    verify = nouns.add_parser("verify", parents=[common], help="run the verification suites")
    verify.add_argument("--suite", action="append", choices=SUITES)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--cases", type=int)
    verify.set_defaults(handler=_verify)
    return parser


def _emit(outcome: Outcome, as_json: bool) -> None:
    if as_json:
        print(codec.dumps(outcome.payload))
    else:
        print(outcome.text)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        settings = load_settings(args.config).with_overrides(json_output=args.json)
        outcome = args.handler(args, settings)
    except (CartierLabError, ValidationError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(outcome, settings.json_output)
    return outcome.code
