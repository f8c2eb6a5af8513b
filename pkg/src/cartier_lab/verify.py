"""Seeded property suites over every module.

Each suite returns a ``SuiteResult``; failed checks are recorded with the
relation name, inputs, and the expected and actual values. Nothing here
raises on a failed check.
"""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional

from pydantic import BaseModel, Field, computed_field

from .cartier import (
    CartierElement,
    cartier_apply,
    cartier_frobenius,
    cartier_integer,
    cartier_normalize,
    cartier_teichmuller,
    cartier_verschiebung,
)
from .congruence import (
    annihilation_residual,
    central_binom_congruence,
    congruence_sweep,
    legendre_fgl,
    legendre_invariance,
    legendre_log,
    residual_order,
)
from .errors import InvalidArgument
from .formal_groups import (
    check_invariance,
    fgl_additive,
    fgl_from_log,
    fgl_log,
    fgl_multiplicative,
    fgl_validate,
    form_from_coefficients,
)
from .nilpotent import lambda_exactness, standard_extension
from .rings import RingSpec, RingValue
from .series import (
    TruncatedSeries,
    series_compose,
    series_derivative,
    series_exp,
    series_invert,
    series_log1p,
    series_reversion,
)
from .settings import load_settings
from .universal import derive_universal_polynomials
from .witt import (
    WittVector,
    frobenius,
    ghost,
    teichmuller_defect,
    witt_add,
    witt_mul,
    witt_truncate,
)

logger = logging.getLogger(__name__)

SUITES = ("rings", "series", "fgl", "witt", "cartier", "lambda", "legendre")
RELATION_RANGE = range(1, 7)
RELATION_LENGTH = 12


@dataclass(frozen=True)
class WittOperators:
    """The operations exercised by the Witt and Cartier suites; swap one out to inject a fault.

    ``apply`` is the Cartier action: every V_n, F_m and [c] relation is checked
    through it.
    """

    add: Callable[[WittVector, WittVector], WittVector] = witt_add
    mul: Callable[[WittVector, WittVector], WittVector] = witt_mul
    apply: Callable[..., WittVector] = cartier_apply


class CaseFailure(BaseModel):
    relation: str
    inputs: dict[str, Any]
    expected: str
    actual: str


class SuiteResult(BaseModel):
    suite: str
    cases: int = 0
    failures: list[CaseFailure] = Field(default_factory=list)
    seconds: float = Field(default=0.0, exclude=True)

    @computed_field
    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, relation: str, expected: Any, actual: Any, **inputs: Any) -> bool:
        self.cases += 1
        if expected == actual:
            return True
        self.failures.append(
            CaseFailure(
                relation=relation,
                inputs={key: str(value) for key, value in inputs.items()},
                expected=str(expected),
                actual=str(actual),
            )
        )
        return False

    def holds(self, relation: str, condition: bool, **inputs: Any) -> bool:
        return self.check(relation, True, bool(condition), **inputs)


class VerificationReport(BaseModel):
    seed: int
    suites: list[SuiteResult]
    seconds: float = Field(default=0.0, exclude=True)

    @computed_field
    @property
    def cases(self) -> int:
        return sum(s.cases for s in self.suites)

    @computed_field
    @property
    def failures(self) -> list[CaseFailure]:
        return [f for s in self.suites for f in s.failures]

    @computed_field
    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.suites)


@dataclass
class _Context:
    rng: random.Random
    cases: int
    ghost_cases: int
    ops: WittOperators = field(default_factory=WittOperators)


def _random_witt(rng: random.Random, spec: RingSpec, k: int) -> WittVector:
    return WittVector.from_coefficients(spec, [spec.random(rng) for _ in range(k)], k)


# -- rings ---------------------------------------------------------------------------------


def _rings_suite(ctx: _Context) -> SuiteResult:
    result = SuiteResult(suite="rings")
    specs = [RingSpec.parse(text) for text in ("Z", "Q", "Z/360", "Z[l]", "Z/9[l]")]
    for spec in specs:
        for _ in range(ctx.cases):
            a, b, c = (RingValue(spec, spec.random(ctx.rng)) for _ in range(3))
            result.check("associativity", (a * b) * c, a * (b * c), ring=spec, a=a, b=b, c=c)
            result.check("distributivity", a * (b + c), a * b + a * c, ring=spec, a=a, b=b, c=c)
            result.check("commutativity", a * b, b * a, ring=spec, a=a, b=b)
            if a.is_unit():
                result.check("inverse", RingValue(spec, spec.one), a * a.inverse(), ring=spec, a=a)
    return result


# -- series --------------------------------------------------------------------------------


def _random_series(rng: random.Random, spec: RingSpec, trunc: int, *leading: int) -> TruncatedSeries:
    """Random coefficients after the fixed leading ones."""
    coeffs = [spec.from_int(c) for c in leading] + [spec.random(rng, 5) for _ in range(trunc + 1 - len(leading))]
    return TruncatedSeries.from_coefficients(spec, trunc, coeffs)


def _series_suite(ctx: _Context) -> SuiteResult:
    result = SuiteResult(suite="series")
    trunc = 8
    integers, rationals = RingSpec.integers(), RingSpec.rationals()
    one = TruncatedSeries.one(integers, ("x",), trunc)
    for _ in range(ctx.cases):
        f, g, h = (_random_series(ctx.rng, integers, trunc) for _ in range(3))
        result.check("mul associativity", (f * g) * h, f * (g * h), f=f, g=g, h=h)
        result.check(
            "product rule",
            series_derivative(f * g),
            series_derivative(f) * g.truncated(trunc - 1) + f.truncated(trunc - 1) * series_derivative(g),
            f=f,
            g=g,
        )
        u = _random_series(ctx.rng, integers, trunc, 1)
        result.check("invert", one, u * series_invert(u), u=u)
        s = _random_series(ctx.rng, integers, trunc, 0, 1)
        x = TruncatedSeries.variable(integers, ("x",), trunc, "x")
        inverse = series_reversion(s)
        result.check("reversion", x, series_compose(s, [inverse]), f=s)
        result.check("reversion left", x, series_compose(inverse, [s]), f=s)
        q = _random_series(ctx.rng, rationals, trunc, 0)
        result.check("exp log1p", q, series_log1p(series_exp(q) - 1), u=q)
    return result


# -- formal groups -------------------------------------------------------------------------


def _fgl_suite(ctx: _Context) -> SuiteResult:
    settings = load_settings()
    trunc = settings.trunc_univariate
    result = SuiteResult(suite="fgl")
    rationals = RingSpec.rationals()
    laws = {
        "additive": fgl_additive(rationals, 1, trunc),
        "multiplicative": fgl_multiplicative(rationals, trunc),
        "additive-2d": fgl_additive(rationals, 2, settings.trunc_multivariate),
        "legendre": legendre_fgl(trunc),
    }
    for name, F in laws.items():
        result.holds("axioms", fgl_validate(F).ok, law=name, trunc=F.trunc)
        result.check("from_log(log)", F.components, fgl_from_log(fgl_log(F)).components, law=name)

    log = TruncatedSeries.from_coefficients(rationals, trunc, [0] + [f"1/{k}" for k in range(1, trunc + 1)])
    result.check("log dictionary", [log], fgl_log(laws["multiplicative"]), law="multiplicative")
    result.check("log of legendre law", [legendre_log(trunc)], fgl_log(laws["legendre"]), law="legendre")
    form = form_from_coefficients(rationals, trunc - 1, [1] * trunc)
    result.holds("invariance", check_invariance(laws["multiplicative"], form), law="multiplicative")
    result.holds("invariance", legendre_invariance(min(trunc, 10)), law="legendre")
    return result


# -- Witt vectors --------------------------------------------------------------------------


def _witt_suite(ctx: _Context) -> SuiteResult:
    result = SuiteResult(suite="witt")
    integers = RingSpec.integers()
    k = load_settings().witt_length
    for _ in range(ctx.ghost_cases):
        a, b = _random_witt(ctx.rng, integers, k), _random_witt(ctx.rng, integers, k)
        ga, gb = ghost(a), ghost(b)
        result.check("ghost(a+b)", [x + y for x, y in zip(ga, gb)], ghost(ctx.ops.add(a, b)), a=a, b=b)
        result.check("ghost(a*b)", [x * y for x, y in zip(ga, gb)], ghost(ctx.ops.mul(a, b)), a=a, b=b)

    family = derive_universal_polynomials("mul", k)
    for _ in range(ctx.cases):
        a, b = _random_witt(ctx.rng, integers, k), _random_witt(ctx.rng, integers, k)
        values = dict(zip(family.inputs, a.b + b.b))
        via_polys = [RingValue(integers, c) for c in family.evaluate(integers, values)]
        result.check("universal mul", witt_mul(a, b).b_values(), via_polys, a=a, b=b)
    for n in range(2, 5):
        for length in range(1, k // n + 1):
            family = derive_universal_polynomials("frobenius", length, n)
            for _ in range(ctx.cases):
                a = _random_witt(ctx.rng, integers, n * length)
                values = dict(zip(family.inputs, a.b))
                via_polys = [RingValue(integers, c) for c in family.evaluate(integers, values)]
                result.check(
                    "universal frobenius", frobenius(n, a).b_values(), via_polys, n=n, length=length, a=a
                )

    generic = RingSpec.parse("Z[c1,c2]")
    c1, c2 = (RingValue(generic, generic.parse_text(v)) for v in ("c1", "c2"))
    defect = teichmuller_defect(c1, c2, 4)
    result.check("defect a_1", RingValue(generic, generic.zero), defect[0])
    result.check("defect a_2", c1 * c2, defect[1])
    result.check("defect a_3", c1 * c2 * (c1 + c2), defect[2])
    return result


# -- Cartier relations ---------------------------------------------------------------------


def _cartier_relations(ctx: _Context, result: SuiteResult, spec: RingSpec) -> None:
    """V_n, F_m and [c] relations, each side evaluated by acting with a Cartier element."""
    apply = ctx.ops.apply
    k = RELATION_LENGTH
    vbound = k + 1
    top = max(RELATION_RANGE)
    V = {n: cartier_verschiebung(n, spec, vbound) for n in range(1, top * top + 1)}
    F = {m: cartier_frobenius(m, spec, vbound) for m in range(1, k + 1)}
    integer = {n: cartier_integer(n, spec, vbound) for n in RELATION_RANGE}

    def T(c: RingValue) -> CartierElement:
        return cartier_teichmuller(c, spec, vbound)

    for _ in range(ctx.cases):
        a = _random_witt(ctx.rng, spec, k)
        c = RingValue(spec, spec.random(ctx.rng))
        d = RingValue(spec, spec.random(ctx.rng))
        result.check("F_1", a, apply(F[1], a), ring=spec, a=a)
        result.check("V_1", a, apply(V[1], a), ring=spec, a=a)
        result.check("[c][d]", apply(T(c * d), a), apply(T(c), apply(T(d), a)), ring=spec, c=c, d=d, a=a)
        for n in RELATION_RANGE:
            short = k // n
            result.check(
                "F_nV_n",
                witt_truncate(apply(integer[n], a), short),
                apply(F[n], apply(V[n], a)),
                ring=spec,
                n=n,
                a=a,
            )
            result.check(
                "[c]V_n",
                apply(V[n], apply(T(c**n), a)),
                apply(T(c), apply(V[n], a)),
                ring=spec,
                n=n,
                c=c,
                a=a,
            )
            result.check(
                "F_n[c]",
                apply(T(c**n), apply(F[n], a)),
                apply(F[n], apply(T(c), a)),
                ring=spec,
                n=n,
                c=c,
                a=a,
            )
            for m in RELATION_RANGE:
                result.check(
                    "V_mV_n",
                    apply(V[n * m], a),
                    apply(V[m], apply(V[n], a)),
                    ring=spec,
                    n=n,
                    m=m,
                    a=a,
                )
                if n * m <= k:
                    result.check(
                        "F_nF_m",
                        apply(F[n * m], a),
                        apply(F[n], apply(F[m], a)),
                        ring=spec,
                        n=n,
                        m=m,
                        a=a,
                    )
                if math.gcd(n, m) == 1:
                    result.check(
                        "F_nV_m",
                        apply(V[m], apply(F[n], a), short),
                        apply(F[n], apply(V[m], a)),
                        ring=spec,
                        n=n,
                        m=m,
                        a=a,
                    )


def _cartier_suite(ctx: _Context) -> SuiteResult:
    result = SuiteResult(suite="cartier")
    for spec in (RingSpec.integers(), RingSpec.integers_mod(360)):
        _cartier_relations(ctx, result, spec)
        vbound = load_settings().cartier_vbound
        for n in RELATION_RANGE:
            result.check(
                "normalize F_nV_n",
                cartier_integer(n, spec, vbound),
                cartier_normalize(f"F{n} V{n}", spec, vbound),
                ring=spec,
                n=n,
            )
    return result


# -- Lambda ------------------------------------------------------------------------------


def _lambda_suite(ctx: _Context) -> SuiteResult:
    result = SuiteResult(suite="lambda")
    for modulus in (2, 3):
        spec = RingSpec.integers_mod(modulus)
        for rank in (2, 3):
            inclusion, projection = standard_extension(spec, rank)
            report = lambda_exactness(inclusion, projection)
            result.holds("exactness", report.ok, ring=spec, rank=rank)
    return result


# -- Legendre ------------------------------------------------------------------------------


def _legendre_suite(ctx: _Context) -> SuiteResult:
    settings = load_settings()
    result = SuiteResult(suite="legendre")
    sweep = congruence_sweep(settings.sweep_max_n, settings.sweep_workers)
    for check in sweep.checks:
        result.holds("4D(omega_n) = 0 mod n+1", check.ok, n=check.n, reduced=check.reduced)
    for n in range(0, settings.sweep_max_n + 1, 2):
        report = central_binom_congruence(n)
        result.holds("binom(n, n/2) = +-1 mod n+1", report.ok, n=n, value=report.value)
    residual = annihilation_residual(18)
    order = residual_order(residual)
    result.holds("D(2F1) vanishes through degree 17", order is None or order >= 18, residual=residual)
    return result


_RUNNERS: dict[str, Callable[[_Context], SuiteResult]] = {
    "rings": _rings_suite,
    "series": _series_suite,
    "fgl": _fgl_suite,
    "witt": _witt_suite,
    "cartier": _cartier_suite,
    "lambda": _lambda_suite,
    "legendre": _legendre_suite,
}


def verify_all(
    seed: int = 0,
    suites: Optional[Iterable[str]] = None,
    cases: Optional[int] = None,
    ops: Optional[WittOperators] = None,
    ghost_cases: Optional[int] = None,
) -> VerificationReport:
    """Run the named suites (default: all) with one generator seeded by ``seed``.

    ``cases`` also stands in for ``ghost_cases`` when only it is given.
    """
    names = list(SUITES if suites is None else suites)
    unknown = [name for name in names if name not in _RUNNERS]
    if unknown:
        raise InvalidArgument(f"Unknown verification suites {unknown}; expected some of {SUITES}")
    settings = load_settings()
    if ghost_cases is None:
        ghost_cases = settings.ghost_cases if cases is None else cases
    cases = settings.verify_cases if cases is None else cases
    started = time.perf_counter()
    results = []
    for name in names:
        ctx = _Context(random.Random(f"{seed}:{name}"), cases, ghost_cases, ops or WittOperators())
        suite_started = time.perf_counter()
        result = _RUNNERS[name](ctx)
        result.seconds = time.perf_counter() - suite_started
        logger.debug("Suite %s: %s cases, %s failures in %.3fs", name, result.cases, len(result.failures), result.seconds)
        results.append(result)
    return VerificationReport(seed=seed, suites=results, seconds=time.perf_counter() - started)
