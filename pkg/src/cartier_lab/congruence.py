"""The Legendre family: its Picard-Fuchs operator, invariant form and congruences.

The invariant form of the Legendre curve's formal group is
sum_{n even} binom(n, n/2) A_{n/2}(l) x^n dx with A_m(l) = sum_k binom(m, k)^2 l^k,
and it is annihilated modulo n + 1 by
D = l(1 - l) (d/dl)^2 + (1 - 2l) d/dl - 1/4.
Checks run on 4D so that everything stays in Z[l].
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

from pydantic import BaseModel, Field, computed_field, field_serializer
from sympy import isprime, primefactors
from sympy.polys.domains import QQ

from .errors import IntegralityFailure, InvalidArgument, OddIndex, SpecMismatch
from .formal_groups import (
    FormalGroupLaw,
    InvariantForm,
    check_invariance,
    fgl_from_log,
    form_from_coefficients,
)
from .rings import RingSpec, RingValue, coerce, divides_all_coeffs, poly_derivative, polynomial, ring_hom
from .series import TruncatedSeries

logger = logging.getLogger(__name__)

LAMBDA = "l"
Q_LAMBDA = RingSpec.polynomial(RingSpec.rationals(), LAMBDA)
Z_LAMBDA = RingSpec.polynomial(RingSpec.integers(), LAMBDA)


@dataclass(frozen=True)
class DiffOperator:
    """sum_j coeffs[j] (d/dl)^j with coefficients in Q[l]."""

    coeffs: tuple[RingValue, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise InvalidArgument("A differential operator needs at least one coefficient")
        for c in self.coeffs:
            if c.spec != Q_LAMBDA:
                raise SpecMismatch(f"Operator coefficients must lie in {Q_LAMBDA}, got {c.spec}")
        if self.coeffs[-1].is_zero():
            raise InvalidArgument("Leading coefficient of a differential operator must be nonzero")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def scaled(self, c: Any) -> DiffOperator:
        factor = RingValue(Q_LAMBDA, coerce(Q_LAMBDA, c))
        return DiffOperator(tuple(a * factor for a in self.coeffs))

    def __call__(self, p: RingValue) -> RingValue:
        return apply_operator(self, p)

    def __str__(self) -> str:
        return " + ".join(f"({c})*d^{j}" for j, c in enumerate(self.coeffs) if not c.is_zero())


def legendre_operator() -> DiffOperator:
    return DiffOperator(
        (
            polynomial(Q_LAMBDA, ["-1/4"]),
            polynomial(Q_LAMBDA, [1, -2]),
            polynomial(Q_LAMBDA, [0, 1, -1]),
        )
    )


def _to_rational(p: RingValue) -> RingValue:
    if p.spec == Q_LAMBDA:
        return p
    if p.spec != Z_LAMBDA:
        raise SpecMismatch(f"Operators act on {Q_LAMBDA} or {Z_LAMBDA}, got {p.spec}")
    return RingValue(Q_LAMBDA, ring_hom(Z_LAMBDA, Q_LAMBDA)(p.raw))


def _to_integral(p: RingValue) -> RingValue:
    terms = {}
    for mon, c in p.raw.items():
        if QQ.denom(c) != 1:
            raise IntegralityFailure(f"{p} has a non-integral coefficient")
        terms[mon] = int(QQ.numer(c))
    return RingValue(Z_LAMBDA, Z_LAMBDA.domain.ring.from_dict(terms))


def apply_operator(D: DiffOperator, p: RingValue) -> RingValue:
    p = _to_rational(p)
    total = RingValue(Q_LAMBDA, Q_LAMBDA.zero)
    derivative = p
    for j, c in enumerate(D.coeffs):
        if j:
            derivative = poly_derivative(derivative, LAMBDA)
        total = total + c * derivative
    return total


def _require_even(n: int, least: int = 0) -> None:
    if n < least or n % 2:
        raise OddIndex(f"Legendre index must be even and >= {least}, got {n}")


def legendre_omega_coeff(n: int) -> RingValue:
    """binom(n, n/2) A_{n/2}(l) in Z[l]."""
    _require_even(n)
    m = n // 2
    central = math.comb(n, m)
    return polynomial(Z_LAMBDA, [central * math.comb(m, k) ** 2 for k in range(m + 1)])


def legendre_log(trunc: int) -> TruncatedSeries:
    """The logarithm sum binom(n, n/2) A_{n/2}(l) x^{n+1}/(n+1) over Q[l]."""
    if trunc < 1:
        raise InvalidArgument(f"Legendre logarithm needs trunc >= 1, got {trunc}")
    terms = {}
    for n in range(0, trunc, 2):
        coeff = _to_rational(legendre_omega_coeff(n))
        terms[(n + 1,)] = Q_LAMBDA.divide_by_int(coeff.raw, n + 1)
    return TruncatedSeries.from_terms(Q_LAMBDA, ("x",), trunc, terms)


def legendre_form(trunc: int) -> InvariantForm:
    """The invariant form paired with ``legendre_fgl(trunc)``; known through degree trunc - 1."""
    if trunc < 1:
        raise InvalidArgument(f"Legendre form needs trunc >= 1, got {trunc}")
    coeffs = [
        _to_rational(legendre_omega_coeff(i)).raw if i % 2 == 0 else Q_LAMBDA.zero
        for i in range(trunc)
    ]
    return form_from_coefficients(Q_LAMBDA, trunc - 1, coeffs)


def legendre_fgl(trunc: int) -> FormalGroupLaw:
    return fgl_from_log([legendre_log(trunc)])


def legendre_invariance(trunc: int) -> bool:
    """Whether the Legendre form is invariant for the law built from its own logarithm."""
    return check_invariance(legendre_fgl(trunc), legendre_form(trunc))


# -- congruences --------------------------------------------------------------------


class CongruenceReport(BaseModel):
    n: int
    modulus: int
    polynomial: list[int] = Field(exclude=True)
    reduced: list[int]
    ok: bool

    @field_serializer("reduced")
    def _residues(self, reduced: list[int]) -> list[str]:
        return [str(r) for r in reduced]


def congruence_check(n: int) -> CongruenceReport:
    """4 D(binom(n, n/2) A_{n/2}) computed in Z[l] and tested for divisibility by n + 1."""
    _require_even(n, least=2)
    modulus = n + 1
    result = _to_integral(legendre_operator().scaled(4)(legendre_omega_coeff(n)))
    values = [int(result.raw.get((i,), 0)) for i in range(n // 2 + 1)]
    report = CongruenceReport(
        n=n,
        modulus=modulus,
        polynomial=values,
        reduced=[v % modulus for v in values],
        ok=divides_all_coeffs(result, modulus),
    )
    logger.debug("Congruence n=%s mod %s: ok=%s", n, modulus, report.ok)
    return report


class CentralBinomialReport(BaseModel):
    n: int
    modulus: int
    value: int
    is_pm_one: bool
    modulus_prime: bool

    @field_serializer("value")
    def _residue(self, value: int) -> str:
        return str(value)

    @computed_field
    @property
    def ok(self) -> bool:
        """The +-1 claim is only enforced for prime moduli."""
        return self.is_pm_one or not self.modulus_prime


def central_binom_congruence(n: int) -> CentralBinomialReport:
    _require_even(n)
    modulus = n + 1
    value = math.comb(n, n // 2) % modulus
    report = CentralBinomialReport(
        n=n,
        modulus=modulus,
        value=value,
        is_pm_one=value in (1 % modulus, -1 % modulus),
        modulus_prime=isprime(modulus),
    )
    if not report.modulus_prime and not report.is_pm_one:
        logger.warning(
            "binom(%s, %s) = %s mod %s is not +-1; composite modulus, reported only",
            n,
            n // 2,
            value,
            modulus,
        )
    return report


def hypergeom_half(trunc: int) -> TruncatedSeries:
    """2F1(1/2, 1/2; 1; l) = sum binom(2m, m)^2 (l/16)^m through l^trunc."""
    if trunc < 0:
        raise InvalidArgument(f"Truncation must be >= 0, got {trunc}")
    coeffs = [QQ(math.comb(2 * m, m) ** 2, 16**m) for m in range(trunc + 1)]
    return TruncatedSeries.from_coefficients(RingSpec.rationals(), trunc, coeffs, LAMBDA)


def annihilation_residual(trunc: int) -> RingValue:
    """D applied to the degree-``trunc`` truncation of 2F1(1/2, 1/2; 1; l)."""
    F = hypergeom_half(trunc)
    p = polynomial(Q_LAMBDA, F.coefficients())
    return apply_operator(legendre_operator(), p)


def residual_order(p: RingValue) -> int | None:
    """Lowest degree with a nonzero coefficient; None for the zero polynomial."""
    return min((mon[0] for mon in p.raw.keys()), default=None)


class SweepReport(BaseModel):
    max_n: int
    checks: list[CongruenceReport]
    seconds: float = Field(default=0.0, exclude=True)

    @computed_field
    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    @computed_field
    @property
    def failures(self) -> list[int]:
        return [check.n for check in self.checks if not check.ok]


def congruence_sweep(max_n: int, workers: int = 1) -> SweepReport:
    """congruence_check for every even 2 <= n <= max_n."""
    if max_n < 0:
        raise InvalidArgument(f"max_n must be >= 0, got {max_n}")
    started = time.perf_counter()
    indices = list(range(2, max_n + 1, 2))
    if workers > 1 and len(indices) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            checks = list(pool.map(congruence_check, indices))
    else:
        checks = [congruence_check(n) for n in indices]
    checks.sort(key=lambda check: check.n)
    report = SweepReport(max_n=max_n, checks=checks, seconds=time.perf_counter() - started)
    logger.info("Legendre sweep to n=%s: %s checks, ok=%s in %.3fs", max_n, len(checks), report.ok, report.seconds)
    return report


# -- integrality ---------------------------------------------------------------------


class IntegralityReport(BaseModel):
    """Odd primes in the denominators of the Legendre law; an observation, never a requirement."""

    trunc: int
    terms_checked: int
    odd_primes: list[int]
    offending: list[list[int]]

    @computed_field
    @property
    def integral_away_from_two(self) -> bool:
        return not self.odd_primes


def _denominators(raw: Any) -> list[int]:
    return [int(QQ.denom(c)) for c in raw.values()]


def legendre_integrality(trunc: int) -> IntegralityReport:
    F = legendre_fgl(trunc)
    primes: set[int] = set()
    offending: list[list[int]] = []
    terms = F.components[0].terms()
    for mon, c in terms:
        bad = {p for den in _denominators(c.raw) for p in primefactors(den) if p != 2}
        if bad:
            primes |= bad
            offending.append(list(mon))
    if primes:
        logger.info("Legendre law to degree %s has odd primes %s in denominators", trunc, sorted(primes))
    return IntegralityReport(
        trunc=trunc,
        terms_checked=len(terms),
        odd_primes=sorted(primes),
        offending=offending,
    )

