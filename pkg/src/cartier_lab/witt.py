"""Truncated big Witt vectors W_[1,k](R) in series coordinates.

A Witt vector is the series 1 + b_1 x + ... + b_k x^k; Witt addition is series
multiplication and [c] = 1 - cx. Multiplication and Frobenius take the ghost
route over rings without Z-torsion and the universal-polynomial route
otherwise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Sequence

from .errors import InvalidArgument, SpecMismatch, TruncationTooShort
from .rings import RingSpec, RingValue, coerce
from .series import (
    TruncatedSeries,
    series_dilate,
    series_inflate,
    series_invert,
    series_mul,
    series_pow,
    series_truncate,
)
from .universal import derive_universal_polynomials, from_ghost_components, ghost_components

logger = logging.getLogger(__name__)

WITT_VAR = "x"


@dataclass(frozen=True)
class WittVector:
    spec: RingSpec
    k: int
    series: TruncatedSeries

    def __post_init__(self) -> None:
        if self.k < 1:
            raise TruncationTooShort(f"Witt vectors need length k >= 1, got {self.k}")
        if self.series.spec != self.spec or self.series.vars != (WITT_VAR,) or self.series.trunc != self.k:
            raise SpecMismatch(f"Witt vector body must be a series over {self.spec} in x to degree {self.k}")
        if self.series.constant_term != self.spec.one:
            raise SpecMismatch("Witt vector series must have constant term 1")

    @classmethod
    def from_coefficients(cls, spec: RingSpec, b: Sequence[Any], k: int | None = None) -> WittVector:
        """1 + b_1 x + ... from the coordinates b_1, b_2, ..."""
        k = len(b) if k is None else k
        coeffs = [1] + [coerce(spec, c) for c in b]
        return cls(spec, k, TruncatedSeries.from_coefficients(spec, k, coeffs, WITT_VAR))

    @classmethod
    def one(cls, spec: RingSpec, k: int) -> WittVector:
        """The additive identity, the series 1."""
        return cls(spec, k, TruncatedSeries.one(spec, (WITT_VAR,), k))

    @property
    def b(self) -> list[Any]:
        return [self.series.coeff(i) for i in range(1, self.k + 1)]

    def b_values(self) -> list[RingValue]:
        return [RingValue(self.spec, c) for c in self.b]

    def __add__(self, other: WittVector) -> WittVector:
        return witt_add(self, other)

    def __neg__(self) -> WittVector:
        return witt_neg(self)

    def __sub__(self, other: WittVector) -> WittVector:
        return witt_add(self, witt_neg(other))

    def __mul__(self, other: WittVector) -> WittVector:
        return witt_mul(self, other)

    def __str__(self) -> str:
        return str(self.series)


def _check_pair(a: WittVector, b: WittVector) -> None:
    if a.spec != b.spec:
        raise SpecMismatch(f"Witt vectors over {a.spec} and {b.spec} cannot be combined")
    if a.k != b.k:
        raise SpecMismatch(f"Witt vectors of lengths {a.k} and {b.k} cannot be combined")


def witt_add(a: WittVector, b: WittVector) -> WittVector:
    _check_pair(a, b)
    return WittVector(a.spec, a.k, series_mul(a.series, b.series))


def witt_neg(a: WittVector) -> WittVector:
    return WittVector(a.spec, a.k, series_invert(a.series))


def witt_scale(a: WittVector, z: int) -> WittVector:
    """The z-fold Witt sum a + ... + a (negative z negates)."""
    return WittVector(a.spec, a.k, series_pow(a.series, z))


def witt_truncate(a: WittVector, k: int) -> WittVector:
    return WittVector(a.spec, k, series_truncate(a.series, k))


def ghost(a: WittVector) -> list[RingValue]:
    return [RingValue(a.spec, w) for w in ghost_components(a.spec, a.b)]


def from_ghost(w: Sequence[Any], spec: RingSpec, k: int | None = None) -> WittVector:
    raw = [coerce(spec, c) for c in w]
    k = len(raw) if k is None else k
    if k != len(raw):
        raise SpecMismatch(f"{len(raw)} ghost components given for length {k}")
    return WittVector.from_coefficients(spec, from_ghost_components(spec, raw), k)


def witt_mul(a: WittVector, b: WittVector) -> WittVector:
    _check_pair(a, b)
    spec, k = a.spec, a.k
    if spec.torsion_free:
        wa = ghost_components(spec, a.b)
        wb = ghost_components(spec, b.b)
        return WittVector.from_coefficients(spec, from_ghost_components(spec, [x * y for x, y in zip(wa, wb)]), k)
    family = derive_universal_polynomials("mul", k)
    values = dict(zip(family.inputs, a.b + b.b))
    return WittVector.from_coefficients(spec, family.evaluate(spec, values), k)


def teichmuller(c: RingValue | Any, k: int, spec: RingSpec | None = None) -> WittVector:
    """[c] = 1 - cx."""
    if isinstance(c, RingValue):
        spec = c.spec if spec is None else spec
    if spec is None:
        raise SpecMismatch("teichmuller needs a RingValue or an explicit ring")
    return WittVector.from_coefficients(spec, [-coerce(spec, c)], k)


def teichmuller_act(c: RingValue | Any, a: WittVector) -> WittVector:
    """The operator [c]: a(x) -> a(cx), which is Witt multiplication by 1 - cx."""
    return WittVector(a.spec, a.k, series_dilate(a.series, coerce(a.spec, c)))


def verschiebung(n: int, a: WittVector, k: int | None = None) -> WittVector:
    """V_n: a(x) -> a(x^n), kept through degree k (default: a's length)."""
    k = a.k if k is None else k
    return WittVector(a.spec, k, series_inflate(a.series, n, k))


def frobenius(n: int, a: WittVector) -> WittVector:
    """F_n: W_[1,k] -> W_[1,k//n] with ghost(F_n a)_m = ghost(a)_{nm}."""
    if n < 1:
        raise InvalidArgument(f"Frobenius index must be >= 1, got {n}")
    if n == 1:
        return a
    k = a.k // n
    if k == 0:
        raise TruncationTooShort(f"F_{n} of a length-{a.k} vector has length 0")
    spec = a.spec
    if spec.torsion_free:
        w = ghost_components(spec, a.b[: n * k])
        return WittVector.from_coefficients(spec, from_ghost_components(spec, [w[n * m - 1] for m in range(1, k + 1)]), k)
    family = derive_universal_polynomials("frobenius", k, n)
    values = dict(zip(family.inputs, a.b[: n * k]))
    return WittVector.from_coefficients(spec, family.evaluate(spec, values), k)


def witt_coordinates(a: WittVector) -> list[Any]:
    """The a_t with 1 + sum b_i x^i = prod_t (1 - a_t x^t), t = 1..k."""
    coords: list[Any] = []
    current = a.series
    for t in range(1, a.k + 1):
        a_t = -current.coeff(t)
        coords.append(a_t)
        if a_t:
            factor = TruncatedSeries.from_terms(a.spec, (WITT_VAR,), a.k, {(0,): 1, (t,): -a_t})
            current = series_mul(current, series_invert(factor))
    return coords


def witt_from_coordinates(coords: Sequence[Any], spec: RingSpec, k: int | None = None) -> WittVector:
    k = len(coords) if k is None else k
    result = TruncatedSeries.one(spec, (WITT_VAR,), k)
    for t, a_t in enumerate(coords, start=1):
        raw = coerce(spec, a_t)
        if raw and t <= k:
            result = series_mul(result, TruncatedSeries.from_terms(spec, (WITT_VAR,), k, {(0,): 1, (t,): -raw}))
    return WittVector(spec, k, result)


def teichmuller_defect(c1: RingValue, c2: RingValue, k: int) -> list[RingValue]:
    """Coordinates a_1..a_k of [c1 + c2] - [c1] - [c2].

    a_1 is always 0; a_2 = c1 c2 and a_3 = c1 c2 (c1 + c2).
    """
    if c1.spec != c2.spec:
        raise SpecMismatch(f"Defect of values from {c1.spec} and {c2.spec}")
    spec = c1.spec
    defect = teichmuller(c1 + c2, k) - (teichmuller(c1, k) + teichmuller(c2, k))
    return [RingValue(spec, a) for a in witt_coordinates(defect)]
