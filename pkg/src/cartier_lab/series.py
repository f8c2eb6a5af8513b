"""Truncated multivariate power series over an exact ring.

Terms live in a sparse ``sympy.polys.rings.PolyElement`` over the ring's
domain; truncation is by total degree. Products follow the ``rs_mul`` loop:
walk the second factor in degree order and stop as soon as the degree bound
is passed.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

import sympy
from sympy.polys.monomials import monomial_mul
from sympy.polys.orderings import grlex
from sympy.polys.polyerrors import CoercionFailed
from sympy.polys.rings import PolyElement, PolyRing

from .errors import (
    ArityMismatch,
    InvalidArgument,
    NonUnitConstantTerm,
    NonzeroConstantTerm,
    NotAUnit,
    NotReversible,
    RingSpecError,
    SpecMismatch,
    TruncationTooShort,
)
from .rings import RingSpec, RingValue, coerce

Monomial = tuple[int, ...]


@lru_cache(maxsize=None)
def series_ring(spec: RingSpec, variables: tuple[str, ...]) -> PolyRing:
    if not variables:
        raise SpecMismatch("A series needs at least one variable")
    if len(set(variables)) != len(variables):
        raise SpecMismatch(f"Repeated series variable in {variables}")
    clash = set(variables) & set(spec.all_variables)
    if clash:
        raise SpecMismatch(f"Series variables {sorted(clash)} clash with the variables of {spec}")
    return PolyRing(variables, spec.domain, grlex)


def _truncate_poly(poly: PolyElement, trunc: int) -> PolyElement:
    if all(sum(mon) <= trunc for mon in poly.keys()):
        return poly
    return poly.ring.from_dict({mon: c for mon, c in poly.items() if sum(mon) <= trunc})


def _mul_poly(p1: PolyElement, p2: PolyElement, trunc: int) -> PolyElement:
    ring = p1.ring
    if not p1 or not p2:
        return ring.zero
    zero = ring.domain.zero
    items2 = sorted(((sum(mon), mon, c) for mon, c in p2.items()), key=lambda item: item[0])
    acc: dict[Monomial, Any] = {}
    get = acc.get
    for exp1, v1 in p1.items():
        room = trunc - sum(exp1)
        for deg2, exp2, v2 in items2:
            if deg2 > room:
                break
            exp = monomial_mul(exp1, exp2)
            acc[exp] = get(exp, zero) + v1 * v2
    return ring.from_dict(acc)


def _order(poly: PolyElement, trunc: int) -> int:
    """Lowest total degree present, or trunc + 1 for the zero series."""
    return min((sum(mon) for mon in poly.keys()), default=trunc + 1)


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    spec: RingSpec
    vars: tuple[str, ...]
    trunc: int
    poly: PolyElement

    def __post_init__(self) -> None:
        if self.trunc < 0:
            raise TruncationTooShort(f"Truncation must be >= 0, got {self.trunc}")
        if self.poly.ring != series_ring(self.spec, self.vars):
            raise SpecMismatch(f"Series body does not live in {self.spec}[[{','.join(self.vars)}]]")
        if any(sum(mon) > self.trunc for mon in self.poly.keys()):
            raise SpecMismatch(f"Series holds terms above its truncation {self.trunc}")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_poly(cls, spec: RingSpec, vars: Sequence[str], trunc: int, poly: PolyElement) -> TruncatedSeries:
        return cls(spec, tuple(vars), trunc, _truncate_poly(poly, trunc))

    @classmethod
    def from_terms(
        cls,
        spec: RingSpec,
        vars: Sequence[str],
        trunc: int,
        terms: Mapping[Monomial, Any],
    ) -> TruncatedSeries:
        vars = tuple(vars)
        ring = series_ring(spec, vars)
        data = {}
        for mon, c in terms.items():
            mon = tuple(int(e) for e in mon)
            if len(mon) != len(vars) or min(mon, default=0) < 0:
                raise SpecMismatch(f"Exponent {mon} does not fit variables {vars}")
            if sum(mon) <= trunc:
                data[mon] = coerce(spec, c)
        return cls(spec, vars, trunc, ring.from_dict(data))

    @classmethod
    def from_coefficients(
        cls, spec: RingSpec, trunc: int, coeffs: Sequence[Any], var: str = "x"
    ) -> TruncatedSeries:
        """Univariate series from coefficients, constant term first."""
        return cls.from_terms(spec, (var,), trunc, {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def parse(cls, spec: RingSpec, vars: Sequence[str], trunc: int, text: str) -> TruncatedSeries:
        vars = tuple(vars)
        ring = series_ring(spec, vars)
        try:
            poly = ring.from_expr(sympy.sympify(text))
        except (sympy.SympifyError, ValueError, TypeError, CoercionFailed) as exc:
            raise RingSpecError(f"Cannot read {text!r} as a series over {spec} in {vars}") from exc
        return cls.from_poly(spec, vars, trunc, poly)

    @classmethod
    def zero(cls, spec: RingSpec, vars: Sequence[str], trunc: int) -> TruncatedSeries:
        return cls(spec, tuple(vars), trunc, series_ring(spec, tuple(vars)).zero)

    @classmethod
    def one(cls, spec: RingSpec, vars: Sequence[str], trunc: int) -> TruncatedSeries:
        return cls.constant(spec, vars, trunc, 1)

    @classmethod
    def constant(cls, spec: RingSpec, vars: Sequence[str], trunc: int, c: Any) -> TruncatedSeries:
        ring = series_ring(spec, tuple(vars))
        return cls(spec, tuple(vars), trunc, ring.ground_new(coerce(spec, c)))

    @classmethod
    def variable(cls, spec: RingSpec, vars: Sequence[str], trunc: int, name: str) -> TruncatedSeries:
        vars = tuple(vars)
        if name not in vars:
            raise SpecMismatch(f"{name!r} is not one of {vars}")
        mon = tuple(int(v == name) for v in vars)
        return cls.from_terms(spec, vars, trunc, {mon: 1})

    # -- inspection ---------------------------------------------------------

    @property
    def ring(self) -> PolyRing:
        return self.poly.ring

    @property
    def nvars(self) -> int:
        return len(self.vars)

    @property
    def order(self) -> int:
        return _order(self.poly, self.trunc)

    @property
    def degree(self) -> int:
        return max((sum(mon) for mon in self.poly.keys()), default=-1)

    def is_zero(self) -> bool:
        return not self.poly

    def coeff(self, mon: Monomial | int) -> Any:
        if isinstance(mon, int):
            mon = (mon,)
        return self.poly.get(tuple(mon), self.spec.zero)

    def coeff_value(self, mon: Monomial | int) -> RingValue:
        return RingValue(self.spec, self.coeff(mon))

    @property
    def constant_term(self) -> Any:
        return self.coeff(self.ring.zero_monom)

    def coefficients(self) -> list[Any]:
        """Dense coefficient list 0..trunc of a univariate series."""
        _require_univariate(self, "coefficients")
        return [self.coeff(i) for i in range(self.trunc + 1)]

    def terms(self) -> list[tuple[Monomial, RingValue]]:
        """Nonzero terms in graded-lexicographic order."""
        ordered = sorted(self.poly.items(), key=lambda item: (sum(item[0]), tuple(-e for e in item[0])))
        return [(mon, RingValue(self.spec, c)) for mon, c in ordered]

    def homogeneous_part(self, degree: int) -> TruncatedSeries:
        data = {mon: c for mon, c in self.poly.items() if sum(mon) == degree}
        return TruncatedSeries(self.spec, self.vars, self.trunc, self.ring.from_dict(data))

    def truncated(self, trunc: int) -> TruncatedSeries:
        return series_truncate(self, trunc)

    # -- operators ----------------------------------------------------------

    def _lift(self, other: Any) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(self.spec, self.vars, self.trunc, other)

    def __add__(self, other: Any) -> TruncatedSeries:
        return series_add(self, self._lift(other))

    __radd__ = __add__

    def __sub__(self, other: Any) -> TruncatedSeries:
        return series_sub(self, self._lift(other))

    def __rsub__(self, other: Any) -> TruncatedSeries:
        return series_sub(self._lift(other), self)

    def __neg__(self) -> TruncatedSeries:
        return series_neg(self)

    def __mul__(self, other: Any) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> TruncatedSeries:
        return series_pow(self, n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.vars == other.vars
            and self.trunc == other.trunc
            and self.poly == other.poly
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.vars, self.trunc, frozenset(self.poly.items())))

    def __str__(self) -> str:
        body = str(self.poly.as_expr()) if self.poly else "0"
        return f"{body} + O(deg {self.trunc + 1})"

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.spec}, {self.vars}, trunc={self.trunc}, {self.poly})"


def _require_univariate(f: TruncatedSeries, what: str) -> None:
    if f.nvars != 1:
        raise SpecMismatch(f"{what} needs a univariate series, got variables {f.vars}")


def _check_pair(a: TruncatedSeries, b: TruncatedSeries) -> int:
    if a.spec != b.spec:
        raise SpecMismatch(f"Series over {a.spec} and {b.spec} cannot be combined")
    if a.vars != b.vars:
        raise SpecMismatch(f"Series in {a.vars} and {b.vars} cannot be combined")
    return min(a.trunc, b.trunc)


def equal_to(a: TruncatedSeries, b: TruncatedSeries, trunc: int) -> bool:
    """Equality of two series through total degree ``trunc``."""
    if trunc > min(a.trunc, b.trunc):
        raise TruncationTooShort(f"Cannot compare through degree {trunc}: known to {min(a.trunc, b.trunc)}")
    _check_pair(a, b)
    return _truncate_poly(a.poly, trunc) == _truncate_poly(b.poly, trunc)


# -- ring operations ------------------------------------------------------------


def series_truncate(f: TruncatedSeries, trunc: int) -> TruncatedSeries:
    if trunc > f.trunc:
        raise TruncationTooShort(f"Cannot raise truncation from {f.trunc} to {trunc}")
    return TruncatedSeries(f.spec, f.vars, trunc, _truncate_poly(f.poly, trunc))


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    trunc = _check_pair(a, b)
    return TruncatedSeries(a.spec, a.vars, trunc, _truncate_poly(a.poly + b.poly, trunc))


def series_sub(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    trunc = _check_pair(a, b)
    return TruncatedSeries(a.spec, a.vars, trunc, _truncate_poly(a.poly - b.poly, trunc))


def series_neg(a: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(a.spec, a.vars, a.trunc, -a.poly)


def series_scale(a: TruncatedSeries, c: Any) -> TruncatedSeries:
    raw = coerce(a.spec, c)
    return TruncatedSeries(a.spec, a.vars, a.trunc, a.poly.mul_ground(raw) if raw else a.ring.zero)


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    trunc = _check_pair(a, b)
    return TruncatedSeries(a.spec, a.vars, trunc, _mul_poly(a.poly, b.poly, trunc))


def series_pow(a: TruncatedSeries, n: int) -> TruncatedSeries:
    if n < 0:
        return series_pow(series_invert(a), -n)
    result = a.ring.one
    base = a.poly
    while n:
        if n & 1:
            result = _mul_poly(result, base, a.trunc)
        n >>= 1
        if n:
            base = _mul_poly(base, base, a.trunc)
    return TruncatedSeries(a.spec, a.vars, a.trunc, _truncate_poly(result, a.trunc))


def series_invert(f: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse; the constant term must be a unit."""
    c0 = f.constant_term
    try:
        c0_inv = f.spec.inverse(c0)
    except NotAUnit as exc:
        raise NonUnitConstantTerm(f"Constant term {f.spec.format(c0)} is not a unit in {f.spec}") from exc
    ring = f.ring
    # f = c0 (1 - q) with q of positive order; 1/f = c0^-1 (1 + q + q^2 + ...)
    q = ring.one - f.poly.mul_ground(c0_inv)
    result = ring.one
    for _ in range(f.trunc):
        result = ring.one + _mul_poly(q, result, f.trunc)
    return TruncatedSeries(f.spec, f.vars, f.trunc, _truncate_poly(result.mul_ground(c0_inv), f.trunc))


# -- calculus -----------------------------------------------------------------


def _var_index(f: TruncatedSeries, var: str | None) -> int:
    if var is None:
        _require_univariate(f, "This operation")
        return 0
    if var not in f.vars:
        raise SpecMismatch(f"{var!r} is not one of {f.vars}")
    return f.vars.index(var)


def series_derivative(f: TruncatedSeries, var: str | None = None) -> TruncatedSeries:
    """Partial derivative; the result is known through degree trunc - 1."""
    i = _var_index(f, var)
    trunc = max(f.trunc - 1, 0)
    return TruncatedSeries(f.spec, f.vars, trunc, _truncate_poly(f.poly.diff(f.ring.gens[i]), trunc))


def series_integrate(f: TruncatedSeries, var: str | None = None) -> TruncatedSeries:
    """Term-wise antiderivative with zero constant; truncation rises by one."""
    i = _var_index(f, var)
    data = {}
    for mon, c in f.poly.items():
        new = list(mon)
        new[i] += 1
        data[tuple(new)] = f.spec.divide_by_int(c, new[i])
    return TruncatedSeries(f.spec, f.vars, f.trunc + 1, f.ring.from_dict(data))


def series_log1p(u: TruncatedSeries) -> TruncatedSeries:
    if u.constant_term:
        raise NonzeroConstantTerm("log(1 + u) needs u with zero constant term")
    total = u.ring.zero
    power = u.ring.one
    for k in range(1, u.trunc + 1):
        power = _mul_poly(power, u.poly, u.trunc)
        if not power:
            break
        term = u.ring.from_dict({mon: u.spec.divide_by_int(c, k) for mon, c in power.items()})
        total = total + term if k % 2 else total - term
    return TruncatedSeries(u.spec, u.vars, u.trunc, total)


def series_exp(u: TruncatedSeries) -> TruncatedSeries:
    if u.constant_term:
        raise NonzeroConstantTerm("exp(u) needs u with zero constant term")
    total = u.ring.one
    power = u.ring.one
    for k in range(1, u.trunc + 1):
        power = _mul_poly(power, u.poly, u.trunc)
        if not power:
            break
        factorial = math.factorial(k)
        total = total + u.ring.from_dict({mon: u.spec.divide_by_int(c, factorial) for mon, c in power.items()})
    return TruncatedSeries(u.spec, u.vars, u.trunc, total)


# -- substitution ---------------------------------------------------------------


def series_dilate(f: TruncatedSeries, c: Any) -> TruncatedSeries:
    """f(c x): every term of total degree d is scaled by c^d."""
    raw = coerce(f.spec, c)
    data = {mon: coeff * raw ** sum(mon) for mon, coeff in f.poly.items()}
    return TruncatedSeries(f.spec, f.vars, f.trunc, f.ring.from_dict(data))


def series_inflate(f: TruncatedSeries, n: int, trunc: int | None = None) -> TruncatedSeries:
    """f(x^n) truncated to ``trunc`` (default: f's truncation)."""
    _require_univariate(f, "x -> x^n")
    if n < 1:
        raise InvalidArgument(f"Inflation index must be >= 1, got {n}")
    trunc = f.trunc if trunc is None else trunc
    if trunc > n * (f.trunc + 1) - 1:
        raise TruncationTooShort(
            f"f known to degree {f.trunc} determines f(x^{n}) only to degree {n * (f.trunc + 1) - 1}"
        )
    data = {(mon[0] * n,): c for mon, c in f.poly.items() if mon[0] * n <= trunc}
    return TruncatedSeries(f.spec, f.vars, trunc, f.ring.from_dict(data))


def series_restrict(f: TruncatedSeries, zero_vars: Iterable[str]) -> TruncatedSeries:
    """Set the named variables to zero, keeping the variable list."""
    idx = [_var_index(f, v) for v in zero_vars]
    data = {mon: c for mon, c in f.poly.items() if all(mon[i] == 0 for i in idx)}
    return TruncatedSeries(f.spec, f.vars, f.trunc, f.ring.from_dict(data))


def series_embed(
    f: TruncatedSeries,
    vars: Sequence[str],
    rename: Mapping[str, str] | None = None,
) -> TruncatedSeries:
    """Re-express f in a larger variable list, optionally renaming its variables."""
    vars = tuple(vars)
    rename = dict(rename or {})
    positions = []
    for v in f.vars:
        target = rename.get(v, v)
        if target not in vars:
            raise SpecMismatch(f"{target!r} is not one of {vars}")
        positions.append(vars.index(target))
    if len(set(positions)) != len(positions):
        raise SpecMismatch(f"Renaming {rename} merges variables of {f.vars}")
    data = {}
    for mon, c in f.poly.items():
        new = [0] * len(vars)
        for pos, e in zip(positions, mon):
            new[pos] = e
        data[tuple(new)] = c
    return TruncatedSeries(f.spec, vars, f.trunc, series_ring(f.spec, vars).from_dict(data))


def series_compose(f: TruncatedSeries, args: Sequence[TruncatedSeries]) -> TruncatedSeries:
    """Substitute ``args[i]`` for the i-th variable of f.

    The arguments must share ring, variables and truncation and have zero
    constant terms. The result is known through degree
    min(arg trunc, (f.trunc + 1) * (least argument order) - 1).
    """
    if len(args) != f.nvars:
        raise ArityMismatch(f"f has {f.nvars} variables but {len(args)} arguments were given")
    first = args[0]
    for g in args:
        if g.spec != f.spec:
            raise SpecMismatch(f"Argument over {g.spec} substituted into a series over {f.spec}")
        if g.vars != first.vars or g.trunc != first.trunc:
            raise SpecMismatch("Composition arguments must share variables and truncation")
        if g.constant_term:
            raise NonzeroConstantTerm(f"Argument {g} has a nonzero constant term")
    orders = [g.order for g in args]
    least = min(orders)
    trunc = first.trunc if least > first.trunc else min(first.trunc, (f.trunc + 1) * least - 1)
    ring = first.ring

    powers: list[list[PolyElement]] = [[ring.one] for _ in args]

    def power(i: int, e: int) -> PolyElement:
        cache = powers[i]
        while len(cache) <= e:
            cache.append(_mul_poly(cache[-1], args[i].poly, trunc))
        return cache[e]

    def substitute(terms: Mapping[Monomial, Any], i: int, room: int) -> PolyElement:
        if i == len(args):
            (c,) = terms.values()
            return ring.ground_new(c)
        groups: dict[int, dict[Monomial, Any]] = defaultdict(dict)
        for mon, c in terms.items():
            groups[mon[0]][mon[1:]] = c
        total = ring.zero
        for e, rest in groups.items():
            inner_room = room - e * orders[i]
            if inner_room < 0:
                continue
            inner = substitute(rest, i + 1, inner_room)
            if e:
                inner = _mul_poly(power(i, e), inner, trunc)
            total = total + inner
        return total

    body = substitute(dict(f.poly.items()), 0, trunc) if f.poly else ring.zero
    return TruncatedSeries(f.spec, first.vars, trunc, _truncate_poly(body, trunc))


# -- reversion ----------------------------------------------------------------


def series_reversion(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse of a univariate series, degree by degree.

    With f = a x + ..., the correction at degree i is the degree-i
    coefficient of f(r) divided by a, for the current approximation r.
    """
    _require_univariate(f, "Reversion")
    if f.constant_term:
        raise NonzeroConstantTerm("Reversion needs a series with zero constant term")
    a = f.coeff(1)
    if not f.spec.is_unit(a):
        raise NotReversible(f"Linear coefficient {f.spec.format(a)} is not a unit in {f.spec}")
    a_inv = f.spec.inverse(a)
    ring = f.ring
    r = ring.from_dict({(1,): a_inv}) if f.trunc >= 1 else ring.zero
    for i in range(2, f.trunc + 1):
        current = TruncatedSeries(f.spec, f.vars, i, _truncate_poly(r, i))
        image = series_compose(series_truncate(f, i), [current])
        c = image.coeff(i)
        if c:
            r = r - ring.from_dict({(i,): c * a_inv})
    return TruncatedSeries(f.spec, f.vars, f.trunc, r)


def system_reversion(fs: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
    """Inverse of a d-dimensional substitution whose linear part is the identity."""
    if not fs:
        raise ArityMismatch("Nothing to reverse")
    vars, trunc, spec = fs[0].vars, fs[0].trunc, fs[0].spec
    if len(fs) != len(vars):
        raise ArityMismatch(f"{len(fs)} series in {len(vars)} variables cannot be reversed")
    identity = [TruncatedSeries.variable(spec, vars, trunc, v) for v in vars]
    for f, x in zip(fs, identity):
        if f.vars != vars or f.trunc != trunc or f.spec != spec:
            raise SpecMismatch("Series to reverse must share ring, variables and truncation")
        if f.constant_term:
            raise NonzeroConstantTerm(f"{f} has a nonzero constant term")
        if f.homogeneous_part(1) != x.homogeneous_part(1):
            raise NotReversible(f"Linear part of {f} is not the coordinate {x}")
    g = list(identity)
    for i in range(2, trunc + 1):
        residual = [
            series_compose(series_truncate(f, i), [series_truncate(h, i) for h in g]) for f in fs
        ]
        g = [
            series_sub(h, TruncatedSeries(spec, vars, trunc, (res - x.truncated(i)).homogeneous_part(i).poly))
            for h, res, x in zip(g, residual, identity)
        ]
    return g


def lagrange_reversion(f: TruncatedSeries) -> TruncatedSeries:
    """Reversion by [x^n] g = (1/n) [x^(n-1)] (x/f)^n; rational coefficients only."""
    _require_univariate(f, "Lagrange reversion")
    if not f.spec.contains_rationals:
        raise SpecMismatch(f"Lagrange reversion divides by n and needs Q, got {f.spec}")
    if f.constant_term:
        raise NonzeroConstantTerm("Reversion needs a series with zero constant term")
    if not f.coeff(1):
        raise NotReversible("Linear coefficient is zero")
    if f.trunc < 1:
        return TruncatedSeries.zero(f.spec, f.vars, f.trunc)
    shifted = TruncatedSeries.from_terms(
        f.spec, f.vars, f.trunc - 1, {(mon[0] - 1,): c for mon, c in f.poly.items()}
    )
    h = series_invert(shifted)
    data = {}
    for n in range(1, f.trunc + 1):
        data[(n,)] = f.spec.divide_by_int(series_pow(h, n).coeff(n - 1), n)
    return TruncatedSeries.from_terms(f.spec, f.vars, f.trunc, data)


def series_project(f: TruncatedSeries, vars: Sequence[str]) -> TruncatedSeries:
    """Set every variable outside ``vars`` to zero and re-express f in ``vars``."""
    vars = tuple(vars)
    keep = [_var_index(f, v) for v in vars]
    dropped = [i for i in range(f.nvars) if i not in keep]
    data = {
        tuple(mon[i] for i in keep): c
        for mon, c in f.poly.items()
        if all(mon[i] == 0 for i in dropped)
    }
    return TruncatedSeries(f.spec, vars, f.trunc, series_ring(f.spec, vars).from_dict(data))


def series_map(f: TruncatedSeries, target: RingSpec, hom: Callable[[Any], Any]) -> TruncatedSeries:
    """Apply a ring map coefficient-wise."""
    ring = series_ring(target, f.vars)
    return TruncatedSeries(target, f.vars, f.trunc, ring.from_dict({mon: hom(c) for mon, c in f.poly.items()}))
