"""Exact coefficient rings: Z, Q, Z/m and polynomial rings over them.

Arithmetic is delegated to sympy domains. A ``RingSpec`` names the ring and
owns the ring-specific operations (units, exact division by integers, JSON
forms); a ``RingValue`` pairs a spec with a raw domain element. Hot loops in
the series code work on raw elements directly and wrap them only at the
public boundary.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Mapping, Sequence

import sympy
from sympy import primefactors
from sympy.polys.domains import FF, QQ, ZZ
from sympy.polys.domains.domain import Domain
from sympy.polys.polyerrors import CoercionFailed

from .errors import (
    DenominatorNotInvertible,
    InvalidArgument,
    NonInvertibleIndex,
    NotAUnit,
    RingSpecError,
    SpecMismatch,
)

MAX_POLYNOMIAL_DEPTH = 2

_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_TRAILING_VARIABLES = re.compile(r"^(?P<base>.+)\[(?P<vars>[^\[\]]+)\]$")
_MODULUS = re.compile(r"^Z/(?P<m>\d+)$")
_RATIONAL = re.compile(r"^(?P<num>[+-]?\d+)(?:/(?P<den>[+-]?\d+))?$")


class RingKind(str, Enum):
    INTEGERS = "Z"
    RATIONALS = "Q"
    INTEGERS_MOD = "Z/m"
    POLYNOMIAL = "poly"


@dataclass(frozen=True)
class RingSpec:
    """A declared commutative ring.

    Grammar: ``Z``, ``Q``, ``Z/<m>``, ``<base>[<var>,...]`` (for example
    ``Z[l]``, ``Q[l]``, ``Z[c1,c2]``, ``Z/9[l]``).
    """

    kind: RingKind
    modulus: int | None = None
    base: RingSpec | None = None
    variables: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is RingKind.INTEGERS_MOD:
            if not isinstance(self.modulus, int) or self.modulus < 2:
                raise RingSpecError(f"Z/m needs a modulus m >= 2, got {self.modulus!r}")
        elif self.kind is RingKind.POLYNOMIAL:
            if self.base is None or not self.variables:
                raise RingSpecError("A polynomial ring needs a base ring and variables")
            for var in self.variables:
                if not _IDENTIFIER.match(var):
                    raise RingSpecError(f"Invalid polynomial variable {var!r}")
            if len(set(self.variables)) != len(self.variables):
                raise RingSpecError(f"Repeated polynomial variable in {self.variables}")
            clash = set(self.variables) & set(self.base.all_variables)
            if clash:
                raise RingSpecError(f"Variables {sorted(clash)} already used by {self.base}")
            if self.depth > MAX_POLYNOMIAL_DEPTH:
                raise RingSpecError(
                    f"Polynomial nesting depth {self.depth} exceeds {MAX_POLYNOMIAL_DEPTH}"
                )

    # -- construction -------------------------------------------------------

    @classmethod
    def integers(cls) -> RingSpec:
        return cls(RingKind.INTEGERS)

    @classmethod
    def rationals(cls) -> RingSpec:
        return cls(RingKind.RATIONALS)

    @classmethod
    def integers_mod(cls, modulus: int) -> RingSpec:
        return cls(RingKind.INTEGERS_MOD, modulus=modulus)

    @classmethod
    def polynomial(cls, base: RingSpec, *variables: str) -> RingSpec:
        return cls(RingKind.POLYNOMIAL, base=base, variables=tuple(variables))

    @classmethod
    def parse(cls, text: str) -> RingSpec:
        text = text.strip().replace(" ", "")
        match = _TRAILING_VARIABLES.match(text)
        if match:
            base = cls.parse(match.group("base"))
            return cls.polynomial(base, *match.group("vars").split(","))
        if text == "Z":
            return cls.integers()
        if text == "Q":
            return cls.rationals()
        match = _MODULUS.match(text)
        if match:
            return cls.integers_mod(int(match.group("m")))
        raise RingSpecError(f"Unrecognised ring spec {text!r}; expected Z, Q, Z/<m> or <base>[<var>]")

    def __str__(self) -> str:
        if self.kind is RingKind.INTEGERS_MOD:
            return f"Z/{self.modulus}"
        if self.kind is RingKind.POLYNOMIAL:
            return f"{self.base}[{','.join(self.variables)}]"
        return self.kind.value

    # -- structure ----------------------------------------------------------

    @property
    def depth(self) -> int:
        if self.kind is RingKind.POLYNOMIAL:
            return self.base.depth + 1
        return 0

    @property
    def is_polynomial(self) -> bool:
        return self.kind is RingKind.POLYNOMIAL

    @property
    def all_variables(self) -> tuple[str, ...]:
        if self.kind is RingKind.POLYNOMIAL:
            return self.base.all_variables + self.variables
        return ()

    @property
    def ground(self) -> RingSpec:
        """The innermost non-polynomial ring."""
        return self.base.ground if self.kind is RingKind.POLYNOMIAL else self

    @property
    def torsion_free(self) -> bool:
        return self.ground.kind in (RingKind.INTEGERS, RingKind.RATIONALS)

    @property
    def contains_rationals(self) -> bool:
        return self.ground.kind is RingKind.RATIONALS

    @property
    def domain(self) -> Domain:
        return _domain_for(self)

    # -- raw element helpers --------------------------------------------------

    @property
    def zero(self) -> Any:
        return self.domain.zero

    @property
    def one(self) -> Any:
        return self.domain.one

    def from_int(self, n: int) -> Any:
        return self.domain.convert(int(n))

    def value(self, raw: Any) -> RingValue:
        return RingValue(self, raw)

    def canonical(self, raw: Any) -> Any:
        return self.domain.convert(raw)

    def residue(self, raw: Any) -> int:
        """The representative in [0, m) of a Z/m element."""
        self._require(RingKind.INTEGERS_MOD)
        return int(self.domain.to_int(raw)) % self.modulus

    def is_nilpotent(self, raw: Any) -> bool:
        if self.kind is RingKind.INTEGERS_MOD:
            radical = math.prod(primefactors(self.modulus))
            return self.residue(raw) % radical == 0
        if self.kind is RingKind.POLYNOMIAL:
            return all(self.base.is_nilpotent(c) for c in raw.values())
        return not raw

    def is_unit(self, raw: Any) -> bool:
        if self.kind is RingKind.INTEGERS:
            return int(raw) in (1, -1)
        if self.kind is RingKind.RATIONALS:
            return bool(raw)
        if self.kind is RingKind.INTEGERS_MOD:
            return math.gcd(self.residue(raw), self.modulus) == 1
        ring = self.domain.ring
        constant = raw.get(ring.zero_monom, self.base.zero)
        rest = raw - ring.ground_new(constant)
        return self.base.is_unit(constant) and self.is_nilpotent(rest)

    def inverse(self, raw: Any) -> Any:
        if not self.is_unit(raw):
            raise NotAUnit(f"{self.format(raw)} is not a unit in {self}")
        if self.kind is RingKind.INTEGERS:
            return raw
        if self.kind is RingKind.RATIONALS:
            return self.domain.quo(self.domain.one, raw)
        if self.kind is RingKind.INTEGERS_MOD:
            return self.from_int(pow(self.residue(raw), -1, self.modulus))
        # constant unit plus nilpotent: the geometric series terminates
        ring = self.domain.ring
        constant = raw.get(ring.zero_monom, self.base.zero)
        c_inv = ring.ground_new(self.base.inverse(constant))
        step = -(raw - ring.ground_new(constant)) * c_inv
        result, power = ring.one, ring.one
        while True:
            power = power * step
            if not power:
                break
            result = result + power
        return result * c_inv

    def divide_by_int(self, raw: Any, k: int) -> Any:
        """Exact division of ``raw`` by the positive integer ``k``."""
        if k == 1 or not raw:
            return raw
        if self.kind is RingKind.INTEGERS:
            quotient, remainder = divmod(int(raw), k)
            if remainder:
                raise NonInvertibleIndex(f"{k} does not divide {int(raw)} in Z")
            return self.from_int(quotient)
        if self.kind is RingKind.RATIONALS:
            return self.domain.quo(raw, self.from_int(k))
        if self.kind is RingKind.INTEGERS_MOD:
            if math.gcd(k, self.modulus) != 1:
                raise NonInvertibleIndex(f"{k} is not invertible in {self}")
            return raw * self.from_int(pow(k, -1, self.modulus))
        ring = self.domain.ring
        return ring.from_dict({mon: self.base.divide_by_int(c, k) for mon, c in raw.items()})

    # -- text and JSON --------------------------------------------------------

    def format(self, raw: Any) -> str:
        if self.kind is RingKind.INTEGERS:
            return str(int(raw))
        if self.kind is RingKind.RATIONALS:
            num, den = int(QQ.numer(raw)), int(QQ.denom(raw))
            return str(num) if den == 1 else f"{num}/{den}"
        if self.kind is RingKind.INTEGERS_MOD:
            return str(self.residue(raw))
        return str(raw)

    def parse_text(self, text: str) -> Any:
        text = str(text).strip()
        if self.kind is RingKind.POLYNOMIAL:
            try:
                return self.domain.ring.from_expr(sympy.sympify(text))
            except (sympy.SympifyError, ValueError, TypeError, CoercionFailed) as exc:
                raise RingSpecError(f"Cannot read {text!r} as an element of {self}") from exc
        match = _RATIONAL.match(text.replace(" ", ""))
        if not match:
            raise RingSpecError(f"Cannot read {text!r} as an element of {self}")
        num = int(match.group("num"))
        den = int(match.group("den")) if match.group("den") else 1
        if den == 0:
            raise RingSpecError(f"Zero denominator in {text!r}")
        if self.kind is RingKind.RATIONALS:
            return QQ(num, den)
        if den == 1:
            return self.from_int(num)
        return ring_hom(RingSpec.rationals(), self)(QQ(num, den))

    def to_json(self, raw: Any) -> Any:
        """JSON form: decimal strings, "a/b" for rationals, coefficient arrays for polynomials."""
        if self.kind is not RingKind.POLYNOMIAL:
            return self.format(raw)
        if len(self.variables) == 1:
            degree = max((mon[0] for mon in raw.keys()), default=-1)
            return [self.base.to_json(raw.get((i,), self.base.zero)) for i in range(degree + 1)]
        ordered = sorted(raw.items(), key=lambda item: (sum(item[0]), tuple(-e for e in item[0])))
        return [{"exp": list(mon), "coeff": self.base.to_json(c)} for mon, c in ordered]

    def from_json(self, data: Any) -> Any:
        if isinstance(data, bool):
            raise RingSpecError(f"Booleans are not ring elements: {data!r}")
        if isinstance(data, (int, str)):
            return self.parse_text(str(data))
        if self.kind is RingKind.POLYNOMIAL and isinstance(data, list):
            ring = self.domain.ring
            if all(isinstance(item, dict) for item in data) and data:
                terms = {}
                for item in data:
                    exp = tuple(int(e) for e in item["exp"])
                    if len(exp) != len(self.variables):
                        raise RingSpecError(f"Exponent {exp} does not match variables {self.variables}")
                    terms[exp] = self.base.from_json(item["coeff"])
                return ring.from_dict(terms)
            if len(self.variables) != 1:
                raise RingSpecError(f"{self} needs exponent/coefficient records, not a coefficient list")
            return ring.from_dict({(i,): self.base.from_json(c) for i, c in enumerate(data)})
        raise RingSpecError(f"Cannot read {data!r} as an element of {self}")

    def random(self, rng: random.Random, bound: int = 20) -> Any:
        if self.kind is RingKind.INTEGERS:
            return self.from_int(rng.randint(-bound, bound))
        if self.kind is RingKind.RATIONALS:
            return QQ(rng.randint(-bound, bound), rng.randint(1, bound))
        if self.kind is RingKind.INTEGERS_MOD:
            return self.from_int(rng.randrange(self.modulus))
        ring = self.domain.ring
        terms = {}
        for _ in range(rng.randint(0, 3)):
            mon = tuple(rng.randint(0, 2) for _ in self.variables)
            terms[mon] = self.base.random(rng, bound)
        return ring.from_dict(terms)

    def _require(self, kind: RingKind) -> None:
        if self.kind is not kind:
            raise SpecMismatch(f"Operation needs a {kind.value} ring, got {self}")


@lru_cache(maxsize=None)
def _domain_for(spec: RingSpec) -> Domain:
    if spec.kind is RingKind.INTEGERS:
        return ZZ
    if spec.kind is RingKind.RATIONALS:
        return QQ
    if spec.kind is RingKind.INTEGERS_MOD:
        return FF(spec.modulus, symmetric=False)
    return _domain_for(spec.base).poly_ring(*spec.variables)


@dataclass(frozen=True, eq=False)
class RingValue:
    """An exact element of a declared ring."""

    spec: RingSpec
    raw: Any

    def _other(self, other: Any) -> Any:
        if isinstance(other, RingValue):
            if other.spec != self.spec:
                raise SpecMismatch(f"Operands live in {self.spec} and {other.spec}")
            return other.raw
        if isinstance(other, int) and not isinstance(other, bool):
            return self.spec.from_int(other)
        raise SpecMismatch(f"Cannot combine {self.spec} element with {other!r}")

    def __add__(self, other: Any) -> RingValue:
        return RingValue(self.spec, self.raw + self._other(other))

    __radd__ = __add__

    def __sub__(self, other: Any) -> RingValue:
        return RingValue(self.spec, self.raw - self._other(other))

    def __rsub__(self, other: Any) -> RingValue:
        return RingValue(self.spec, self._other(other) - self.raw)

    def __mul__(self, other: Any) -> RingValue:
        return RingValue(self.spec, self.raw * self._other(other))

    __rmul__ = __mul__

    def __neg__(self) -> RingValue:
        return RingValue(self.spec, -self.raw)

    def __pow__(self, exponent: int) -> RingValue:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return RingValue(self.spec, self.raw**exponent if exponent else self.spec.one)

    def __eq__(self, other: object) -> bool:
        try:
            return self.raw == self._other(other)
        except SpecMismatch:
            return False

    def __hash__(self) -> int:
        return hash((self.spec, self.spec.to_json(self.raw).__repr__()))

    def __bool__(self) -> bool:
        return bool(self.raw)

    def is_zero(self) -> bool:
        return not self.raw

    def is_unit(self) -> bool:
        return self.spec.is_unit(self.raw)

    def inverse(self) -> RingValue:
        return RingValue(self.spec, self.spec.inverse(self.raw))

    def to_json(self) -> Any:
        return self.spec.to_json(self.raw)

    def __str__(self) -> str:
        return self.spec.format(self.raw)

    def __repr__(self) -> str:
        return f"RingValue({self.spec}, {self})"


def coerce(spec: RingSpec, value: Any) -> Any:
    """Raw element of ``spec`` from a RingValue, int, string or raw element."""
    if isinstance(value, RingValue):
        if value.spec != spec:
            raise SpecMismatch(f"Value from {value.spec} used where {spec} is expected")
        return value.raw
    if isinstance(value, bool):
        raise SpecMismatch(f"Booleans are not elements of {spec}")
    if isinstance(value, int):
        return spec.from_int(value)
    if isinstance(value, str):
        return spec.parse_text(value)
    return spec.canonical(value)


_BINARY_OPS: dict[str, Callable[[RingValue, RingValue], Any]] = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "eq": lambda a, b: a == b,
}
_UNARY_OPS: dict[str, Callable[[RingValue], Any]] = {
    "neg": lambda a: -a,
    "is_zero": lambda a: a.is_zero(),
    "is_unit": lambda a: a.is_unit(),
}


def ring_arith(op: str, a: RingValue, b: RingValue | None = None) -> RingValue | bool:
    if op in _UNARY_OPS:
        return _UNARY_OPS[op](a)
    if op not in _BINARY_OPS:
        raise InvalidArgument(f"Unknown ring operation {op!r}")
    if b is None:
        raise InvalidArgument(f"Operation {op!r} needs two operands")
    if a.spec != b.spec:
        raise SpecMismatch(f"Operands live in {a.spec} and {b.spec}")
    return _BINARY_OPS[op](a, b)


# -- polynomials --------------------------------------------------------------


def polynomial(spec: RingSpec, coeffs: Sequence[Any]) -> RingValue:
    """Univariate polynomial from coefficients, constant term first."""
    if not spec.is_polynomial or len(spec.variables) != 1:
        raise SpecMismatch(f"{spec} is not a univariate polynomial ring")
    ring = spec.domain.ring
    raw = ring.from_dict({(i,): coerce(spec.base, c) for i, c in enumerate(coeffs)})
    return RingValue(spec, raw)


def coefficients(p: RingValue) -> list[RingValue]:
    """Coefficients of a univariate polynomial, constant term first, no trailing zeros."""
    spec = p.spec
    if not spec.is_polynomial or len(spec.variables) != 1:
        raise SpecMismatch(f"{spec} is not a univariate polynomial ring")
    degree = max((mon[0] for mon in p.raw.keys()), default=-1)
    return [RingValue(spec.base, p.raw.get((i,), spec.base.zero)) for i in range(degree + 1)]


def poly_derivative(p: RingValue, var: str | None = None) -> RingValue:
    spec = p.spec
    if not spec.is_polynomial:
        raise SpecMismatch(f"d/d{var or '?'} needs a polynomial ring, got {spec}")
    var = var or spec.variables[0]
    if var not in spec.variables:
        raise SpecMismatch(f"{var!r} is not a variable of {spec}")
    return RingValue(spec, p.raw.diff(spec.variables.index(var)))


def divides_all_coeffs(p: RingValue, m: int) -> bool:
    spec = p.spec
    if not spec.is_polynomial or spec.base.kind is not RingKind.INTEGERS:
        raise SpecMismatch(f"Coefficient divisibility needs Z[...], got {spec}")
    if m < 1:
        raise InvalidArgument(f"Modulus must be positive, got {m}")
    return all(int(c) % m == 0 for c in p.raw.values())


def ring_hom(
    source: RingSpec,
    target: RingSpec,
    assignment: Mapping[str, Any] | None = None,
) -> Callable[[Any], Any]:
    """The natural map source -> target on raw elements.

    Supported: Z -> anything, Q -> rings where the denominators are units,
    Z/m -> Z/m' with m' | m, coefficient-wise maps between polynomial rings in
    the same variables, and evaluation of polynomial variables at the values in
    ``assignment`` (elements of ``target``).
    """
    assignment = dict(assignment or {})
    if source == target and not assignment:
        return lambda raw: raw

    if source.kind is RingKind.POLYNOMIAL:
        evaluated = [v for v in source.variables if v in assignment]
        if not evaluated and target.is_polynomial and target.variables == source.variables:
            inner = ring_hom(source.base, target.base, assignment)
            target_ring = target.domain.ring
            return lambda raw: target_ring.from_dict({mon: inner(c) for mon, c in raw.items()})
        missing = [v for v in source.variables if v not in assignment]
        if missing:
            raise SpecMismatch(f"No value assigned to {missing} when mapping {source} to {target}")
        values = [coerce(target, assignment.pop(v)) for v in source.variables]
        inner = ring_hom(source.base, target, assignment)

        def evaluate(raw: Any) -> Any:
            total = target.zero
            for mon, c in raw.items():
                term = inner(c)
                for value, e in zip(values, mon):
                    if e:
                        term = term * value**e
                total = total + term
            return total

        return evaluate

    if assignment:
        raise SpecMismatch(f"{source} has no variables {sorted(assignment)} to assign")

    if target.kind is RingKind.POLYNOMIAL:
        inner = ring_hom(source, target.base)
        target_ring = target.domain.ring
        return lambda raw: target_ring.ground_new(inner(raw))

    if source.kind is RingKind.INTEGERS:
        return lambda raw: target.from_int(int(raw))

    if source.kind is RingKind.RATIONALS:
        def from_fraction(raw: Any) -> Any:
            den = target.from_int(int(QQ.denom(raw)))
            if not target.is_unit(den):
                raise DenominatorNotInvertible(
                    f"Denominator {int(QQ.denom(raw))} is not invertible in {target}"
                )
            return target.from_int(int(QQ.numer(raw))) * target.inverse(den)

        return from_fraction

    if target.kind is RingKind.INTEGERS_MOD and source.modulus % target.modulus == 0:
        return lambda raw: target.from_int(source.residue(raw))
    raise SpecMismatch(f"No natural map from {source} to {target}")


def evaluate_polynomial(p: RingValue, assignment: Mapping[str, Any], target: RingSpec) -> RingValue:
    return RingValue(target, ring_hom(p.spec, target, assignment)(p.raw))
