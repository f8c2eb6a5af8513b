"""Finite-rank nilpotent algebras and the functor N -> Lambda(N).

Lambda(N) is the group of polynomials 1 + n_1 t + ... + n_s t^s with n_i in N
under multiplication. Inverses are polynomial because N^e = 0.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Iterator, Mapping, Sequence

from pydantic import BaseModel, computed_field

from .errors import AlgebraMismatch, RingSpecError
from .rings import RingKind, RingSpec, coerce

logger = logging.getLogger(__name__)

Vector = tuple[Any, ...]


@dataclass(frozen=True)
class NilpotentAlgebra:
    """structure[i][j] holds the coordinates of e_i * e_j."""

    spec: RingSpec
    rank: int
    structure: tuple[tuple[Vector, ...], ...]
    exponent: int

    def __post_init__(self) -> None:
        r = self.rank
        if r < 0 or self.exponent < 1:
            raise AlgebraMismatch(f"Bad rank {r} or nilpotency exponent {self.exponent}")
        if len(self.structure) != r or any(len(row) != r or any(len(v) != r for v in row) for row in self.structure):
            raise AlgebraMismatch(f"Structure tensor must have shape {r}x{r}x{r}")
        basis = self.basis()
        for i, j in itertools.product(range(r), repeat=2):
            if self.structure[i][j] != self.structure[j][i]:
                raise AlgebraMismatch(f"Multiplication is not commutative on e{i + 1}, e{j + 1}")
        for i, j, k in itertools.product(range(r), repeat=3):
            left = self.mul(self.mul(basis[i], basis[j]), basis[k])
            right = self.mul(basis[i], self.mul(basis[j], basis[k]))
            if left != right:
                raise AlgebraMismatch(f"Multiplication is not associative on e{i + 1}, e{j + 1}, e{k + 1}")
        if not self._power_vanishes(self.exponent):
            raise AlgebraMismatch(f"Products of {self.exponent} elements do not all vanish")

    @classmethod
    def from_products(
        cls,
        spec: RingSpec,
        rank: int,
        products: Mapping[tuple[int, int], Sequence[Any]],
        exponent: int,
    ) -> NilpotentAlgebra:
        """Build from the nonzero products e_i e_j (1-based indices); symmetry is filled in."""
        zero = tuple(spec.zero for _ in range(rank))
        table = [[zero for _ in range(rank)] for _ in range(rank)]
        for (i, j), value in products.items():
            vector = tuple(coerce(spec, c) for c in value)
            if len(vector) != rank:
                raise AlgebraMismatch(f"Product e{i}e{j} needs {rank} coordinates")
            table[i - 1][j - 1] = vector
            table[j - 1][i - 1] = vector
        return cls(spec, rank, tuple(tuple(row) for row in table), exponent)

    def zero(self) -> Vector:
        return tuple(self.spec.zero for _ in range(self.rank))

    def basis(self) -> list[Vector]:
        return [tuple(self.spec.one if i == j else self.spec.zero for j in range(self.rank)) for i in range(self.rank)]

    def vector(self, coords: Sequence[Any]) -> Vector:
        if len(coords) != self.rank:
            raise AlgebraMismatch(f"Element needs {self.rank} coordinates, got {len(coords)}")
        return tuple(coerce(self.spec, c) for c in coords)

    def add(self, u: Vector, v: Vector) -> Vector:
        return tuple(a + b for a, b in zip(u, v))

    def neg(self, u: Vector) -> Vector:
        return tuple(-a for a in u)

    def mul(self, u: Vector, v: Vector) -> Vector:
        out = list(self.zero())
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                ab = a * b
                for l, s in enumerate(self.structure[i][j]):
                    if s:
                        out[l] = out[l] + ab * s
        return tuple(out)

    def is_zero(self, u: Vector) -> bool:
        return not any(u)

    def _power_vanishes(self, e: int) -> bool:
        basis = self.basis()
        span = basis
        for _ in range(e - 1):
            span = [self.mul(u, b) for u in span for b in basis]
            span = [u for u in span if not self.is_zero(u)]
            if not span:
                return True
        return not span

    def elements(self) -> Iterator[Vector]:
        """Every element; only for Z/m coefficients."""
        if self.spec.kind is not RingKind.INTEGERS_MOD:
            raise RingSpecError(f"Cannot enumerate an algebra over {self.spec}")
        residues = [self.spec.from_int(i) for i in range(self.spec.modulus)]
        yield from itertools.product(residues, repeat=self.rank)


@dataclass(frozen=True)
class LambdaElement:
    """1 + coeffs[0] t + coeffs[1] t^2 + ..., without trailing zero coefficients."""

    algebra: NilpotentAlgebra
    coeffs: tuple[Vector, ...]

    def __post_init__(self) -> None:
        if self.coeffs and self.algebra.is_zero(self.coeffs[-1]):
            raise AlgebraMismatch("Lambda elements store no trailing zero coefficient")

    @classmethod
    def from_coefficients(cls, algebra: NilpotentAlgebra, coeffs: Sequence[Sequence[Any]]) -> LambdaElement:
        return _normalized(algebra, [algebra.vector(c) for c in coeffs])

    @classmethod
    def one(cls, algebra: NilpotentAlgebra) -> LambdaElement:
        return cls(algebra, ())

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def __mul__(self, other: LambdaElement) -> LambdaElement:
        return lambda_mul(self, other)

    def __str__(self) -> str:
        parts = ["1"]
        for i, v in enumerate(self.coeffs, start=1):
            if not self.algebra.is_zero(v):
                coords = ", ".join(self.algebra.spec.format(c) for c in v)
                parts.append(f"({coords}) t^{i}")
        return " + ".join(parts)


def _normalized(algebra: NilpotentAlgebra, coeffs: list[Vector]) -> LambdaElement:
    while coeffs and algebra.is_zero(coeffs[-1]):
        coeffs.pop()
    return LambdaElement(algebra, tuple(coeffs))


def _mul_tails(algebra: NilpotentAlgebra, p: Sequence[Vector], q: Sequence[Vector]) -> list[Vector]:
    """(1 + P)(1 + Q) - 1 for coefficient lists P, Q starting at t^1."""
    out = [algebra.zero() for _ in range(len(p) + len(q))]
    for i, v in enumerate(p):
        out[i] = algebra.add(out[i], v)
    for j, w in enumerate(q):
        out[j] = algebra.add(out[j], w)
    for i, v in enumerate(p):
        for j, w in enumerate(q):
            out[i + j + 1] = algebra.add(out[i + j + 1], algebra.mul(v, w))
    return out


def lambda_mul(u: LambdaElement, v: LambdaElement) -> LambdaElement:
    if u.algebra != v.algebra:
        raise AlgebraMismatch("Lambda elements over different algebras")
    return _normalized(u.algebra, _mul_tails(u.algebra, u.coeffs, v.coeffs))


def lambda_inv(u: LambdaElement) -> LambdaElement:
    """(1 + P)^-1 = 1 - P + P^2 - ... , finite since P^e = 0."""
    algebra = u.algebra
    minus_p = [algebra.neg(v) for v in u.coeffs]
    result: list[Vector] = []
    power: list[Vector] = []
    for j in range(1, algebra.exponent):
        if j == 1:
            power = list(minus_p)
        else:
            power = _product_only(algebra, power, minus_p)
        if not any(not algebra.is_zero(v) for v in power):
            break
        result = _add_tails(algebra, result, power)
    return _normalized(algebra, result)


def _product_only(algebra: NilpotentAlgebra, p: Sequence[Vector], q: Sequence[Vector]) -> list[Vector]:
    out = [algebra.zero() for _ in range(len(p) + len(q))]
    for i, v in enumerate(p):
        for j, w in enumerate(q):
            out[i + j + 1] = algebra.add(out[i + j + 1], algebra.mul(v, w))
    return out


def _add_tails(algebra: NilpotentAlgebra, p: Sequence[Vector], q: Sequence[Vector]) -> list[Vector]:
    out = [algebra.zero() for _ in range(max(len(p), len(q)))]
    for i, v in enumerate(p):
        out[i] = algebra.add(out[i], v)
    for i, v in enumerate(q):
        out[i] = algebra.add(out[i], v)
    return out


@dataclass(frozen=True)
class AlgebraMap:
    """An algebra homomorphism given by the images of the basis vectors."""

    source: NilpotentAlgebra
    target: NilpotentAlgebra
    images: tuple[Vector, ...]

    def __post_init__(self) -> None:
        if self.source.spec != self.target.spec:
            raise AlgebraMismatch("Algebra maps must preserve the coefficient ring")
        if len(self.images) != self.source.rank:
            raise AlgebraMismatch(f"Need {self.source.rank} basis images, got {len(self.images)}")
        basis = self.source.basis()
        for i, j in itertools.product(range(self.source.rank), repeat=2):
            if self(self.source.mul(basis[i], basis[j])) != self.target.mul(self.images[i], self.images[j]):
                raise AlgebraMismatch(f"Map is not multiplicative on e{i + 1}, e{j + 1}")

    def __call__(self, u: Vector) -> Vector:
        out = self.target.zero()
        for a, image in zip(u, self.images):
            if a:
                out = self.target.add(out, tuple(a * c for c in image))
        return out


def lambda_map(phi: AlgebraMap, u: LambdaElement) -> LambdaElement:
    if u.algebra != phi.source:
        raise AlgebraMismatch("Lambda element does not live over the source of the map")
    return _normalized(phi.target, [phi(v) for v in u.coeffs])


def lambda_elements(algebra: NilpotentAlgebra, degree: int) -> Iterator[LambdaElement]:
    """All elements of degree <= ``degree``; coefficients must be enumerable."""
    elements = list(algebra.elements())
    for coeffs in itertools.product(elements, repeat=degree):
        yield _normalized(algebra, list(coeffs))


class ExactnessReport(BaseModel):
    ring: str
    ranks: tuple[int, int, int]
    degree: int
    elements_checked: int
    injective: bool
    composite_trivial: bool
    kernel_is_image: bool
    surjective: bool

    @computed_field
    @property
    def ok(self) -> bool:
        return self.injective and self.composite_trivial and self.kernel_is_image and self.surjective


def lambda_exactness(inclusion: AlgebraMap, projection: AlgebraMap, degree: int = 2) -> ExactnessReport:
    """Check 1 -> Lambda(N1) -> Lambda(N2) -> Lambda(N3) -> 1 by enumeration in degrees <= ``degree``."""
    if inclusion.target != projection.source:
        raise AlgebraMismatch("The inclusion must land in the source of the projection")
    n1, n2, n3 = inclusion.source, inclusion.target, projection.target
    one3 = LambdaElement.one(n3)

    images = {}
    injective = True
    for u in lambda_elements(n1, degree):
        image = lambda_map(inclusion, u)
        if image in images:
            injective = False
        images[image] = u
    composite_trivial = all(lambda_map(projection, v) == one3 for v in images)

    kernel_is_image = True
    reached = set()
    checked = len(images)
    for v in lambda_elements(n2, degree):
        checked += 1
        w = lambda_map(projection, v)
        reached.add(w)
        if w == one3 and v not in images:
            kernel_is_image = False
    surjective = all(w in reached for w in lambda_elements(n3, degree))

    report = ExactnessReport(
        ring=str(n2.spec),
        ranks=(n1.rank, n2.rank, n3.rank),
        degree=degree,
        elements_checked=checked,
        injective=injective,
        composite_trivial=composite_trivial,
        kernel_is_image=kernel_is_image,
        surjective=surjective,
    )
    logger.debug("Lambda exactness over %s: %s", n2.spec, report)
    return report


# -- standard examples ---------------------------------------------------------------


def truncated_polynomial_algebra(spec: RingSpec, rank: int) -> NilpotentAlgebra:
    """tR[t]/(t^(rank+1)) with basis t, t^2, ..., t^rank."""
    products = {}
    for i in range(1, rank + 1):
        for j in range(i, rank + 1):
            if i + j <= rank:
                products[(i, j)] = [int(l == i + j) for l in range(1, rank + 1)]
    return NilpotentAlgebra.from_products(spec, rank, products, rank + 1)


def square_zero_algebra(spec: RingSpec, rank: int) -> NilpotentAlgebra:
    return NilpotentAlgebra.from_products(spec, rank, {}, 2)


def standard_extension(spec: RingSpec, rank: int) -> tuple[AlgebraMap, AlgebraMap]:
    """0 -> t^2R[t] -> tR[t] -> tR[t]/t^2 -> 0, all truncated at t^(rank+1)."""
    if rank < 2:
        raise AlgebraMismatch(f"The standard extension needs rank >= 2, got {rank}")
    middle = truncated_polynomial_algebra(spec, rank)
    products = {}
    for i in range(2, rank + 1):
        for j in range(i, rank + 1):
            if i + j <= rank:
                products[(i - 1, j - 1)] = [int(l == i + j) for l in range(2, rank + 1)]
    kernel = NilpotentAlgebra.from_products(spec, rank - 1, products, rank)
    quotient = square_zero_algebra(spec, 1)
    basis = middle.basis()
    inclusion = AlgebraMap(kernel, middle, tuple(basis[1:]))
    projection = AlgebraMap(
        middle, quotient, tuple(quotient.vector([1 if i == 0 else 0]) for i in range(rank))
    )
    return inclusion, projection
