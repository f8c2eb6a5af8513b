"""Ghost recurrences and the universal integer polynomials of Witt arithmetic.

Witt vectors are held in series coordinates 1 + b_1 x + ... + b_k x^k. The
ghost components are the coefficients of -x f'/f; over rings without
Z-torsion they turn Witt products and Frobenius into componentwise
operations. Everywhere else the operations go through integer polynomials
obtained once by solving the ghost equations over Q[b, c] and checking that
every coefficient is an integer.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Mapping, Sequence

from sympy.polys.domains import QQ

from .errors import CeilingExceeded, IntegralityFailure, InvalidArgument, NonInvertibleIndex, NotTorsionFree
from .rings import RingSpec, ring_hom
from .settings import load_settings

logger = logging.getLogger(__name__)

OPERATIONS = ("add", "mul", "frobenius")


def ghost_components(spec: RingSpec, b: Sequence[Any]) -> list[Any]:
    """w_n = -n b_n - sum_{i<n} b_i w_{n-i} for 1 + sum b_i x^i."""
    w: list[Any] = []
    for n in range(1, len(b) + 1):
        total = spec.from_int(-n) * b[n - 1]
        for i in range(1, n):
            total = total - b[i - 1] * w[n - i - 1]
        w.append(total)
    return w


def from_ghost_components(spec: RingSpec, w: Sequence[Any]) -> list[Any]:
    """Inverse of :func:`ghost_components`; raises NotTorsionFree when a division fails."""
    b: list[Any] = []
    for n in range(1, len(w) + 1):
        total = w[n - 1]
        for i in range(1, n):
            total = total + b[i - 1] * w[n - i - 1]
        try:
            b.append(-spec.divide_by_int(total, n))
        except NonInvertibleIndex as exc:
            raise NotTorsionFree(
                f"Ghost vector has no preimage over {spec}: cannot divide by {n} at index {n}"
            ) from exc
    return b


@dataclass(frozen=True)
class UniversalFamily:
    """Integer polynomials giving the output coordinates b'_1..b'_k of one operation."""

    op: str
    n: int
    k: int
    inputs: tuple[str, ...]
    spec: RingSpec
    polynomials: tuple[Any, ...]

    def evaluate(self, target: RingSpec, values: Mapping[str, Any]) -> list[Any]:
        hom = ring_hom(self.spec, target, values)
        return [hom(p) for p in self.polynomials]

    @property
    def term_count(self) -> int:
        return sum(len(p) for p in self.polynomials)

    def to_json(self) -> dict[str, Any]:
        return {
            "op": self.op,
            "n": self.n,
            "k": self.k,
            "inputs": list(self.inputs),
            "polynomials": [self.spec.to_json(p) for p in self.polynomials],
        }


def _names(letter: str, count: int) -> tuple[str, ...]:
    return tuple(f"{letter}{i}" for i in range(1, count + 1))


def _integral(integer: RingSpec, p: Any, op: str, k: int) -> Any:
    terms = {}
    for mon, c in p.items():
        if QQ.denom(c) != 1:
            raise IntegralityFailure(
                f"Universal {op} polynomial at k={k} has coefficient {QQ.numer(c)}/{QQ.denom(c)}"
            )
        terms[mon] = int(QQ.numer(c))
    return integer.domain.ring.from_dict(terms)


@lru_cache(maxsize=None)
def _derive(op: str, n: int, k: int) -> UniversalFamily:
    started = time.perf_counter()
    length = n * k if op == "frobenius" else k
    inputs = _names("b", length) + (_names("c", k) if op in ("add", "mul") else ())
    generic = RingSpec.polynomial(RingSpec.rationals(), *inputs)
    integer = RingSpec.polynomial(RingSpec.integers(), *inputs)
    gens = generic.domain.ring.gens
    b = list(gens[:length])
    c = list(gens[length:])

    if op == "add":
        one = generic.one
        full_b, full_c = [one] + b, [one] + c
        result = [
            sum((full_b[i] * full_c[m - i] for i in range(m + 1)), generic.zero) for m in range(1, k + 1)
        ]
    elif op == "mul":
        wb = ghost_components(generic, b)
        wc = ghost_components(generic, c)
        result = from_ghost_components(generic, [x * y for x, y in zip(wb, wc)])
    else:
        w = ghost_components(generic, b)
        result = from_ghost_components(generic, [w[n * m - 1] for m in range(1, k + 1)])

    polynomials = tuple(_integral(integer, p, op, k) for p in result)
    family = UniversalFamily(op, n, k, inputs, integer, polynomials)
    logger.debug(
        "Derived universal %s (n=%s, k=%s): %s terms in %.3fs",
        op,
        n,
        k,
        family.term_count,
        time.perf_counter() - started,
    )
    return family


def derive_universal_polynomials(op: str, k: int, n: int = 1, ceiling: int | None = None) -> UniversalFamily:
    """Memoized integer polynomials for ``op`` in {add, mul, frobenius} at output length k.

    For ``frobenius`` the inputs are b_1..b_{n k}; for ``add`` and ``mul`` they
    are b_1..b_k and c_1..c_k.
    """
    if op not in OPERATIONS:
        raise InvalidArgument(f"Unknown universal operation {op!r}; expected one of {OPERATIONS}")
    if k < 1 or n < 1:
        raise InvalidArgument(f"Lengths must be positive, got k={k}, n={n}")
    ceiling = load_settings().universal_ceiling if ceiling is None else ceiling
    if k > ceiling:
        raise CeilingExceeded(f"Universal {op} polynomials requested at k={k}, ceiling is {ceiling}")
    return _derive(op, n if op == "frobenius" else 1, k)


def universal_cache_info() -> Any:
    return _derive.cache_info()
