"""JSON payloads for command input and canonical JSON for command output.

Output is canonical: keys sorted, two-space indent, ring elements as decimal
strings (``"a/b"`` for rationals, coefficient arrays for polynomials). Indices,
lengths and moduli stay JSON integers. Input payloads are validated with
pydantic and turned into library objects against an explicit ring; every
encoder's output is accepted by the matching payload.
"""

from __future__ import annotations

import json
from typing import Any, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .cartier import CartierElement, cartier_from_terms, cartier_normalize
from .errors import ArityMismatch, SpecMismatch
from .formal_groups import FormalGroupLaw, InvariantForm, law_variables, point_variables
from .nilpotent import LambdaElement, NilpotentAlgebra
from .rings import RingSpec, RingValue
from .series import TruncatedSeries
from .witt import WittVector

Element = Union[str, int, list[Any]]


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)


def _model_dump(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json")
    return payload


def dumps(payload: Any) -> str:
    return canonical_json(_model_dump(payload))


# -- encoders ---------------------------------------------------------------------------


def encode_value(value: RingValue) -> Any:
    return value.to_json()


def encode_series(f: TruncatedSeries) -> dict[str, Any]:
    """Sparse terms in graded-lexicographic order, whatever the number of variables."""
    return {
        "ring": str(f.spec),
        "trunc": f.trunc,
        "vars": list(f.vars),
        "terms": [{"exp": list(mon), "coeff": c.to_json()} for mon, c in f.terms()],
    }


def encode_fgl(F: FormalGroupLaw) -> dict[str, Any]:
    return {
        "ring": str(F.spec),
        "dim": F.dim,
        "trunc": F.trunc,
        "components": [encode_series(f) for f in F.components],
    }


def encode_log(logs: Sequence[TruncatedSeries]) -> dict[str, Any]:
    """Logarithm components in the shape ``fgl from-log`` reads."""
    return {
        "ring": str(logs[0].spec),
        "dim": len(logs),
        "trunc": logs[0].trunc,
        "components": [encode_series(ell) for ell in logs],
    }


def encode_form(omega: InvariantForm) -> dict[str, Any]:
    return {
        "ring": str(omega.spec),
        "dim": omega.dim,
        "trunc": omega.trunc,
        "rows": [[encode_series(g) for g in row] for row in omega.coeffs],
    }


def encode_witt(a: WittVector) -> dict[str, Any]:
    return {"ring": str(a.spec), "k": a.k, "b": [a.spec.to_json(c) for c in a.b]}


def encode_values(values: Sequence[RingValue]) -> list[Any]:
    return [v.to_json() for v in values]


def encode_cartier(xi: CartierElement) -> dict[str, Any]:
    return {
        "ring": str(xi.spec),
        "vbound": xi.vbound,
        "terms": [{"n": n, "m": m, "a": xi.spec.to_json(a)} for (n, m), a in xi.terms],
    }


def encode_algebra(algebra: NilpotentAlgebra) -> dict[str, Any]:
    products = []
    for i in range(algebra.rank):
        for j in range(i, algebra.rank):
            value = algebra.structure[i][j]
            if not algebra.is_zero(value):
                products.append({"i": i + 1, "j": j + 1, "value": [algebra.spec.to_json(c) for c in value]})
    return {"rank": algebra.rank, "exponent": algebra.exponent, "products": products}


def encode_lambda(u: LambdaElement) -> dict[str, Any]:
    """The element as operand ``u`` over its algebra, ready for ``lambda inv``."""
    spec = u.algebra.spec
    return {
        "ring": str(spec),
        "algebra": encode_algebra(u.algebra),
        "u": [[spec.to_json(c) for c in v] for v in u.coeffs],
    }


def encode_congruence(report: BaseModel) -> dict[str, Any]:
    return report.model_dump(mode="json")


# -- input payloads -------------------------------------------------------------------


class _Payload(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TermPayload(_Payload):
    exp: list[int]
    coeff: Any


class SeriesPayload(_Payload):
    """A series as a coefficient list (univariate), sparse terms, or an expression."""

    ring: Optional[str] = None
    trunc: Optional[int] = Field(default=None, ge=0)
    vars: Optional[list[str]] = None
    coeffs: Optional[list[Any]] = None
    terms: Optional[list[TermPayload]] = None
    expr: Optional[str] = None

    @model_validator(mode="after")
    def _one_body(self) -> SeriesPayload:
        given = [body for body in (self.coeffs, self.terms, self.expr) if body is not None]
        if len(given) != 1:
            raise ValueError("a series needs exactly one of coeffs, terms or expr")
        return self

    def build(self, spec: RingSpec, trunc: int, vars: Sequence[str] = ("x",)) -> TruncatedSeries:
        vars = tuple(self.vars or vars)
        trunc = self.trunc if self.trunc is not None else trunc
        if self.expr is not None:
            return TruncatedSeries.parse(spec, vars, trunc, self.expr)
        if self.coeffs is not None:
            if len(vars) != 1:
                raise ArityMismatch("coefficient lists describe univariate series only")
            return TruncatedSeries.from_coefficients(
                spec, trunc, [spec.from_json(c) for c in self.coeffs], vars[0]
            )
        return TruncatedSeries.from_terms(
            spec, vars, trunc, {tuple(t.exp): spec.from_json(t.coeff) for t in self.terms}
        )


class _ComponentsPayload(_Payload):
    ring: Optional[str] = None
    dim: Optional[int] = Field(default=None, ge=1)
    trunc: Optional[int] = Field(default=None, ge=1)
    components: list[Union[str, SeriesPayload]] = Field(min_length=1)

    def _series(self, spec: RingSpec, trunc: int, vars: tuple[str, ...]) -> list[TruncatedSeries]:
        if self.dim is not None and self.dim != len(self.components):
            raise ArityMismatch(f"dim is {self.dim} but {len(self.components)} components are given")
        trunc = self.trunc if self.trunc is not None else trunc
        return [
            TruncatedSeries.parse(spec, vars, trunc, c) if isinstance(c, str) else c.build(spec, trunc, vars)
            for c in self.components
        ]


class FglPayload(_ComponentsPayload):
    def build(self, spec: RingSpec, trunc: int) -> FormalGroupLaw:
        dim = len(self.components)
        parts = self._series(spec, trunc, law_variables(dim))
        return FormalGroupLaw(spec, dim, parts[0].trunc, tuple(parts))


class LogPayload(_ComponentsPayload):
    """Logarithm components l_1..l_d in the point variables."""

    def build(self, spec: RingSpec, trunc: int) -> list[TruncatedSeries]:
        return self._series(spec, trunc, point_variables(len(self.components)))


class WittPayload(_Payload):
    ring: Optional[str] = None
    k: Optional[int] = Field(default=None, ge=1)
    b: list[Element]

    def build(self, spec: RingSpec, k: Optional[int] = None) -> WittVector:
        length = self.k if self.k is not None else (k if k is not None else len(self.b))
        if len(self.b) != length:
            raise SpecMismatch(f"Witt vector of length {length} needs {length} coordinates, got {len(self.b)}")
        return WittVector.from_coefficients(spec, [spec.from_json(c) for c in self.b], length)


class WittPairPayload(_Payload):
    ring: Optional[str] = None
    x: WittPayload
    y: WittPayload


class ValuesPayload(_Payload):
    ring: Optional[str] = None
    values: list[Element]


class CartierTermPayload(_Payload):
    n: int = Field(ge=1)
    m: int = Field(ge=1)
    a: Any


class CartierPayload(_Payload):
    ring: Optional[str] = None
    vbound: Optional[int] = Field(default=None, ge=2)
    terms: Optional[list[CartierTermPayload]] = None
    expr: Optional[str] = None

    @model_validator(mode="after")
    def _one_body(self) -> CartierPayload:
        if (self.terms is None) == (self.expr is None):
            raise ValueError("a Cartier element needs exactly one of terms or expr")
        return self

    def build(self, spec: RingSpec, vbound: int) -> CartierElement:
        vbound = self.vbound if self.vbound is not None else vbound
        if self.expr is not None:
            return cartier_normalize(self.expr, spec, vbound)
        return cartier_from_terms(spec, vbound, {(t.n, t.m): spec.from_json(t.a) for t in self.terms})


class CartierApplyPayload(_Payload):
    ring: Optional[str] = None
    element: CartierPayload
    vector: WittPayload


class ProductPayload(_Payload):
    i: int = Field(ge=1)
    j: int = Field(ge=1)
    value: list[Element]


class AlgebraPayload(_Payload):
    rank: int = Field(ge=0)
    exponent: int = Field(ge=1)
    products: list[ProductPayload] = Field(default_factory=list)

    def build(self, spec: RingSpec) -> NilpotentAlgebra:
        table = {(p.i, p.j): [spec.from_json(c) for c in p.value] for p in self.products}
        return NilpotentAlgebra.from_products(spec, self.rank, table, self.exponent)


class LambdaPayload(_Payload):
    """Operands u (and v for products) over one nilpotent algebra."""

    ring: Optional[str] = None
    algebra: AlgebraPayload
    u: list[list[Element]]
    v: Optional[list[list[Element]]] = None

    def build(self, spec: RingSpec) -> tuple[LambdaElement, Optional[LambdaElement]]:
        algebra = self.algebra.build(spec)
        u = LambdaElement.from_coefficients(algebra, [[spec.from_json(c) for c in row] for row in self.u])
        if self.v is None:
            return u, None
        v = LambdaElement.from_coefficients(algebra, [[spec.from_json(c) for c in row] for row in self.v])
        return u, v


def decode_json(text: str) -> Any:
    """Parse inline JSON or ``@path`` file contents."""
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as handle:
            return json.load(handle)
    return json.loads(text)


def payload_ring(data: Any, default: RingSpec) -> RingSpec:
    """The ring named in a payload's ``ring`` key, or ``default``."""
    if isinstance(data, dict) and isinstance(data.get("ring"), str):
        return RingSpec.parse(data["ring"])
    return default
