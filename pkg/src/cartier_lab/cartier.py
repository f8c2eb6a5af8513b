"""Cartier-ring elements sum V_n[a_{n,m}]F_m modulo the V-filtration.

An element is stored by its canonical terms. For arithmetic the terms are
grouped into blocks keyed by coprime (n0, m0): the terms (n0 t, m0 t) of a
block are the Witt coordinates of one Witt vector w, and the block equals
V_n0 w F_m0. Adding elements multiplies the block series, which is where the
Teichmuller addition defect comes from. Only terms with n < vbound are kept.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Any, Mapping, Union

from .errors import ExpressionSyntaxError, InvalidArgument, SpecMismatch, TruncationTooShort, VBoundTooSmall
from .rings import RingSpec, RingValue, coerce
from .series import TruncatedSeries, series_add, series_dilate, series_mul, series_pow
from .witt import (
    WITT_VAR,
    WittVector,
    frobenius,
    teichmuller_act,
    verschiebung,
    witt_add,
    witt_coordinates,
)

Index = tuple[int, int]


@dataclass(frozen=True)
class CartierElement:
    spec: RingSpec
    vbound: int
    terms: tuple[tuple[Index, Any], ...]

    def __post_init__(self) -> None:
        if self.vbound < 2:
            raise VBoundTooSmall(f"V-filtration bound must be >= 2, got {self.vbound}")
        for (n, m), a in self.terms:
            if n < 1 or m < 1 or n >= self.vbound:
                raise SpecMismatch(f"Term V{n}F{m} is outside 1 <= n < {self.vbound}, m >= 1")
            if not a:
                raise SpecMismatch(f"Canonical form stores no zero coefficient (V{n}F{m})")

    @property
    def coefficients(self) -> dict[Index, RingValue]:
        return {index: RingValue(self.spec, a) for index, a in self.terms}

    def coefficient(self, n: int, m: int) -> RingValue:
        return RingValue(self.spec, dict(self.terms).get((n, m), self.spec.zero))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: CartierElement) -> CartierElement:
        return cartier_add(self, other)

    def __neg__(self) -> CartierElement:
        return cartier_neg(self)

    def __sub__(self, other: CartierElement) -> CartierElement:
        return cartier_add(self, cartier_neg(other))

    def __mul__(self, other: CartierElement) -> CartierElement:
        return cartier_mul(self, other)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"V{n}[{self.spec.format(a)}]F{m}" for (n, m), a in self.terms)


# -- block arithmetic -------------------------------------------------------------


class _Blocks:
    """Accumulates contributions a -> (1 - a x^t)^mult into per-block series."""

    def __init__(self, spec: RingSpec, vbound: int) -> None:
        self.spec = spec
        self.vbound = vbound
        self.series: dict[Index, TruncatedSeries] = {}

    def add_term(self, n: int, m: int, a: Any, mult: int = 1) -> None:
        if not a or not mult:
            return
        g = math.gcd(n, m)
        n0, m0, t = n // g, m // g, g
        length = (self.vbound - 1) // n0
        if t > length:
            return
        factor = TruncatedSeries.from_terms(self.spec, (WITT_VAR,), length, {(0,): 1, (t,): -a})
        if mult != 1:
            factor = series_pow(factor, mult)
        key = (n0, m0)
        current = self.series.get(key)
        self.series[key] = factor if current is None else series_mul(current, factor)

    def element(self) -> CartierElement:
        terms: dict[Index, Any] = {}
        for (n0, m0), body in self.series.items():
            coords = witt_coordinates(WittVector(self.spec, body.trunc, body))
            for t, a in enumerate(coords, start=1):
                if a:
                    terms[(n0 * t, m0 * t)] = a
        return CartierElement(self.spec, self.vbound, tuple(sorted(terms.items())))


def cartier_from_terms(spec: RingSpec, vbound: int, terms: Mapping[Index, Any]) -> CartierElement:
    """Canonical form of a finite sum of V_n[a]F_m (terms need not be canonical already)."""
    if vbound < 2:
        raise VBoundTooSmall(f"V-filtration bound must be >= 2, got {vbound}")
    blocks = _Blocks(spec, vbound)
    for (n, m), a in sorted(terms.items()):
        if n < 1 or m < 1:
            raise SpecMismatch(f"Indices of V{n}F{m} must be positive")
        blocks.add_term(n, m, coerce(spec, a))
    return blocks.element()


def cartier_zero(spec: RingSpec, vbound: int) -> CartierElement:
    return cartier_from_terms(spec, vbound, {})


def cartier_integer(z: int, spec: RingSpec, vbound: int) -> CartierElement:
    if vbound < 2:
        raise VBoundTooSmall(f"V-filtration bound must be >= 2, got {vbound}")
    blocks = _Blocks(spec, vbound)
    blocks.add_term(1, 1, spec.one, z)
    return blocks.element()


def cartier_teichmuller(c: Any, spec: RingSpec, vbound: int) -> CartierElement:
    return cartier_from_terms(spec, vbound, {(1, 1): coerce(spec, c)})


def cartier_verschiebung(n: int, spec: RingSpec, vbound: int) -> CartierElement:
    return cartier_from_terms(spec, vbound, {(n, 1): spec.one})


def cartier_frobenius(m: int, spec: RingSpec, vbound: int) -> CartierElement:
    return cartier_from_terms(spec, vbound, {(1, m): spec.one})


def cartier_truncate(xi: CartierElement, vbound: int) -> CartierElement:
    if vbound > xi.vbound:
        raise TruncationTooShort(f"Element is known modulo V_{xi.vbound}, not V_{vbound}")
    return CartierElement(xi.spec, vbound, tuple((index, a) for index, a in xi.terms if index[0] < vbound))


def cartier_add(x: CartierElement, y: CartierElement) -> CartierElement:
    if x.spec != y.spec:
        raise SpecMismatch(f"Cartier elements over {x.spec} and {y.spec}")
    blocks = _Blocks(x.spec, min(x.vbound, y.vbound))
    for (n, m), a in x.terms + y.terms:
        blocks.add_term(n, m, a)
    return blocks.element()


def cartier_neg(x: CartierElement) -> CartierElement:
    blocks = _Blocks(x.spec, x.vbound)
    for (n, m), a in x.terms:
        blocks.add_term(n, m, a, -1)
    return blocks.element()


def required_right_bound(x: CartierElement, vbound: int) -> int:
    """Bound to which a right factor must be known so x * y is exact modulo V_vbound."""
    needed = vbound
    for (n, m), _ in x.terms:
        needed = max(needed, -(-vbound * m // n))
    return needed


def cartier_mul(x: CartierElement, y: CartierElement) -> CartierElement:
    """Product by V_n[a]F_m * V_n'[b]F_m' = g V_{nn'/g}[a^{n'/g} b^{m/g}] F_{mm'/g}, g = gcd(m, n').

    The result is exact modulo V_v with v = min(x.vbound, min over x's terms of
    ceil(n * y.vbound / m)).
    """
    if x.spec != y.spec:
        raise SpecMismatch(f"Cartier elements over {x.spec} and {y.spec}")
    vbound = x.vbound
    for (n, m), _ in x.terms:
        vbound = min(vbound, -(-n * y.vbound // m))
    if vbound < 2:
        raise VBoundTooSmall(f"Right factor known modulo V_{y.vbound} only determines the product modulo V_{vbound}")
    blocks = _Blocks(x.spec, vbound)
    for (n, m), a in x.terms:
        for (n2, m2), b in y.terms:
            g = math.gcd(m, n2)
            coefficient = a ** (n2 // g) * b ** (m // g)
            blocks.add_term(n * n2 // g, m * m2 // g, coefficient, g)
    return blocks.element()


# -- expressions ------------------------------------------------------------------


@dataclass(frozen=True)
class Verschiebung:
    n: int


@dataclass(frozen=True)
class Frobenius:
    m: int


@dataclass(frozen=True)
class Teich:
    text: str


@dataclass(frozen=True)
class Integer:
    value: int


@dataclass(frozen=True)
class Neg:
    item: Expr


@dataclass(frozen=True)
class Sum:
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class Product:
    factors: tuple[Expr, ...]


Expr = Union[Verschiebung, Frobenius, Teich, Integer, Neg, Sum, Product]

_TOKEN = re.compile(
    r"\s*(?:V(?P<v>\d+)|F(?P<f>\d+)|\[(?P<teich>[^\[\]]*)\]|(?P<int>\d+)|(?P<op>[-+*()]))"
)


def _tokenize(text: str) -> list[tuple[str, Any, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise ExpressionSyntaxError(f"Unexpected character at position {pos} in {text!r}")
        start = match.start() + len(match.group(0)) - len(match.group(0).lstrip())
        if match.group("v") is not None:
            tokens.append(("V", int(match.group("v")), start))
        elif match.group("f") is not None:
            tokens.append(("F", int(match.group("f")), start))
        elif match.group("teich") is not None:
            tokens.append(("[", match.group("teich").strip(), start))
        elif match.group("int") is not None:
            tokens.append(("int", int(match.group("int")), start))
        else:
            tokens.append((match.group("op"), None, start))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, Any, int]:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def fail(self, message: str) -> ExpressionSyntaxError:
        where = self.tokens[self.pos][2] if self.pos < len(self.tokens) else len(self.text)
        return ExpressionSyntaxError(f"{message} at position {where} in {self.text!r}")

    def parse(self) -> Expr:
        if not self.tokens:
            raise ExpressionSyntaxError("Empty Cartier expression")
        node = self.expr()
        if self.peek() is not None:
            raise self.fail("Unexpected token")
        return node

    def expr(self) -> Expr:
        items = [self.term()]
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            item = self.term()
            items.append(item if op == "+" else Neg(item))
        return items[0] if len(items) == 1 else Sum(tuple(items))

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.peek() in ("*", "V", "F", "[", "int", "("):
            if self.peek() == "*":
                self.take()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self) -> Expr:
        kind = self.peek()
        if kind is None:
            raise self.fail("Expression ends early")
        if kind == "-":
            self.take()
            return Neg(self.factor())
        if kind == "(":
            self.take()
            node = self.expr()
            if self.peek() != ")":
                raise self.fail("Missing ')'")
            self.take()
            return node
        kind, value, _ = self.take()
        if kind in ("V", "F"):
            if value < 1:
                raise ExpressionSyntaxError(f"{kind}{value}: operator indices start at 1")
            return Verschiebung(value) if kind == "V" else Frobenius(value)
        if kind == "[":
            if not value:
                raise ExpressionSyntaxError("Empty Teichmuller bracket []")
            return Teich(value)
        if kind == "int":
            return Integer(value)
        self.pos -= 1
        raise self.fail(f"Unexpected {kind!r}")


def parse_expression(text: str) -> Expr:
    """Words such as ``"F2 V2"``, ``"[c1] + [c2]"`` or ``"V3*[2]*F2 - 1"``; juxtaposition multiplies."""
    return _Parser(text).parse()


def _evaluate(node: Expr, spec: RingSpec, vbound: int, order: str) -> CartierElement:
    if isinstance(node, Integer):
        return cartier_integer(node.value, spec, vbound)
    if isinstance(node, Teich):
        return cartier_teichmuller(spec.parse_text(node.text), spec, vbound)
    if isinstance(node, Verschiebung):
        return cartier_verschiebung(node.n, spec, vbound)
    if isinstance(node, Frobenius):
        return cartier_frobenius(node.m, spec, vbound)
    if isinstance(node, Neg):
        return cartier_neg(_evaluate(node.item, spec, vbound, order))
    if isinstance(node, Sum):
        values = [_evaluate(item, spec, vbound, order) for item in node.items]
        if order == "right":
            total = values[-1]
            for value in reversed(values[:-1]):
                total = cartier_add(value, total)
            return total
        total = values[0]
        for value in values[1:]:
            total = cartier_add(total, value)
        return total
    if order == "right":
        return _right_product(node.factors, spec, vbound, order)
    total = _evaluate(node.factors[0], spec, vbound, order)
    for factor in node.factors[1:]:
        right = _evaluate(factor, spec, required_right_bound(total, vbound), order)
        total = cartier_truncate(cartier_mul(total, right), vbound)
    return total


def _right_product(factors: tuple[Expr, ...], spec: RingSpec, vbound: int, order: str) -> CartierElement:
    left = _evaluate(factors[0], spec, vbound, order)
    if len(factors) == 1:
        return left
    right = _right_product(factors[1:], spec, required_right_bound(left, vbound), order)
    return cartier_truncate(cartier_mul(left, right), vbound)


def cartier_normalize(expr: str | Expr, spec: RingSpec, vbound: int, order: str = "left") -> CartierElement:
    """Canonical form of a word in V_n, F_m, [c], integers, + and products.

    ``order`` picks left or right association of sums and products; both give
    the same canonical form.
    """
    if vbound < 2:
        raise VBoundTooSmall(f"V-filtration bound must be >= 2, got {vbound}")
    if order not in ("left", "right"):
        raise InvalidArgument(f"Rewrite order must be 'left' or 'right', got {order!r}")
    node = parse_expression(expr) if isinstance(expr, str) else expr
    return _evaluate(node, spec, vbound, order)


# -- actions ------------------------------------------------------------------------


def action_truncation(xi: CartierElement, k: int) -> int:
    """Degree through which xi applied to a length-k input is determined."""
    bound = min(k, xi.vbound - 1)
    for (n, m), _ in xi.terms:
        bound = min(bound, n * (k // m + 1) - 1)
    return bound


def cartier_apply(xi: CartierElement, a: WittVector, k: int | None = None) -> WittVector:
    """Act on W(R) through V_n, [c] and F_m; output length defaults to the largest determined one."""
    if xi.spec != a.spec:
        raise SpecMismatch(f"Element over {xi.spec} applied to a Witt vector over {a.spec}")
    available = action_truncation(xi, a.k)
    k = available if k is None else k
    if k < 1 or k > available:
        raise TruncationTooShort(
            f"Applying {xi} to a length-{a.k} vector determines {available} coordinates, {k} requested"
        )
    result = WittVector.one(a.spec, k)
    for (n, m), c in xi.terms:
        if a.k // m == 0 or n > k:
            continue
        image = teichmuller_act(c, frobenius(m, a))
        result = witt_add(result, verschiebung(n, image, k))
    return result


def _ga_frobenius(m: int, g: TruncatedSeries) -> TruncatedSeries:
    """F_m(c x^i) = m c x^(i/m) when m | i, else 0."""
    trunc = g.trunc // m
    data = {(mon[0] // m,): c * g.spec.from_int(m) for mon, c in g.poly.items() if mon[0] % m == 0}
    return TruncatedSeries.from_terms(g.spec, g.vars, trunc, data)


def cartier_apply_ga(xi: CartierElement, g: TruncatedSeries, k: int | None = None) -> TruncatedSeries:
    """Act on the additive group: V_n g = g(x^n), [c] g = g(cx), F_m as above."""
    if g.nvars != 1:
        raise SpecMismatch("The additive-group action needs a univariate series")
    if g.constant_term:
        raise SpecMismatch("The additive-group action needs a series with zero constant term")
    if xi.spec != g.spec:
        raise SpecMismatch(f"Element over {xi.spec} applied to a series over {g.spec}")
    available = action_truncation(xi, g.trunc)
    k = available if k is None else k
    if k < 1 or k > available:
        raise TruncationTooShort(f"Action determines degree {available}, {k} requested")
    total = TruncatedSeries.zero(g.spec, g.vars, k)
    for (n, m), c in xi.terms:
        if g.trunc // m == 0 or n > k:
            continue
        image = series_dilate(_ga_frobenius(m, g), c)
        data = {(mon[0] * n,): coeff for mon, coeff in image.poly.items() if mon[0] * n <= k}
        total = series_add(total, TruncatedSeries.from_terms(g.spec, g.vars, k, data))
    return total
