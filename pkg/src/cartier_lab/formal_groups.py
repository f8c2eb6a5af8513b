"""Commutative formal group laws, invariant differentials and logarithms."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from pydantic import BaseModel, computed_field
from sympy import Matrix
from sympy.polys.domains import QQ

from .errors import ArityMismatch, NonInvertibleJacobian, NotReversible, SpecMismatch
from .rings import RingSpec, RingKind, ring_hom
from .series import (
    TruncatedSeries,
    equal_to,
    series_compose,
    series_derivative,
    series_embed,
    series_map,
    series_mul,
    series_project,
    series_restrict,
    series_reversion,
    series_ring,
    system_reversion,
)

logger = logging.getLogger(__name__)


def point_variables(dim: int) -> tuple[str, ...]:
    return ("x",) if dim == 1 else tuple(f"x{i}" for i in range(1, dim + 1))


def law_variables(dim: int) -> tuple[str, ...]:
    if dim == 1:
        return ("x", "y")
    return point_variables(dim) + tuple(f"y{i}" for i in range(1, dim + 1))


def triple_variables(dim: int) -> tuple[str, ...]:
    if dim == 1:
        return ("x", "y", "z")
    return law_variables(dim) + tuple(f"z{i}" for i in range(1, dim + 1))


def _second_point(dim: int, letter: str) -> dict[str, str]:
    """Rename x_i to <letter>_i."""
    return {x: letter + x[1:] for x in point_variables(dim)}


@dataclass(frozen=True)
class FormalGroupLaw:
    spec: RingSpec
    dim: int
    trunc: int
    components: tuple[TruncatedSeries, ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ArityMismatch(f"Dimension must be >= 1, got {self.dim}")
        if len(self.components) != self.dim:
            raise ArityMismatch(f"A {self.dim}-dimensional law needs {self.dim} components")
        expected = law_variables(self.dim)
        for f in self.components:
            if f.spec != self.spec or f.vars != expected or f.trunc != self.trunc:
                raise SpecMismatch(
                    f"Component must be a series over {self.spec} in {expected} to degree {self.trunc}"
                )

    @classmethod
    def parse(cls, spec: RingSpec, trunc: int, texts: Sequence[str]) -> FormalGroupLaw:
        """Build a law from component expressions such as ``"x + y - x*y"``."""
        dim = len(texts)
        vars = law_variables(dim)
        return cls(spec, dim, trunc, tuple(TruncatedSeries.parse(spec, vars, trunc, t) for t in texts))

    def __str__(self) -> str:
        return "; ".join(str(f) for f in self.components)


@dataclass(frozen=True)
class InvariantForm:
    """Row j holds the coefficients of w_j = sum_i g_ji dx_i."""

    spec: RingSpec
    dim: int
    trunc: int
    coeffs: tuple[tuple[TruncatedSeries, ...], ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.dim or any(len(row) != self.dim for row in self.coeffs):
            raise ArityMismatch(f"An invariant form of dimension {self.dim} needs a {self.dim}x{self.dim} matrix")
        vars = point_variables(self.dim)
        for row in self.coeffs:
            for g in row:
                if g.spec != self.spec or g.vars != vars or g.trunc != self.trunc:
                    raise SpecMismatch(f"Form coefficient must be a series over {self.spec} in {vars}")

    def at_origin_is_identity(self) -> bool:
        return all(
            g.constant_term == (self.spec.one if i == j else self.spec.zero)
            for j, row in enumerate(self.coeffs)
            for i, g in enumerate(row)
        )


class FglValidationReport(BaseModel):
    unit_ok: bool
    comm_ok: bool
    assoc_ok: bool
    max_degree_checked: int

    @computed_field
    @property
    def ok(self) -> bool:
        return self.unit_ok and self.comm_ok and self.assoc_ok


# -- standard laws ----------------------------------------------------------------


def fgl_additive(spec: RingSpec, dim: int, trunc: int) -> FormalGroupLaw:
    vars = law_variables(dim)
    components = []
    for x, y in zip(point_variables(dim), vars[dim:]):
        components.append(
            TruncatedSeries.variable(spec, vars, trunc, x) + TruncatedSeries.variable(spec, vars, trunc, y)
        )
    return FormalGroupLaw(spec, dim, trunc, tuple(components))


def fgl_multiplicative(spec: RingSpec, trunc: int) -> FormalGroupLaw:
    """x + y - xy: the coordinate 1 - t on the multiplicative group."""
    x = TruncatedSeries.variable(spec, ("x", "y"), trunc, "x")
    y = TruncatedSeries.variable(spec, ("x", "y"), trunc, "y")
    return FormalGroupLaw(spec, 1, trunc, (x + y - x * y,))


# -- validation -------------------------------------------------------------------


def _unit_sections_hold(F: FormalGroupLaw) -> bool:
    xs = point_variables(F.dim)
    ys = law_variables(F.dim)[F.dim:]
    vars = law_variables(F.dim)
    for f, x, y in zip(F.components, xs, ys):
        if series_restrict(f, ys) != TruncatedSeries.variable(F.spec, vars, F.trunc, x):
            return False
        if series_restrict(f, xs) != TruncatedSeries.variable(F.spec, vars, F.trunc, y):
            return False
    return True


def _commutes(F: FormalGroupLaw) -> bool:
    vars = law_variables(F.dim)
    swap = {}
    for x, y in zip(vars[: F.dim], vars[F.dim:]):
        swap[x], swap[y] = y, x
    return all(series_embed(f, vars, swap) == f for f in F.components)


def _associates(F: FormalGroupLaw) -> bool:
    vars3 = triple_variables(F.dim)
    d = F.dim
    xs, ys, zs = vars3[:d], vars3[d : 2 * d], vars3[2 * d :]
    left_pair = [series_embed(f, vars3) for f in F.components]
    right_pair = [
        series_embed(f, vars3, {**dict(zip(xs, ys)), **dict(zip(ys, zs))}) for f in F.components
    ]
    singles = {v: TruncatedSeries.variable(F.spec, vars3, F.trunc, v) for v in vars3}
    for f in F.components:
        lhs = series_compose(f, left_pair + [singles[z] for z in zs])
        rhs = series_compose(f, [singles[x] for x in xs] + right_pair)
        if lhs != rhs:
            return False
    return True


def fgl_validate(F: FormalGroupLaw) -> FglValidationReport:
    report = FglValidationReport(
        unit_ok=_unit_sections_hold(F),
        comm_ok=_commutes(F),
        assoc_ok=_associates(F),
        max_degree_checked=F.trunc,
    )
    logger.debug("Validated %s-dimensional law over %s to degree %s: %s", F.dim, F.spec, F.trunc, report)
    return report


# -- invariant differentials -----------------------------------------------------


def _matrix_mul(a: list[list[TruncatedSeries]], b: list[list[TruncatedSeries]]) -> list[list[TruncatedSeries]]:
    n = len(a)
    return [
        [sum((series_mul(a[i][k], b[k][j]) for k in range(1, n)), series_mul(a[i][0], b[0][j])) for j in range(n)]
        for i in range(n)
    ]


def invariant_differential(F: FormalGroupLaw) -> InvariantForm:
    """The invariant form normalized to the identity at the origin.

    Its coefficient matrix is the inverse of J_ik(x) = dF_i/dy_k(x, 0); forms
    are known through degree trunc - 1.
    """
    d = F.dim
    xs = point_variables(d)
    ys = law_variables(d)[d:]
    jacobian = [
        [series_project(series_derivative(f, y), xs) for y in ys]
        for f in F.components
    ]
    for i, row in enumerate(jacobian):
        for k, entry in enumerate(row):
            if entry.constant_term != (F.spec.one if i == k else F.spec.zero):
                raise NonInvertibleJacobian(
                    f"dF/dy at the origin is not the identity (entry {i},{k} is {F.spec.format(entry.constant_term)})"
                )
    trunc = max(F.trunc - 1, 0)
    identity = [
        [TruncatedSeries.constant(F.spec, xs, trunc, int(i == k)) for k in range(d)] for i in range(d)
    ]
    # J = I - K with K of positive order, so J^-1 = I + K + K^2 + ... (finite)
    k_matrix = [[identity[i][k] - jacobian[i][k] for k in range(d)] for i in range(d)]
    inverse = identity
    for _ in range(trunc):
        inverse = [
            [identity[i][j] + entry for j, entry in enumerate(row)]
            for i, row in enumerate(_matrix_mul(k_matrix, inverse))
        ]
    return InvariantForm(F.spec, d, trunc, tuple(tuple(row) for row in inverse))


def check_invariance(F: FormalGroupLaw, omega: InvariantForm) -> bool:
    """m*w = pr1*w + pr2*w, compared coefficient-wise on dx_k and dy_k."""
    if omega.spec != F.spec or omega.dim != F.dim:
        raise SpecMismatch("Form and law must share ring and dimension")
    d = F.dim
    vars = law_variables(d)
    xs, ys = vars[:d], vars[d:]
    trunc = min(omega.trunc, F.trunc - 1)
    if trunc < 0:
        return True
    partials = [[series_derivative(f, v) for v in vars] for f in F.components]
    for row in omega.coeffs:
        pulled = [series_compose(g, list(F.components)) for g in row]
        for k in range(d):
            for offset, rename in ((0, {}), (d, _second_point(d, "y"))):
                lhs = pulled[0] * partials[0][offset + k]
                for i in range(1, d):
                    lhs = lhs + pulled[i] * partials[i][offset + k]
                rhs = series_embed(row[k], vars, rename)
                if not equal_to(lhs, rhs, min(trunc, lhs.trunc)):
                    return False
    return True


def form_is_closed(omega: InvariantForm, row: int = 0) -> bool:
    """dg_ji/dx_k == dg_jk/dx_i for the form w_row."""
    xs = point_variables(omega.dim)
    g = omega.coeffs[row]
    for i in range(omega.dim):
        for k in range(i + 1, omega.dim):
            if series_derivative(g[i], xs[k]) != series_derivative(g[k], xs[i]):
                return False
    return True


def integrate_form(omega: InvariantForm, row: int = 0) -> TruncatedSeries:
    """Potential P of a closed form with P(0) = 0.

    Uses P = sum_i x_i * int_0^1 g_i(tx) dt, so a coefficient landing on a
    monomial of total degree m is divided by m.
    """
    xs = point_variables(omega.dim)
    spec = omega.spec
    gathered: dict[tuple[int, ...], Any] = {}
    for i, g in enumerate(omega.coeffs[row]):
        for mon, c in g.poly.items():
            target = list(mon)
            target[i] += 1
            target = tuple(target)
            gathered[target] = gathered.get(target, spec.zero) + c
    terms = {mon: spec.divide_by_int(c, sum(mon)) for mon, c in gathered.items()}
    ring = series_ring(spec, xs)
    return TruncatedSeries(spec, xs, omega.trunc + 1, ring.from_dict(terms))


def invariant_form_space(F: FormalGroupLaw) -> list[TruncatedSeries]:
    """Basis (over Q) of all g(x) with g(x)dx invariant, for a one-dimensional law over Z or Q.

    Each basis vector is scaled so that its first nonzero coefficient is 1.
    """
    if F.dim != 1 or F.spec.kind not in (RingKind.INTEGERS, RingKind.RATIONALS):
        raise SpecMismatch("The invariant form space is computed for one-dimensional laws over Z or Q")
    rationals = RingSpec.rationals()
    F_q = fgl_base_change(F, rationals)
    trunc = F.trunc - 1
    vars = law_variables(1)
    f = F_q.components[0]
    dfx, dfy = series_derivative(f, "x"), series_derivative(f, "y")
    columns = []
    for e in range(trunc + 1):
        g = TruncatedSeries.from_terms(rationals, ("x",), trunc, {(e,): 1})
        pulled = series_compose(g, [f])
        residual_x = pulled * dfx - series_embed(g, vars)
        residual_y = pulled * dfy - series_embed(g, vars, {"x": "y"})
        columns.append((residual_x.truncated(trunc), residual_y.truncated(trunc)))
    monomials = sorted({mon for pair in columns for s in pair for mon in s.poly.keys()})
    rows = []
    for which in (0, 1):
        for mon in monomials:
            rows.append([QQ.to_sympy(pair[which].coeff(mon)) for pair in columns])
    if not rows:
        rows = [[0] * (trunc + 1)]
    basis = []
    for vector in Matrix(rows).nullspace():
        lead = next(v for v in vector if v != 0)
        basis.append(
            TruncatedSeries.from_terms(
                rationals, ("x",), trunc, {(e,): QQ.from_sympy(v / lead) for e, v in enumerate(vector)}
            )
        )
    logger.debug("Invariant form space over Q to degree %s has dimension %s", trunc, len(basis))
    return basis


# -- logarithms ---------------------------------------------------------------------


def fgl_log(F: FormalGroupLaw) -> list[TruncatedSeries]:
    """Integrate the invariant differential; logs are known through degree trunc."""
    omega = invariant_differential(F)
    return [integrate_form(omega, j) for j in range(F.dim)]


def fgl_from_log(logs: Sequence[TruncatedSeries]) -> FormalGroupLaw:
    """F(x, y) = l^-1(l(x) + l(y))."""
    if not logs:
        raise ArityMismatch("A logarithm needs at least one component")
    dim = len(logs)
    xs = point_variables(dim)
    spec, trunc = logs[0].spec, logs[0].trunc
    for ell, x in zip(logs, xs):
        if ell.vars != xs or ell.spec != spec or ell.trunc != trunc:
            raise SpecMismatch(f"Logarithm components must be series over {spec} in {xs} to degree {trunc}")
        linear = ell.homogeneous_part(1)
        if linear != TruncatedSeries.variable(spec, xs, trunc, x).homogeneous_part(1) or ell.constant_term:
            raise NotReversible(f"Logarithm component {ell} does not start with {x}")
    inverse = [series_reversion(logs[0])] if dim == 1 else system_reversion(logs)
    vars = law_variables(dim)
    rename = _second_point(dim, "y")
    sums = [series_embed(ell, vars) + series_embed(ell, vars, rename) for ell in logs]
    components = tuple(series_compose(g, sums) for g in inverse)
    return FormalGroupLaw(spec, dim, trunc, components)


def fgl_base_change(
    F: FormalGroupLaw,
    target: RingSpec,
    assignment: Mapping[str, Any] | None = None,
) -> FormalGroupLaw:
    hom = ring_hom(F.spec, target, assignment)
    components = tuple(series_map(f, target, hom) for f in F.components)
    return FormalGroupLaw(target, F.dim, F.trunc, components)


def form_from_coefficients(spec: RingSpec, trunc: int, coeffs: Sequence[Any]) -> InvariantForm:
    """One-dimensional form g(x)dx from the coefficients of g, constant first."""
    return InvariantForm(spec, 1, trunc, ((TruncatedSeries.from_coefficients(spec, trunc, coeffs),),))
