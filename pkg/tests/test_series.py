import pytest

from cartier_lab.errors import (
    ArityMismatch,
    NonUnitConstantTerm,
    NonzeroConstantTerm,
    NotReversible,
    SpecMismatch,
    TruncationTooShort,
)
from cartier_lab.rings import RingSpec
from cartier_lab.series import (
    TruncatedSeries,
    equal_to,
    lagrange_reversion,
    series_compose,
    series_derivative,
    series_exp,
    series_inflate,
    series_integrate,
    series_invert,
    series_log1p,
    series_mul,
    series_reversion,
    system_reversion,
)


def series(spec, trunc, *coeffs):
    return TruncatedSeries.from_coefficients(spec, trunc, list(coeffs))


def test_product_is_truncated(Z):
    assert series_mul(series(Z, 2, 1, -2), series(Z, 2, 1, -3)) == series(Z, 2, 1, -5, 6)


def test_product_takes_the_smaller_truncation(Z):
    assert (series(Z, 5, 1, 1) * series(Z, 2, 1, 1)).trunc == 2


def test_geometric_inverse(Z):
    assert series_invert(series(Z, 3, 1, -1)) == series(Z, 3, 1, 1, 1, 1)


def test_fibonacci_inverse(Z):
    assert series_invert(series(Z, 2, 1, -1, -1)) == series(Z, 2, 1, 1, 2)


def test_inverse_needs_unit_constant_term(Z):
    with pytest.raises(NonUnitConstantTerm):
        series_invert(series(Z, 3, 2, 1))


def test_inverse_modulo_nine():
    spec = RingSpec.integers_mod(9)
    f = series(spec, 4, 2, 1, 5)
    assert f * series_invert(f) == TruncatedSeries.one(spec, ("x",), 4)


def test_reversion_of_catalan_type_series(Z):
    assert series_reversion(series(Z, 3, 0, 1, -1)) == series(Z, 3, 0, 1, 1, 2)


def test_reversion_of_log_is_exp_minus_one(Q):
    log1p = series(Q, 4, 0, 1, "-1/2", "1/3", "-1/4")
    assert series_reversion(log1p) == series(Q, 4, 0, 1, "1/2", "1/6", "1/24")


def test_reversion_of_multiplicative_log(Q):
    log = series(Q, 4, 0, 1, "1/2", "1/3", "1/4")
    assert series_reversion(log) == series(Q, 4, 0, 1, "-1/2", "1/6", "-1/24")


def test_lagrange_agrees_with_iterative_reversion(Q):
    f = series(Q, 6, 0, 2, 3, "-1/5", 7, 0, "1/2")
    assert lagrange_reversion(f) == series_reversion(f)


def test_reversion_needs_invertible_linear_term(Z):
    with pytest.raises(NotReversible):
        series_reversion(series(Z, 3, 0, 2, 1))
    with pytest.raises(NonzeroConstantTerm):
        series_reversion(series(Z, 3, 1, 1))


def test_integral(Q):
    assert series_integrate(series(Q, 2, 1, 1, 1)) == series(Q, 3, 0, 1, "1/2", "1/3")


def test_derivative_loses_one_degree(Z):
    d = series_derivative(series(Z, 3, 5, 1, 1, 1))
    assert d == series(Z, 2, 1, 2, 3)


def test_compose_with_square(Q):
    f = series(Q, 4, 0, 1, "1/2", "1/3", "1/4")
    x2 = TruncatedSeries.from_coefficients(Q, 8, [0, 0, 1])
    composed = series_compose(f, [x2])
    assert composed.trunc == 8
    assert composed == TruncatedSeries.from_coefficients(Q, 8, [0, 0, 1, 0, "1/2", 0, "1/3", 0, "1/4"])


def test_compose_checks_arity_and_constant_terms(Z):
    f = TruncatedSeries.parse(Z, ("x", "y"), 3, "x + y")
    u = series(Z, 3, 0, 1)
    with pytest.raises(ArityMismatch):
        series_compose(f, [u])
    with pytest.raises(NonzeroConstantTerm):
        series_compose(f, [u, series(Z, 3, 1, 1)])


def test_bivariate_compose_into_law(Z):
    law = TruncatedSeries.parse(Z, ("x", "y"), 4, "x + y - x*y")
    u = TruncatedSeries.parse(Z, ("u",), 4, "u")
    w = TruncatedSeries.parse(Z, ("u",), 4, "u**2")
    assert series_compose(law, [u, w]) == TruncatedSeries.parse(Z, ("u",), 4, "u + u**2 - u**3")


def test_exp_and_log1p_are_inverse(Q):
    u = series(Q, 6, 0, 3, "-1/2", 2)
    assert series_log1p(series_exp(u) - 1) == u


def test_log1p_of_minus_x(Q):
    expected = series(Q, 5, 0, -1, "-1/2", "-1/3", "-1/4", "-1/5")
    assert series_log1p(series(Q, 5, 0, -1)) == expected


def test_inflate_refuses_unknown_degrees(Z):
    f = series(Z, 2, 1, 1, 1)
    assert series_inflate(f, 2, 5) == TruncatedSeries.from_coefficients(Z, 5, [1, 0, 1, 0, 1])
    with pytest.raises(TruncationTooShort):
        series_inflate(f, 2, 6)


def test_equal_to_compares_low_degrees(Z):
    assert equal_to(series(Z, 3, 1, 1, 0, 5), series(Z, 3, 1, 1, 0, 7), 2)
    with pytest.raises(TruncationTooShort):
        equal_to(series(Z, 3, 1), series(Z, 2, 1), 3)


def test_mixed_rings_are_rejected(Z, Q):
    with pytest.raises(SpecMismatch):
        series(Z, 2, 1) + series(Q, 2, 1)


def test_system_reversion_of_coordinate_change(Q):
    vars = ("x1", "x2")
    fs = [
        TruncatedSeries.parse(Q, vars, 3, "x1 + x2**2"),
        TruncatedSeries.parse(Q, vars, 3, "x2 + x1*x2"),
    ]
    inverse = system_reversion(fs)
    identity = [TruncatedSeries.variable(Q, vars, 3, v) for v in vars]
    assert [series_compose(f, inverse) for f in fs] == identity


def _random_series(rng, spec, trunc, *leading):
    coeffs = [spec.from_int(c) for c in leading]
    coeffs += [spec.random(rng, 6) for _ in range(trunc + 1 - len(leading))]
    return TruncatedSeries.from_coefficients(spec, trunc, coeffs)


def test_composition_is_associative(rng, Z):
    for _ in range(20):
        f = _random_series(rng, Z, 8)
        g = _random_series(rng, Z, 8, 0)
        h = _random_series(rng, Z, 8, 0)
        left = series_compose(series_compose(f, [g]), [h])
        right = series_compose(f, [series_compose(g, [h])])
        assert left == right


@pytest.mark.parametrize("k", [1, 3, 5, 7])
def test_truncation_commutes_with_composition(rng, Z, k):
    for _ in range(10):
        f = _random_series(rng, Z, 8)
        g = _random_series(rng, Z, 8, 0)
        assert series_compose(f, [g]).truncated(k) == series_compose(f.truncated(k), [g.truncated(k)])


@pytest.mark.parametrize("text, leading", [("Z", 1), ("Z", -1), ("Z/9", 2), ("Q", 3)])
def test_reversion_is_a_two_sided_inverse(rng, text, leading):
    spec = RingSpec.parse(text)
    x = TruncatedSeries.variable(spec, ("x",), 8, "x")
    for _ in range(10):
        f = _random_series(rng, spec, 8, 0, leading)
        g = series_reversion(f)
        assert series_compose(f, [g]) == x
        assert series_compose(g, [f]) == x


def test_lagrange_reversion_is_a_left_inverse(rng, Q):
    x = TruncatedSeries.variable(Q, ("x",), 7, "x")
    f = _random_series(rng, Q, 7, 0, 1)
    assert series_compose(lagrange_reversion(f), [f]) == x
