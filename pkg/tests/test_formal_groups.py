import pytest

from cartier_lab.errors import NonInvertibleJacobian, NotReversible, SpecMismatch
from cartier_lab.formal_groups import (
    FormalGroupLaw,
    InvariantForm,
    check_invariance,
    fgl_additive,
    fgl_base_change,
    fgl_from_log,
    fgl_log,
    fgl_multiplicative,
    fgl_validate,
    form_from_coefficients,
    form_is_closed,
    invariant_differential,
    invariant_form_space,
)
from cartier_lab.rings import RingSpec
from cartier_lab.series import TruncatedSeries, series_derivative


@pytest.mark.parametrize("trunc", [2, 5])
def test_standard_laws_validate(Q, trunc):
    for F in (fgl_additive(Q, 1, trunc), fgl_multiplicative(Q, trunc), fgl_additive(Q, 2, trunc)):
        report = fgl_validate(F)
        assert report.ok
        assert report.max_degree_checked == trunc


def test_multiplicative_law_validates_over_finite_ring():
    assert fgl_validate(fgl_multiplicative(RingSpec.integers_mod(4), 4)).ok


def test_unit_failure_is_reported(Q):
    report = fgl_validate(FormalGroupLaw.parse(Q, 4, ["x + y + x**2"]))
    assert not report.unit_ok
    assert not report.ok


def test_commutativity_failure_is_reported(Q):
    report = fgl_validate(FormalGroupLaw.parse(Q, 3, ["x + y + x**2*y"]))
    assert report.unit_ok
    assert not report.comm_ok


def test_associativity_failure_is_reported(Q):
    report = fgl_validate(FormalGroupLaw.parse(Q, 4, ["x + y + x**2*y**2"]))
    assert report.unit_ok and report.comm_ok
    assert not report.assoc_ok


def test_invariant_differential_of_multiplicative_law(Z):
    omega = invariant_differential(fgl_multiplicative(Z, 6))
    assert omega.trunc == 5
    (row,) = omega.coeffs
    assert row[0] == TruncatedSeries.from_coefficients(Z, 5, [1] * 6)
    assert omega.at_origin_is_identity()
    assert form_is_closed(omega)


def test_invariant_differential_needs_identity_jacobian(Z):
    with pytest.raises(NonInvertibleJacobian):
        invariant_differential(FormalGroupLaw.parse(Z, 3, ["2*x + 2*y"]))


def test_dx_is_not_invariant_for_multiplicative_law(Q):
    F = fgl_multiplicative(Q, 5)
    assert not check_invariance(F, form_from_coefficients(Q, 4, [1]))
    assert check_invariance(F, form_from_coefficients(Q, 4, [1] * 5))
    assert check_invariance(F, invariant_differential(F))


def test_invariant_form_space_is_one_dimensional(Z, Q):
    (basis,) = invariant_form_space(fgl_multiplicative(Z, 5))
    assert basis == TruncatedSeries.from_coefficients(Q, 4, [1] * 5)


def test_log_of_multiplicative_law(Q):
    (log,) = fgl_log(fgl_multiplicative(Q, 5))
    assert log == TruncatedSeries.from_coefficients(Q, 5, [0, 1, "1/2", "1/3", "1/4", "1/5"])


def test_from_log_recovers_multiplicative_law(Q):
    log = TruncatedSeries.from_coefficients(Q, 5, [0, 1, "1/2", "1/3", "1/4", "1/5"])
    assert fgl_from_log([log]).components == fgl_multiplicative(Q, 5).components


def test_from_identity_log_is_additive(Q):
    x = TruncatedSeries.variable(Q, ("x",), 4, "x")
    assert fgl_from_log([x]).components == fgl_additive(Q, 1, 4).components

    xs = ("x1", "x2")
    logs = [TruncatedSeries.variable(Q, xs, 3, v) for v in xs]
    assert fgl_from_log(logs).components == fgl_additive(Q, 2, 3).components


def test_two_dimensional_log_round_trip(Q):
    xs = ("x1", "x2")
    logs = [
        TruncatedSeries.parse(Q, xs, 4, "x1 + x2**2/2"),
        TruncatedSeries.parse(Q, xs, 4, "x2 + x1**3/3"),
    ]
    F = fgl_from_log(logs)
    assert fgl_validate(F).ok
    assert fgl_log(F) == logs


def test_from_log_needs_coordinate_linear_term(Q):
    with pytest.raises(NotReversible):
        fgl_from_log([TruncatedSeries.from_coefficients(Q, 3, [0, 2, 1])])


def test_base_change_to_finite_ring(Z):
    target = RingSpec.integers_mod(7)
    G = fgl_base_change(fgl_multiplicative(Z, 5), target)
    assert G.components == fgl_multiplicative(target, 5).components


def test_base_change_evaluates_parameters():
    spec = RingSpec.parse("Z[a]")
    F = FormalGroupLaw.parse(spec, 3, ["x + y - a*x*y"])
    G = fgl_base_change(F, RingSpec.integers_mod(3), {"a": 2})
    assert G.components == FormalGroupLaw.parse(RingSpec.integers_mod(3), 3, ["x + y + x*y"]).components


def test_components_must_match_declared_ring(Z, Q):
    with pytest.raises(SpecMismatch):
        FormalGroupLaw(Z, 1, 3, (TruncatedSeries.parse(Q, ("x", "y"), 3, "x + y"),))


def test_two_dimensional_invariant_form_is_closed(Q):
    xs = ("x1", "x2")
    logs = [TruncatedSeries.parse(Q, xs, 4, text) for text in ("x1 + x1*x2", "x2 + x1**2")]
    omega = invariant_differential(fgl_from_log(logs))
    assert omega.dim == 2 and omega.trunc == 3
    for row in range(2):
        assert form_is_closed(omega, row)
        for i, x in enumerate(xs):
            assert omega.coeffs[row][i] == series_derivative(logs[row], x)


def test_form_with_mixed_partials_is_not_closed(Q):
    xs = ("x1", "x2")

    def g(text):
        return TruncatedSeries.parse(Q, xs, 3, text)

    omega = InvariantForm(Q, 2, 3, ((g("1"), g("x1")), (g("0"), g("1"))))
    assert not form_is_closed(omega, 0)
    assert form_is_closed(omega, 1)
