import pytest

from cartier_lab.cartier import cartier_apply
from cartier_lab.verify import SUITES, SuiteResult, WittOperators, verify_all
from cartier_lab.witt import witt_scale


def test_selected_suites_pass():
    report = verify_all(seed=1, suites=["rings", "series", "lambda"], cases=3)
    assert [suite.suite for suite in report.suites] == ["rings", "series", "lambda"]
    assert report.ok
    assert report.failures == []
    assert report.cases == sum(suite.cases for suite in report.suites) > 0


@pytest.mark.parametrize("suite", ["fgl", "witt", "cartier", "legendre"])
def test_each_suite_passes(suite):
    report = verify_all(seed=7, suites=[suite], cases=2)
    assert report.ok, report.failures


def test_runs_are_reproducible():
    first = verify_all(seed=3, suites=["rings", "witt"], cases=2)
    second = verify_all(seed=3, suites=["rings", "witt"], cases=2)
    assert first.model_dump() == second.model_dump()


def test_timing_is_left_out_of_json():
    dumped = verify_all(seed=0, suites=["lambda"], cases=1).model_dump()
    assert "seconds" not in dumped
    assert "seconds" not in dumped["suites"][0]


def test_unknown_suite_is_rejected():
    with pytest.raises(ValueError):
        verify_all(suites=["rings", "topology"])


def test_every_suite_is_registered():
    assert SUITES == ("rings", "series", "fgl", "witt", "cartier", "lambda", "legendre")


def _doubling_apply(xi, a, k=None):
    """Cartier action that doubles V_n a for n > 1, breaking F_n V_n = n."""
    image = cartier_apply(xi, a, k)
    if len(xi.terms) == 1:
        (n, m), c = xi.terms[0]
        if n > 1 and m == 1 and c == xi.spec.one:
            return witt_scale(image, 2)
    return image


def test_injected_fault_is_reported_with_relation_name():
    ops = WittOperators(apply=_doubling_apply)
    report = verify_all(seed=0, suites=["cartier"], cases=1, ops=ops)
    assert not report.ok
    relations = {failure.relation for failure in report.failures}
    assert "F_nV_n" in relations
    failure = next(f for f in report.failures if f.relation == "F_nV_n")
    assert failure.expected != failure.actual
    assert "n" in failure.inputs


def test_suite_result_records_failures():
    result = SuiteResult(suite="demo")
    assert result.check("same", 1, 1)
    assert not result.check("different", 1, 2, x=5)
    assert result.cases == 2
    assert not result.ok
    assert result.failures[0].inputs == {"x": "5"}


def test_ghost_checks_have_their_own_case_count():
    few = verify_all(seed=2, suites=["witt"], cases=1, ghost_cases=1)
    more = verify_all(seed=2, suites=["witt"], cases=1, ghost_cases=4)
    assert few.ok and more.ok
    assert more.cases - few.cases == 2 * 3


def test_universal_frobenius_is_checked_at_every_length():
    report = verify_all(seed=5, suites=["witt"], cases=1, ghost_cases=1)
    assert report.ok
    # witt_length 8: n = 2 at lengths 1..4, n = 3 and n = 4 at lengths 1..2
    frobenius_checks = report.cases - 2 - 1 - 3
    assert frobenius_checks == 4 + 2 + 2


def test_series_suite_checks_reversion_on_both_sides():
    assert verify_all(seed=4, suites=["series"], cases=2).ok
