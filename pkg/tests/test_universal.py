import pytest

from cartier_lab.errors import CeilingExceeded, NotTorsionFree
from cartier_lab.rings import RingSpec
from cartier_lab.universal import (
    derive_universal_polynomials,
    from_ghost_components,
    ghost_components,
    universal_cache_info,
)
from cartier_lab.witt import WittVector, frobenius


def test_ghost_components_of_small_vector(Z):
    b = [Z.from_int(-1), Z.from_int(-1)]
    assert ghost_components(Z, b) == [1, 3]


def test_from_ghost_inverts_ghost(Z):
    w = [Z.from_int(2), Z.from_int(12)]
    assert from_ghost_components(Z, w) == [-2, -4]


def test_from_ghost_reports_missing_preimage(Z):
    with pytest.raises(NotTorsionFree):
        from_ghost_components(Z, [Z.from_int(0), Z.from_int(1)])


def test_mul_at_length_one():
    family = derive_universal_polynomials("mul", 1)
    assert family.inputs == ("b1", "c1")
    assert family.polynomials == (family.spec.parse_text("-b1*c1"),)


def test_add_is_the_series_product():
    family = derive_universal_polynomials("add", 2)
    b1_c1 = family.spec.parse_text("b1 + c1")
    assert family.polynomials[0] == b1_c1
    assert family.polynomials[1] == family.spec.parse_text("b2 + b1*c1 + c2")


def test_polynomials_have_integer_coefficients():
    family = derive_universal_polynomials("mul", 4)
    assert family.spec == RingSpec.parse("Z[b1,b2,b3,b4,c1,c2,c3,c4]")
    assert family.term_count > 0


def test_frobenius_family_evaluates_on_teichmuller():
    family = derive_universal_polynomials("frobenius", 2, 2)
    assert family.inputs == ("b1", "b2", "b3", "b4")
    target = RingSpec.integers_mod(9)
    values = dict(zip(family.inputs, [target.from_int(-2), 0, 0, 0]))
    assert [target.residue(c) for c in family.evaluate(target, values)] == [target.residue(target.from_int(-4)), 0]


def test_ceiling_is_enforced():
    with pytest.raises(CeilingExceeded):
        derive_universal_polynomials("add", 3, ceiling=2)


def test_unknown_operation():
    with pytest.raises(ValueError):
        derive_universal_polynomials("sub", 2)


def test_families_are_memoized():
    derive_universal_polynomials("add", 3)
    hits = universal_cache_info().hits
    derive_universal_polynomials("add", 3)
    assert universal_cache_info().hits == hits + 1


def test_json_export_lists_inputs():
    payload = derive_universal_polynomials("mul", 1).to_json()
    assert payload["op"] == "mul"
    assert payload["inputs"] == ["b1", "c1"]
    assert payload["polynomials"] == [[{"exp": [1, 1], "coeff": "-1"}]]


@pytest.mark.parametrize("n, length", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (4, 1), (4, 2)])
def test_frobenius_family_matches_frobenius_at_every_length(rng, Z, n, length):
    family = derive_universal_polynomials("frobenius", length, n)
    assert len(family.inputs) == n * length
    for _ in range(5):
        a = WittVector.from_coefficients(Z, [Z.random(rng) for _ in range(n * length)])
        values = dict(zip(family.inputs, a.b))
        assert list(family.evaluate(Z, values)) == frobenius(n, a).b
