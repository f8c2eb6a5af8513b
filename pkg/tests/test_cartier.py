import pytest

from cartier_lab.cartier import (
    CartierElement,
    action_truncation,
    cartier_add,
    cartier_apply,
    cartier_apply_ga,
    cartier_frobenius,
    cartier_from_terms,
    cartier_integer,
    cartier_mul,
    cartier_neg,
    cartier_normalize,
    cartier_teichmuller,
    cartier_verschiebung,
    cartier_zero,
    parse_expression,
)
from cartier_lab.errors import ExpressionSyntaxError, SpecMismatch, TruncationTooShort, VBoundTooSmall
from cartier_lab.rings import RingSpec, RingValue
from cartier_lab.series import TruncatedSeries
from cartier_lab.witt import WittVector, teichmuller_defect, witt_add, witt_neg, witt_truncate


def vec(spec, *b):
    return WittVector.from_coefficients(spec, list(b))


def test_integer_two_in_canonical_form(Z):
    two = cartier_integer(2, Z, 4)
    assert two.terms == (((1, 1), 2), ((2, 2), -1), ((3, 3), -2))


def test_frobenius_after_verschiebung_normalizes_to_integer(Z):
    assert cartier_normalize("F2 V2", Z, 4) == cartier_integer(2, Z, 4)
    assert cartier_normalize("F2 V2", Z, 4) == cartier_normalize("2", Z, 4)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_frobenius_verschiebung_over_finite_ring(n):
    spec = RingSpec.integers_mod(360)
    assert cartier_normalize(f"F{n} V{n}", spec, 13) == cartier_integer(n, spec, 13)


def test_coprime_frobenius_and_verschiebung_commute(Z):
    xi = cartier_normalize("F2 V3", Z, 7)
    assert xi.terms == (((3, 2), 1),)
    assert cartier_normalize("V3 F2", Z, 7) == xi


def test_left_and_right_association_agree(Z):
    expr = "V2 [3] F2 + F3 V2 - [2]"
    assert cartier_normalize(expr, Z, 9, "left") == cartier_normalize(expr, Z, 9, "right")


def test_teichmuller_sum_has_defect():
    spec = RingSpec.parse("Z[c1,c2]")
    xi = cartier_normalize("[c1 + c2] - [c1] - [c2]", spec, 4)
    c1, c2 = (RingValue(spec, spec.parse_text(v)) for v in ("c1", "c2"))
    defect = teichmuller_defect(c1, c2, 3)
    assert xi.coefficient(1, 1).is_zero()
    assert xi.coefficient(2, 2) == defect[1]
    assert xi.coefficient(3, 3) == defect[2]


def test_teichmuller_multiplication(Z):
    assert cartier_normalize("[2] [3]", Z, 5) == cartier_teichmuller(6, Z, 5)


def test_teichmuller_passes_verschiebung(Z):
    assert cartier_normalize("[2] V3", Z, 7) == cartier_normalize("V3 [8]", Z, 7)


def test_add_and_neg_cancel(Z):
    xi = cartier_from_terms(Z, 6, {(2, 1): 5, (1, 3): -2})
    assert cartier_add(xi, cartier_neg(xi)) == cartier_zero(Z, 6)
    assert (xi - xi).is_zero()


def test_mul_by_one_is_identity(Z):
    xi = cartier_from_terms(Z, 6, {(2, 1): 5, (1, 3): -2})
    assert cartier_mul(cartier_integer(1, Z, 6), xi) == xi


def test_terms_beyond_vbound_are_dropped(Z):
    assert cartier_verschiebung(5, Z, 5).is_zero()
    assert not cartier_verschiebung(4, Z, 5).is_zero()


def test_vbound_must_be_at_least_two(Z):
    with pytest.raises(VBoundTooSmall):
        cartier_zero(Z, 1)


def test_canonical_form_stores_no_zero(Z):
    with pytest.raises(SpecMismatch):
        CartierElement(Z, 4, (((1, 1), 0),))


def test_text_form(Z):
    assert str(cartier_normalize("V2 F3", Z, 4)) == "V2[1]F3"
    assert str(cartier_zero(Z, 4)) == "0"


@pytest.mark.parametrize("text", ["", "F2 +", "V", "(V2", "V0", "[]", "F2 ) V3"])
def test_parse_errors(text):
    with pytest.raises(ExpressionSyntaxError):
        parse_expression(text)


def test_apply_verschiebung(Z):
    xi = cartier_verschiebung(2, Z, 13)
    assert cartier_apply(xi, vec(Z, -3, 0, 0, 0)) == vec(Z, 0, -3, 0, 0)


def test_apply_teichmuller(Z):
    xi = cartier_teichmuller(5, Z, 13)
    assert cartier_apply(xi, vec(Z, -1, 0, 0)) == vec(Z, -5, 0, 0)


def test_apply_frobenius_shortens(Z):
    xi = cartier_frobenius(2, Z, 13)
    result = cartier_apply(xi, vec(Z, -3, 0, 0, 0))
    assert result == vec(Z, -9, 0)


def test_apply_refuses_undetermined_lengths(Z):
    xi = cartier_frobenius(2, Z, 13)
    with pytest.raises(TruncationTooShort):
        cartier_apply(xi, vec(Z, -3, 0, 0, 0), 3)


def test_additive_group_frobenius(Z):
    xi = cartier_frobenius(2, Z, 13)
    g = TruncatedSeries.from_coefficients(Z, 4, [0, 0, 0, 0, 3])
    assert cartier_apply_ga(xi, g) == TruncatedSeries.from_coefficients(Z, 2, [0, 0, 6])
    odd = TruncatedSeries.from_coefficients(Z, 3, [0, 0, 0, 3])
    assert cartier_apply_ga(xi, odd).is_zero()


def test_additive_group_teichmuller(Z):
    g = TruncatedSeries.from_coefficients(Z, 2, [0, 1, 1])
    result = cartier_apply_ga(cartier_teichmuller(3, Z, 13), g)
    assert result == TruncatedSeries.from_coefficients(Z, 2, [0, 3, 9])


_FACTORS = ("V2", "V3", "F2", "F3", "[2]", "[3]", "[-1]", "2", "3")


def _frobenius_weight(word):
    weight = 1
    for factor in word:
        if factor.startswith("F"):
            weight *= int(factor[1:])
    return weight


def _random_expression(rng):
    summands = []
    count = rng.randint(1, 3)
    while len(summands) < count:
        word = [rng.choice(_FACTORS) for _ in range(rng.randint(1, 3))]
        if _frobenius_weight(word) <= 8:
            summands.append((rng.choice("+-"), word))
    return summands


def _act_by_word(word, spec, a):
    for factor in reversed(word):
        a = cartier_apply(cartier_normalize(factor, spec, 9), a)
    return a


@pytest.mark.parametrize("text", ["Z", "Z/12"])
def test_normal_form_is_confluent_on_random_words(rng, text):
    spec = RingSpec.parse(text)
    for _ in range(25):
        summands = _random_expression(rng)
        expr = " ".join(f"{sign} {' '.join(word)}" for sign, word in summands).removeprefix("+ ")
        left = cartier_normalize(expr, spec, 9, "left")
        assert cartier_normalize(expr, spec, 9, "right") == left, expr

        a = WittVector.from_coefficients(spec, [spec.random(rng) for _ in range(8)])
        images = [_act_by_word(word, spec, a) for _, word in summands]
        direct_length = action_truncation(left, a.k)
        length = min([direct_length] + [image.k for image in images])
        if not length:
            continue
        total = WittVector.one(spec, length)
        for (sign, _), image in zip(summands, images):
            image = witt_truncate(image, length)
            total = witt_add(total, image if sign == "+" else witt_neg(image))
        assert witt_truncate(cartier_apply(left, a, direct_length), length) == total, expr
