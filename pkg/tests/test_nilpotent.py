import pytest

from cartier_lab.errors import AlgebraMismatch, RingSpecError
from cartier_lab.nilpotent import (
    AlgebraMap,
    LambdaElement,
    NilpotentAlgebra,
    lambda_elements,
    lambda_exactness,
    lambda_inv,
    lambda_map,
    lambda_mul,
    square_zero_algebra,
    standard_extension,
    truncated_polynomial_algebra,
)
from cartier_lab.rings import RingSpec


def test_inverse_in_truncated_polynomial_algebra(Z):
    algebra = truncated_polynomial_algebra(Z, 2)
    u = LambdaElement.from_coefficients(algebra, [[1, 0]])
    inverse = lambda_inv(u)
    assert inverse.coeffs == ((-1, 0), (0, 1))
    assert lambda_mul(u, inverse) == LambdaElement.one(algebra)


def test_square_zero_product_is_one(Z):
    algebra = square_zero_algebra(Z, 1)
    u = LambdaElement.from_coefficients(algebra, [[1]])
    v = LambdaElement.from_coefficients(algebra, [[-1]])
    assert lambda_mul(u, v) == LambdaElement.one(algebra)


def test_product_of_higher_degree_elements():
    spec = RingSpec.integers_mod(5)
    algebra = truncated_polynomial_algebra(spec, 3)
    u = LambdaElement.from_coefficients(algebra, [[1, 0, 0], [0, 2, 0]])
    assert lambda_mul(u, lambda_inv(u)) == LambdaElement.one(algebra)
    assert u * LambdaElement.one(algebra) == u


def test_trailing_zeros_are_dropped(Z):
    algebra = square_zero_algebra(Z, 2)
    u = LambdaElement.from_coefficients(algebra, [[1, 0], [0, 0]])
    assert u.degree == 1


def test_structure_must_be_nilpotent(Z):
    with pytest.raises(AlgebraMismatch):
        NilpotentAlgebra.from_products(Z, 1, {(1, 1): [1]}, 3)


def test_structure_must_be_associative(Z):
    # (e1 e1) e2 = e2 e2 = e1 but e1 (e1 e2) = 0
    with pytest.raises(AlgebraMismatch):
        NilpotentAlgebra.from_products(Z, 2, {(1, 1): [0, 1], (2, 2): [1, 0]}, 4)


def test_algebra_maps_must_be_multiplicative(Z):
    source = truncated_polynomial_algebra(Z, 2)
    target = truncated_polynomial_algebra(Z, 2)
    with pytest.raises(AlgebraMismatch):
        AlgebraMap(source, target, ((1, 0), (1, 0)))


def test_lambda_map_is_coefficientwise(Z):
    inclusion, projection = standard_extension(Z, 3)
    u = LambdaElement.from_coefficients(inclusion.source, [[1, 0], [0, 1]])
    image = lambda_map(inclusion, u)
    assert image.coeffs == ((0, 1, 0), (0, 0, 1))
    assert lambda_map(projection, image) == LambdaElement.one(projection.target)


def test_elements_need_finite_coefficients(Z):
    with pytest.raises(RingSpecError):
        list(lambda_elements(square_zero_algebra(Z, 1), 1))


def test_enumeration_counts():
    algebra = square_zero_algebra(RingSpec.integers_mod(3), 1)
    assert len(list(lambda_elements(algebra, 2))) == 9


@pytest.mark.parametrize("modulus, rank", [(2, 2), (2, 3), (3, 2)])
def test_standard_extension_is_exact(modulus, rank):
    inclusion, projection = standard_extension(RingSpec.integers_mod(modulus), rank)
    report = lambda_exactness(inclusion, projection)
    assert report.ok
    assert report.ranks == (rank - 1, rank, 1)


def test_zero_projection_is_not_surjective():
    spec = RingSpec.integers_mod(2)
    inclusion, _ = standard_extension(spec, 2)
    quotient = square_zero_algebra(spec, 1)
    zero = AlgebraMap(inclusion.target, quotient, ((0,), (0,)))
    report = lambda_exactness(inclusion, zero)
    assert not report.surjective
    assert not report.ok
