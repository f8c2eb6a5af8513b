import json

import pytest
from pydantic import ValidationError

from cartier_lab import codec
from cartier_lab.cartier import cartier_integer, cartier_normalize
from cartier_lab.congruence import central_binom_congruence, congruence_check, legendre_fgl
from cartier_lab.errors import ArityMismatch
from cartier_lab.formal_groups import fgl_additive, fgl_log, fgl_multiplicative
from cartier_lab.nilpotent import lambda_inv
from cartier_lab.rings import RingSpec
from cartier_lab.series import TruncatedSeries
from cartier_lab.witt import WittVector


def test_canonical_json_sorts_keys():
    assert codec.canonical_json({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}'


def test_series_payload_from_coefficients(Z):
    f = codec.SeriesPayload.model_validate({"coeffs": ["1", "-1"]}).build(Z, 3)
    assert f == TruncatedSeries.from_coefficients(Z, 3, [1, -1])


def test_series_payload_from_terms(Z):
    payload = codec.SeriesPayload.model_validate(
        {"vars": ["x", "y"], "terms": [{"exp": [1, 0], "coeff": 1}, {"exp": [1, 1], "coeff": "-1"}]}
    )
    assert payload.build(Z, 2) == TruncatedSeries.parse(Z, ("x", "y"), 2, "x - x*y")


@pytest.mark.parametrize("data", [{}, {"coeffs": [1], "expr": "x"}, {"coeffs": [1], "colour": "red"}])
def test_series_payload_rejects_bad_bodies(data):
    with pytest.raises(ValidationError):
        codec.SeriesPayload.model_validate(data)


def test_fgl_payload_round_trip(Q):
    payload = codec.FglPayload.model_validate({"components": ["x + y - x*y"]})
    F = payload.build(Q, 4)
    assert F.components == fgl_multiplicative(Q, 4).components
    encoded = codec.encode_fgl(F)
    assert encoded["dim"] == 1
    assert encoded["components"][0]["terms"][0] == {"exp": [1, 0], "coeff": "1"}


def test_witt_payload_checks_length(Z):
    payload = codec.WittPayload.model_validate({"b": ["-3", "0"]})
    assert payload.build(Z) == WittVector.from_coefficients(Z, [-3, 0])
    with pytest.raises(ValueError):
        payload.build(Z, 3)


def test_encode_witt(Z):
    a = WittVector.from_coefficients(RingSpec.integers_mod(9), [4, 8])
    assert codec.encode_witt(a) == {"ring": "Z/9", "k": 2, "b": ["4", "8"]}


def test_cartier_payload_needs_one_body():
    with pytest.raises(ValidationError):
        codec.CartierPayload.model_validate({})
    with pytest.raises(ValidationError):
        codec.CartierPayload.model_validate({"expr": "V2", "terms": []})


def test_cartier_payload_terms_are_normalized(Z):
    payload = codec.CartierPayload.model_validate({"terms": [{"n": 1, "m": 1, "a": 2}, {"n": 2, "m": 2, "a": "-1"}]})
    assert payload.build(Z, 3) == cartier_integer(2, Z, 3)
    assert payload.build(Z, 2) == cartier_integer(2, Z, 2)


def test_encode_cartier(Z):
    encoded = codec.encode_cartier(cartier_integer(2, Z, 3))
    assert encoded["terms"] == [{"n": 1, "m": 1, "a": "2"}, {"n": 2, "m": 2, "a": "-1"}]
    assert encoded["vbound"] == 3


def test_lambda_payload(Z):
    payload = codec.LambdaPayload.model_validate(
        {"algebra": {"rank": 2, "exponent": 3, "products": [{"i": 1, "j": 1, "value": [0, 1]}]}, "u": [[1, 0]]}
    )
    u, v = payload.build(Z)
    assert v is None
    assert codec.encode_lambda(lambda_inv(u))["u"] == [["-1", "0"], ["0", "1"]]


def test_encode_congruence():
    assert codec.encode_congruence(congruence_check(2)) == {"n": 2, "modulus": 3, "ok": True, "reduced": ["0", "0"]}


def test_decode_json_reads_files(tmp_path):
    path = tmp_path / "payload.json"
    path.write_text(json.dumps({"b": ["1"]}), encoding="utf-8")
    assert codec.decode_json(f"@{path}") == {"b": ["1"]}
    assert codec.decode_json('{"b": ["1"]}') == {"b": ["1"]}


def test_payload_ring_prefers_payload_key(Z):
    assert codec.payload_ring({"ring": "Z/9"}, Z) == RingSpec.integers_mod(9)
    assert codec.payload_ring({"b": []}, Z) == Z
    assert codec.payload_ring(["not", "a", "dict"], Z) == Z


# -- every encoder's output is accepted by its payload ------------------------------------


def _through_json(data):
    return json.loads(codec.dumps(data))


def test_univariate_series_encodes_sparse_terms(Q):
    f = TruncatedSeries.parse(Q, ("x",), 5, "x - x**3/3")
    encoded = codec.encode_series(f)
    assert "coeffs" not in encoded
    assert encoded["terms"] == [{"exp": [1], "coeff": "1"}, {"exp": [3], "coeff": "-1/3"}]
    assert codec.SeriesPayload.model_validate(_through_json(encoded)).build(Q, 1) == f


@pytest.mark.parametrize("build", [lambda: legendre_fgl(5), lambda: fgl_additive(RingSpec.rationals(), 2, 3)])
def test_encoded_law_is_accepted(build):
    F = build()
    encoded = _through_json(codec.encode_fgl(F))
    assert set(encoded) == {"ring", "dim", "trunc", "components"}
    rebuilt = codec.FglPayload.model_validate(encoded).build(RingSpec.parse(encoded["ring"]), 1)
    assert rebuilt.dim == F.dim
    assert rebuilt.trunc == F.trunc
    assert rebuilt.components == F.components


def test_encoded_logarithm_is_accepted():
    logs = fgl_log(legendre_fgl(5))
    encoded = _through_json(codec.encode_log(logs))
    spec = RingSpec.parse(encoded["ring"])
    assert codec.LogPayload.model_validate(encoded).build(spec, 1) == logs


def test_dim_must_match_component_count(Q):
    payload = codec.FglPayload.model_validate({"dim": 2, "components": ["x + y"]})
    with pytest.raises(ArityMismatch):
        payload.build(Q, 3)
    with pytest.raises(ValidationError):
        codec.FglPayload.model_validate({"dim": 0, "components": ["x + y"]})


def test_encoded_cartier_element_is_accepted(Z):
    xi = cartier_normalize("V2 [3] F2 + 5 - F3", Z, 7)
    encoded = _through_json(codec.encode_cartier(xi))
    assert set(encoded) == {"ring", "vbound", "terms"}
    assert codec.CartierPayload.model_validate(encoded).build(Z, 13) == xi


def test_encoded_witt_vector_is_accepted():
    spec = RingSpec.parse("Z/9[l]")
    a = WittVector.from_coefficients(spec, [spec.parse_text("l + 2"), 0, spec.parse_text("3*l**2")])
    encoded = _through_json(codec.encode_witt(a))
    assert codec.WittPayload.model_validate(encoded).build(spec) == a


def test_encoded_lambda_element_is_accepted(Z):
    payload = codec.LambdaPayload.model_validate(
        {"algebra": {"rank": 2, "exponent": 3, "products": [{"i": 1, "j": 1, "value": [0, 1]}]}, "u": [[2, 1]]}
    )
    u, _ = payload.build(Z)
    encoded = _through_json(codec.encode_lambda(lambda_inv(u)))
    again, _ = codec.LambdaPayload.model_validate(encoded).build(Z)
    assert again == lambda_inv(u)
    assert lambda_inv(again) == u


def test_reports_encode_residues_as_strings():
    assert codec.encode_congruence(central_binom_congruence(8))["value"] == "7"
    sweep_check = codec.encode_congruence(congruence_check(4))
    assert sweep_check["n"] == 4 and sweep_check["modulus"] == 5
    assert all(isinstance(r, str) for r in sweep_check["reduced"])
