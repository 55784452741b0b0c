"""Shared JSON matrix/vector/table formats."""

import numpy as np
import pytest

from gleason.serialize import (
    dump_json,
    load_json,
    matrix_from_json,
    matrix_to_json,
    oracle_table_from_json,
    oracle_table_to_json,
    vector_from_json,
    vector_to_json,
)


def test_matrix_round_trip():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    again = matrix_from_json(matrix_to_json(m))
    assert np.array_equal(again, m)


def test_vector_round_trip():
    v = np.array([0.5, -0.25 + 1j, 0.0])
    assert np.array_equal(vector_from_json(vector_to_json(v)), v)


def test_matrix_schema_fields():
    payload = matrix_to_json(np.eye(2))
    assert payload["dim"] == 2
    assert payload["re"] == [[1.0, 0.0], [0.0, 1.0]]
    assert payload["im"] == [[0.0, 0.0], [0.0, 0.0]]


@pytest.mark.parametrize(
    "broken",
    [
        {"dim": 2, "re": [[1, 0], [0, 1]]},  # missing im
        {"dim": 3, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]},  # wrong dim
        [1, 2, 3],
        "nope",
    ],
)
def test_matrix_malformed(broken):
    with pytest.raises(ValueError):
        matrix_from_json(broken)


def test_oracle_table_round_trip():
    rng = np.random.default_rng(1)
    vecs = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    vals = rng.random(4)
    back_v, back_p = oracle_table_from_json(oracle_table_to_json(vecs, vals))
    assert np.array_equal(back_v, vecs)
    assert np.array_equal(back_p, vals)


def test_oracle_table_rejects_mixed_dims():
    records = [
        {"vector": vector_to_json(np.ones(2) / np.sqrt(2)), "value": 0.5},
        {"vector": vector_to_json(np.ones(3) / np.sqrt(3)), "value": 0.5},
    ]
    with pytest.raises(ValueError):
        oracle_table_from_json(records)


def test_load_json_reports_parse_errors(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ValueError):
        load_json(path)


def test_dump_and_load(tmp_path):
    path = tmp_path / "m.json"
    m = np.diag([0.25, 0.75]).astype(complex)
    dump_json(matrix_to_json(m), path)
    assert np.array_equal(matrix_from_json(load_json(path)), m)
