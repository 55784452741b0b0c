"""Shared JSON formats for matrices, vectors, and tabulated-oracle files.

A matrix is ``{"dim": d, "re": [[...]], "im": [[...]]}`` with row-major
d-by-d arrays; a vector is the same with flat length-d arrays.  A
tabulated oracle is a JSON list of ``{"vector": {...}, "value": p}``
records.  All loaders raise ``ValueError`` on malformed input so callers
can map them to a parse-error exit code.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "vector_to_json",
    "vector_from_json",
    "oracle_table_to_json",
    "oracle_table_from_json",
    "load_json",
    "dump_json",
]


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    return {"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValueError("matrix JSON must be an object")
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"matrix JSON missing or malformed field: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError(f"matrix JSON arrays are not {dim}x{dim}")
    return re + 1j * im


def vector_to_json(v: np.ndarray) -> dict:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    return {"dim": v.size, "re": v.real.tolist(), "im": v.imag.tolist()}


def vector_from_json(obj: dict) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValueError("vector JSON must be an object")
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"vector JSON missing or malformed field: {exc}") from exc
    if re.shape != (dim,) or im.shape != (dim,):
        raise ValueError(f"vector JSON arrays are not length {dim}")
    return re + 1j * im


def oracle_table_to_json(vectors: np.ndarray, values: np.ndarray) -> list:
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.complex128))
    values = np.asarray(values, dtype=float).reshape(-1)
    if vectors.shape[0] != values.size:
        raise ValueError("one value per vector required")
    return [
        {"vector": vector_to_json(vec), "value": float(val)}
        for vec, val in zip(vectors, values)
    ]


def oracle_table_from_json(obj: list) -> tuple[np.ndarray, np.ndarray]:
    if not isinstance(obj, list) or not obj:
        raise ValueError("oracle table JSON must be a nonempty list")
    vecs = []
    vals = []
    for i, rec in enumerate(obj):
        if not isinstance(rec, dict) or "vector" not in rec or "value" not in rec:
            raise ValueError(f"oracle table record {i} malformed")
        vecs.append(vector_from_json(rec["vector"]))
        vals.append(float(rec["value"]))
    dims = {v.size for v in vecs}
    if len(dims) != 1:
        raise ValueError("oracle table vectors have mixed dimensions")
    return np.vstack(vecs), np.asarray(vals, dtype=float)


def load_json(path: str | Path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc


def dump_json(obj, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
