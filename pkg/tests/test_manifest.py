"""Tests for fingerprints and manifest JSON round-tripping."""

import hashlib
import json

import numpy as np
import pytest

from kpclust.manifest import (
    MANIFEST_FORMAT,
    fingerprint_file,
    fingerprint_matrix,
    load_manifest,
    save_manifest,
)


def test_fingerprint_matrix_is_deterministic_and_sensitive():
    a = np.arange(12.0).reshape(3, 4)
    assert fingerprint_matrix(a) == fingerprint_matrix(a.copy())
    assert len(fingerprint_matrix(a)) == 64
    bumped = a.copy()
    bumped[0, 0] += 1e-12
    assert fingerprint_matrix(bumped) != fingerprint_matrix(a)


def test_fingerprint_matrix_distinguishes_shape():
    a = np.arange(12.0).reshape(3, 4)
    assert fingerprint_matrix(a) != fingerprint_matrix(a.reshape(4, 3))
    assert fingerprint_matrix(a) != fingerprint_matrix(a.T)


def test_fingerprint_matrix_coerces_dtype_and_layout():
    ints = np.arange(12).reshape(3, 4)
    floats = np.arange(12.0).reshape(3, 4)
    assert fingerprint_matrix(ints) == fingerprint_matrix(floats)
    fortran = np.asfortranarray(floats)
    assert fingerprint_matrix(fortran) == fingerprint_matrix(floats)


def test_fingerprint_file_matches_direct_hash(tmp_path):
    path = tmp_path / "blob.bin"
    payload = bytes(range(256)) * 10
    path.write_bytes(payload)
    assert fingerprint_file(path) == hashlib.sha256(payload).hexdigest()


def test_manifest_round_trip_preserves_floats(tmp_path):
    manifest = {
        "format": MANIFEST_FORMAT,
        "version": 1,
        "values": [0.1, 1e-300, 1.0 / 3.0, 0.018853],
        "nested": {"alpha": 0.05, "ids": ["a", "b"]},
    }
    path = tmp_path / "manifest.json"
    save_manifest(path, manifest)
    assert load_manifest(path) == manifest
    # byte-stable across repeated saves
    first = path.read_bytes()
    save_manifest(path, manifest)
    assert path.read_bytes() == first


def test_load_manifest_rejects_other_json(tmp_path):
    path = tmp_path / "other.json"
    path.write_text(json.dumps({"format": "something-else"}), encoding="utf-8")
    with pytest.raises(ValueError):
        load_manifest(path)
    path.write_text(json.dumps([1, 2, 3]), encoding="utf-8")
    with pytest.raises(ValueError):
        load_manifest(path)
