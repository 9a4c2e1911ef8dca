"""Run manifests: data fingerprints plus JSON round-tripping.

A manifest records everything needed to reproduce a pipeline run
bit-for-bit: the seed, resampling sizes, tolerances, the resolved scale
candidates, and a fingerprint of the input matrix. Manifests are written
as sorted, indented JSON; floats survive the round trip exactly because
JSON serialization uses the shortest representation that parses back to
the same double.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

MANIFEST_FORMAT = "kpclust-manifest"
MANIFEST_VERSION = 1


def fingerprint_matrix(values) -> str:
    """SHA-256 over the shape and the little-endian float64 bytes."""
    v = np.ascontiguousarray(np.asarray(values, dtype=np.float64))
    digest = hashlib.sha256()
    digest.update(repr(v.shape).encode("ascii"))
    digest.update(v.astype("<f8", copy=False).tobytes())
    return digest.hexdigest()


def fingerprint_file(path) -> str:
    """SHA-256 of a file's raw bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def save_manifest(path, manifest: dict) -> None:
    text = json.dumps(manifest, indent=2, sort_keys=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def load_manifest(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if not isinstance(manifest, dict):
        raise ValueError(f"{path}: manifest must be a JSON object")
    if manifest.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"{path}: not a {MANIFEST_FORMAT} file")
    return manifest
