"""On-disk dataset container: JSON manifest plus checksummed binary blobs.

A dataset directory holds `manifest.json`, `fields.bin` (little-endian
float32, sample-major, row-major within each sample) and `builds.bin`
(same encoding).  The manifest records shapes, variable/row names,
provenance (oracle config hash, seed) and a SHA-256 per blob; reads verify
the checksums.
"""

import hashlib
import json
import os
from dataclasses import dataclass

import numpy as np

from ..errors import DataError, IntegrityError
from ..oracle.geometry import VARIABLES, row_names
from .build import BuildInput

SCHEMA_VERSION = 1
MANIFEST = "manifest.json"
FIELDS_BLOB = "fields.bin"
BUILDS_BLOB = "builds.bin"


@dataclass
class Dataset:
    fields: np.ndarray        # (n, 6, P, R, T) float32
    builds: list              # [BuildInput] * n
    overall_eta_p: np.ndarray  # (n,) float64
    overall_mdot: np.ndarray   # (n,) float64
    seed: int
    oracle_hash: str

    def __len__(self):
        return self.fields.shape[0]

    @property
    def field_shape(self):
        return self.fields.shape[1:]


def _sha256(data):
    return hashlib.sha256(data).hexdigest()


def write_dataset(ds, path):
    os.makedirs(path, exist_ok=True)
    fields = np.ascontiguousarray(ds.fields, dtype="<f4")
    builds = np.stack([b.to_array() for b in ds.builds]).astype("<f4")
    field_bytes = fields.tobytes()
    build_bytes = builds.tobytes()
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "n_samples": len(ds),
        "field_shape": list(ds.field_shape),
        "build_shape": [builds.shape[1]],
        "variable_names": list(VARIABLES),
        "row_names": row_names(),
        "seed": ds.seed,
        "oracle_hash": ds.oracle_hash,
        "overall_eta_p": [float(v) for v in ds.overall_eta_p],
        "overall_mdot": [float(v) for v in ds.overall_mdot],
        "sha256": {FIELDS_BLOB: _sha256(field_bytes),
                   BUILDS_BLOB: _sha256(build_bytes)},
    }
    with open(os.path.join(path, FIELDS_BLOB), "wb") as f:
        f.write(field_bytes)
    with open(os.path.join(path, BUILDS_BLOB), "wb") as f:
        f.write(build_bytes)
    with open(os.path.join(path, MANIFEST), "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)


def _read_blob(path, name, expected_sha):
    blob_path = os.path.join(path, name)
    try:
        with open(blob_path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise DataError(f"cannot read blob {blob_path}: {e}") from e
    if _sha256(data) != expected_sha:
        raise IntegrityError(f"checksum mismatch for {name}", filename=name)
    return data


def read_dataset(path):
    manifest_path = os.path.join(path, MANIFEST)
    try:
        with open(manifest_path) as f:
            manifest = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"cannot read manifest {manifest_path}: {e}") from e
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise DataError(
            f"unknown dataset schema version {manifest.get('schema_version')!r}")
    n = manifest["n_samples"]
    field_shape = tuple(manifest["field_shape"])
    build_len = manifest["build_shape"][0]
    if list(manifest["variable_names"]) != list(VARIABLES):
        raise DataError("dataset variable order does not match this build")

    data = _read_blob(path, FIELDS_BLOB, manifest["sha256"][FIELDS_BLOB])
    fields = np.frombuffer(data, dtype="<f4")
    if fields.size != n * int(np.prod(field_shape)):
        raise DataError(
            f"fields.bin holds {fields.size} values, manifest implies "
            f"{n * int(np.prod(field_shape))}")
    fields = fields.reshape((n,) + field_shape).copy()

    data = _read_blob(path, BUILDS_BLOB, manifest["sha256"][BUILDS_BLOB])
    builds_arr = np.frombuffer(data, dtype="<f4")
    if builds_arr.size != n * build_len:
        raise DataError("builds.bin size does not match the manifest")
    if build_len != BuildInput.array_length():
        raise DataError(f"unsupported build encoding of length {build_len}")
    builds = [BuildInput.from_array(row)
              for row in builds_arr.reshape(n, build_len)]

    return Dataset(fields=fields, builds=builds,
                   overall_eta_p=np.asarray(manifest["overall_eta_p"], float),
                   overall_mdot=np.asarray(manifest["overall_mdot"], float),
                   seed=manifest["seed"], oracle_hash=manifest["oracle_hash"])
