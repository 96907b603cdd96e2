"""Checkpoint serialization: JSON manifest plus float32 parameter blobs.

A checkpoint directory carries everything the deployed predictor needs:
architecture config, all parameters and batch-norm running statistics
(little-endian float32, one hashed blob region per tensor), input/output
normalization statistics, the oracle configuration, and training metadata.
A reloaded model reproduces the saved model's outputs bit-identically.
"""

import hashlib
import json
import os

import numpy as np

from ..errors import ConfigError, DataError, IntegrityError
from .build import ArchitectureConfig, build_model

FORMAT_VERSION = 1
MANIFEST = "checkpoint.json"
BLOB = "params.bin"


def _tensor_entries(model, extra_tensors=None):
    entries = [(p.name, "param", p.data) for p in model.params()]
    entries += [(name, "buffer", arr) for name, arr in model.buffers()]
    for name, arr in (extra_tensors or {}).items():
        entries.append((name, "extra", arr))
    return entries


def save_checkpoint(path, model, arch_config, input_stats, output_stats,
                    metadata=None, extra_tensors=None):
    os.makedirs(path, exist_ok=True)
    chunks = []
    index = []
    offset = 0
    for name, kind, arr in _tensor_entries(model, extra_tensors):
        raw = np.ascontiguousarray(arr, dtype="<f4").tobytes()
        index.append({"name": name, "kind": kind,
                      "shape": list(arr.shape), "offset": offset,
                      "nbytes": len(raw),
                      "sha256": hashlib.sha256(raw).hexdigest()})
        chunks.append(raw)
        offset += len(raw)
    blob = b"".join(chunks)
    manifest = {
        "format_version": FORMAT_VERSION,
        "architecture": arch_config.to_dict(),
        "normalization": {"input": input_stats.to_dict(),
                          "output": output_stats.to_dict()},
        "metadata": metadata or {},
        "tensors": index,
        "model_id": hashlib.sha256(blob).hexdigest()[:16],
    }
    with open(os.path.join(path, BLOB), "wb") as f:
        f.write(blob)
    with open(os.path.join(path, MANIFEST), "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
    return manifest["model_id"]


def load_checkpoint(path):
    """Returns (model, arch_config, input_stats, output_stats, manifest);
    manifest["extra_tensors"] maps any extra tensor names to arrays."""
    from ..datasets.normalize import NormStats

    manifest_path = os.path.join(path, MANIFEST)
    try:
        with open(manifest_path) as f:
            manifest = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"cannot read checkpoint manifest {manifest_path}: {e}") from e
    if manifest.get("format_version") != FORMAT_VERSION:
        raise DataError(
            f"unsupported checkpoint format {manifest.get('format_version')!r}")
    arch = ArchitectureConfig.from_dict(manifest["architecture"])
    model = build_model(arch, seed=0)

    try:
        with open(os.path.join(path, BLOB), "rb") as f:
            blob = f.read()
    except OSError as e:
        raise DataError(f"cannot read checkpoint blob: {e}") from e
    if hashlib.sha256(blob).hexdigest()[:16] != manifest["model_id"]:
        raise IntegrityError("checkpoint blob does not match model_id",
                             filename=BLOB)

    targets = {name: (kind, arr) for name, kind, arr in _tensor_entries(model)}
    listed = {e["name"] for e in manifest["tensors"] if e["kind"] != "extra"}
    if listed != set(targets):
        missing = sorted(set(targets) - listed)[:3]
        extra = sorted(listed - set(targets))[:3]
        raise ConfigError(
            "checkpoint does not match the declared architecture "
            f"(missing {missing}, unexpected {extra})")
    extras = {}
    for entry in manifest["tensors"]:
        raw = blob[entry["offset"]:entry["offset"] + entry["nbytes"]]
        if hashlib.sha256(raw).hexdigest() != entry["sha256"]:
            raise IntegrityError(f"checksum mismatch for tensor {entry['name']}",
                                 filename=BLOB)
        arr = np.frombuffer(raw, dtype="<f4").reshape(entry["shape"])
        if entry["kind"] == "extra":
            extras[entry["name"]] = arr.copy()
            continue
        _, dst = targets[entry["name"]]
        if dst.shape != arr.shape:
            raise ConfigError(
                f"tensor {entry['name']}: shape {arr.shape} does not match "
                f"architecture {dst.shape}")
        np.copyto(dst, arr)
    manifest["extra_tensors"] = extras

    stats_in = NormStats.from_dict(manifest["normalization"]["input"])
    stats_out = NormStats.from_dict(manifest["normalization"]["output"])
    return model, arch, stats_in, stats_out, manifest
