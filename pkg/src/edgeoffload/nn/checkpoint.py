"""Checkpoint serialization: a text manifest plus a raw float64 payload.

Layout of a checkpoint directory:
    manifest.txt   header, meta lines, one line per tensor with its
                   shape and byte offset into the payload
    payload.bin    little-endian float64, C order, concatenated

The round trip is bit exact: values are written as raw IEEE-754 bytes.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import CheckpointError
from .store import ParamStore

_MAGIC = "edgeoffload-checkpoint 1"


def write_tensors(directory: str, tensors: dict[str, np.ndarray],
                  meta: dict[str, str] | None = None) -> None:
    os.makedirs(directory, exist_ok=True)
    lines = [f"format {_MAGIC}", "endian little", "dtype float64"]
    for key, value in sorted((meta or {}).items()):
        if " " in key or "\n" in key or "\n" in str(value):
            raise CheckpointError(f"meta key/value not storable: {key!r}")
        lines.append(f"meta {key} {value}")
    payload = bytearray()
    for name in sorted(tensors):
        arr = np.ascontiguousarray(tensors[name], dtype="<f8")
        if arr.ndim != 2:
            raise CheckpointError(f"tensor '{name}' is not 2-D: {arr.shape}")
        if " " in name or "\n" in name:
            raise CheckpointError(f"tensor name not storable: {name!r}")
        lines.append(f"tensor {name} {arr.shape[0]} {arr.shape[1]} {len(payload)}")
        payload.extend(arr.tobytes())
    with open(os.path.join(directory, "manifest.txt"), "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(os.path.join(directory, "payload.bin"), "wb") as fh:
        fh.write(bytes(payload))


def read_tensors(directory: str):
    """Returns (tensors, meta) read back from a checkpoint directory."""
    manifest_path = os.path.join(directory, "manifest.txt")
    payload_path = os.path.join(directory, "payload.bin")
    if not os.path.isfile(manifest_path) or not os.path.isfile(payload_path):
        raise CheckpointError(f"no checkpoint at {directory}")
    with open(manifest_path, "r", encoding="ascii") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != f"format {_MAGIC}":
        raise CheckpointError(f"{manifest_path}: unrecognized format line")
    with open(payload_path, "rb") as fh:
        payload = fh.read()
    tensors: dict[str, np.ndarray] = {}
    meta: dict[str, str] = {}
    for line in lines[1:]:
        parts = line.split(" ")
        if parts[0] == "endian":
            if parts[1] != "little":
                raise CheckpointError(f"unsupported endianness {parts[1]!r}")
        elif parts[0] == "dtype":
            if parts[1] != "float64":
                raise CheckpointError(f"unsupported dtype {parts[1]!r}")
        elif parts[0] == "meta":
            key, _, value = line[len("meta "):].partition(" ")
            meta[key] = value
        elif parts[0] == "tensor":
            if len(parts) != 5:
                raise CheckpointError(f"{manifest_path}: bad tensor line {line!r}")
            name, rows, cols, offset = parts[1], int(parts[2]), int(parts[3]), int(parts[4])
            nbytes = rows * cols * 8
            if offset + nbytes > len(payload):
                raise CheckpointError(
                    f"payload truncated: '{name}' needs {offset + nbytes} bytes, "
                    f"have {len(payload)}")
            flat = np.frombuffer(payload, dtype="<f8", count=rows * cols,
                                 offset=offset)
            tensors[name] = flat.reshape(rows, cols).copy()
        else:
            raise CheckpointError(f"{manifest_path}: unknown line {line!r}")
    return tensors, meta


def store_tensors(prefix: str, store: ParamStore) -> dict[str, np.ndarray]:
    """Flattens a parameter store, including optimizer moments, for saving."""
    out: dict[str, np.ndarray] = {}
    for name in store.names():
        out[f"{prefix}/{name}"] = store.values[name]
        out[f"{prefix}/{name}#m"] = store.m[name]
        out[f"{prefix}/{name}#v"] = store.v[name]
    return out


def load_store_tensors(prefix: str, store: ParamStore,
                       tensors: dict[str, np.ndarray]) -> None:
    for name in store.names():
        for suffix, target in (("", store.values), ("#m", store.m), ("#v", store.v)):
            key = f"{prefix}/{name}{suffix}"
            if key not in tensors:
                raise CheckpointError(f"checkpoint is missing tensor '{key}'")
            arr = tensors[key]
            if target[name].shape != arr.shape:
                raise CheckpointError(
                    f"tensor '{key}' has shape {arr.shape}, "
                    f"expected {target[name].shape}")
            target[name] = np.asarray(arr, dtype=np.float64).copy()


def save_stores(directory: str, stores: dict[str, ParamStore],
                meta: dict[str, str] | None = None) -> None:
    tensors: dict[str, np.ndarray] = {}
    full_meta = dict(meta or {})
    for prefix, store in stores.items():
        tensors.update(store_tensors(prefix, store))
        full_meta[f"steps.{prefix}"] = str(store.step_count)
    write_tensors(directory, tensors, full_meta)


def load_stores(directory: str, stores: dict[str, ParamStore]) -> dict[str, str]:
    tensors, meta = read_tensors(directory)
    for prefix, store in stores.items():
        load_store_tensors(prefix, store, tensors)
        key = f"steps.{prefix}"
        if key in meta:
            store.step_count = int(meta[key])
    return meta
