"""Binary policy checkpoints.

Layout (all integers and floats little-endian)::

    magic      8 bytes   b"HSPOLICY"
    version    u32       currently 1
    dtype      u32       0 = float64, 1 = float32 (in-memory type; storage is always f64)
    n          u32
    n_dims     u32
    dims       n_dims x u32
    adam_step  u64
    arrays     f64 each; per layer W, b, mW, mb, vW, vb
    sha256     32 bytes over everything above

float32 parameters widen to float64 exactly, so a save/load round trip is
bit-exact for both dtypes.
"""

from __future__ import annotations

import hashlib
import os
import struct
from pathlib import Path

import numpy as np

from .policy import PolicyParams

MAGIC = b"HSPOLICY"
VERSION = 1
_DTYPES = {0: np.float64, 1: np.float32}
_CODES = {np.dtype(np.float64): 0, np.dtype(np.float32): 1}


class CheckpointError(ValueError):
    pass


def _shapes(dims):
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        yield from [(fan_in, fan_out), (fan_out,)] * 3


def dumps(params: PolicyParams) -> bytes:
    dims = params.layer_dims
    head = MAGIC + struct.pack("<IIII", VERSION, _CODES[params.dtype], params.n, len(dims))
    head += struct.pack(f"<{len(dims)}I", *dims) + struct.pack("<Q", params.step)
    h = hashlib.sha256(head)
    chunks = [head]
    for arr in params.arrays():
        blob = np.ascontiguousarray(arr, dtype="<f8").tobytes()
        h.update(blob)
        chunks.append(blob)
    chunks.append(h.digest())
    return b"".join(chunks)


def save(params: PolicyParams, path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(dumps(params))
    os.replace(tmp, path)


def loads(data: bytes) -> PolicyParams:
    if len(data) < len(MAGIC) + 16 + 32 or data[:len(MAGIC)] != MAGIC:
        raise CheckpointError("not a policy checkpoint (bad magic)")
    body, digest = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise CheckpointError("checksum mismatch: checkpoint is corrupt")
    pos = len(MAGIC)
    version, code, n, ndims = struct.unpack_from("<IIII", body, pos)
    pos += 16
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    if code not in _DTYPES:
        raise CheckpointError(f"unknown dtype code {code}")
    dims = struct.unpack_from(f"<{ndims}I", body, pos)
    pos += 4 * ndims
    (step,) = struct.unpack_from("<Q", body, pos)
    pos += 8
    if dims[-1] != n * (n - 1) // 2:
        raise CheckpointError(f"output dim {dims[-1]} inconsistent with n={n}")
    dtype = _DTYPES[code]
    arrays = []
    for shape in _shapes(dims):
        size = int(np.prod(shape))
        if pos + 8 * size > len(body):
            raise CheckpointError("checkpoint truncated")
        flat = np.frombuffer(body, dtype="<f8", count=size, offset=pos)
        arrays.append(flat.astype(dtype).reshape(shape))
        pos += 8 * size
    if pos != len(body):
        raise CheckpointError("trailing bytes in checkpoint")
    groups = [arrays[i::6] for i in range(6)]
    return PolicyParams(*groups, step=step, layer_dims=tuple(dims))


def load(path) -> PolicyParams:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    return loads(data)
