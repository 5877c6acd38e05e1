"""Minimal BTMX tensor I/O, written against FORMATS.md.

Deliberately independent of the regression package's implementation:
the format is the contract, not any one codebase.
"""

import json
import struct

import numpy as np

MAGIC = b"BTMX"


def write_tensor(path, array, meta=None):
    array = np.asarray(array, dtype=np.float32)
    if array.ndim == 0 or 0 in array.shape:
        raise ValueError(f"invalid tensor shape {array.shape}")
    array = np.ascontiguousarray(array)
    header = {
        "dtype": "f32",
        "order": "row-major",
        "shape": list(array.shape),
        "meta": {str(k): str(v) for k, v in (meta or {}).items()},
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(array.tobytes())


def read_tensor(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: bad magic {data[:4]!r}")
    (header_len,) = struct.unpack("<I", data[4:8])
    header = json.loads(data[8 : 8 + header_len].decode("utf-8"))
    if header.get("dtype") != "f32" or header.get("order") != "row-major":
        raise ValueError(f"{path}: unsupported dtype/order")
    shape = tuple(int(d) for d in header["shape"])
    payload = data[8 + header_len :]
    expected = 4 * int(np.prod(shape))
    if len(payload) != expected:
        raise ValueError(f"{path}: payload is {len(payload)} bytes, expected {expected}")
    array = np.frombuffer(payload, dtype="<f4").reshape(shape)
    return array.astype(np.float64), header.get("meta", {})
