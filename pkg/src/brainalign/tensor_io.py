"""BTMX: a minimal binary tensor file format.

Layout, byte for byte (full write-up in FORMATS.md):

    bytes 0..4    magic b"BTMX"
    bytes 4..8    header length H, unsigned 32-bit little-endian
    bytes 8..8+H  UTF-8 JSON header:
                  {"dtype": "f32", "order": "row-major",
                   "shape": [...], "meta": {str: str}}
    rest          product(shape) float32 values, little-endian, row-major

Payloads are float32 so files stay compact and bit-identical across
platforms; everything numeric inside the package is float64 and gets
converted here at the boundary.
"""

import json

import numpy as np

MAGIC = b"BTMX"


class TensorFormatError(ValueError):
    """A BTMX file failed to parse. ``field`` names the offending part."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


def _check_shape(shape):
    shape = tuple(int(s) for s in shape)
    if len(shape) == 0:
        raise ValueError("shape must not be empty")
    for s in shape:
        if s < 1:
            raise ValueError(f"shape entries must be >= 1, got {shape}")
    return shape


def write_tensor(path, shape, data, meta=None):
    """Write ``data`` (flat or shaped float sequence) as a BTMX file."""
    shape = _check_shape(shape)
    arr = np.asarray(data, dtype=np.float64).reshape(-1)
    n = int(np.prod(shape))
    if arr.size != n:
        raise ValueError(
            f"data length {arr.size} does not match shape {shape} (need {n})"
        )
    meta = dict(meta or {})
    for k, v in meta.items():
        if not isinstance(k, str) or not isinstance(v, str):
            raise ValueError(f"meta must map str to str, got {k!r}: {v!r}")
    header = json.dumps(
        {"dtype": "f32", "order": "row-major", "shape": list(shape), "meta": meta},
        ensure_ascii=False,
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    payload = arr.astype("<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(len(header).to_bytes(4, "little"))
        fh.write(header)
        fh.write(payload)


def read_tensor(path):
    """Read a BTMX file, returning ``(shape, array, meta)``.

    The array comes back as float64 (shaped, row-major). Any malformed
    field raises :class:`TensorFormatError` naming that field.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise TensorFormatError("magic", f"expected {MAGIC!r}, got {blob[:4]!r}")
    if len(blob) < 8:
        raise TensorFormatError("header_len", "file too short for header length")
    header_len = int.from_bytes(blob[4:8], "little")
    if 8 + header_len > len(blob):
        raise TensorFormatError(
            "header_len", f"header length {header_len} runs past end of file"
        )
    try:
        header = json.loads(blob[8 : 8 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TensorFormatError("header", f"not valid UTF-8 JSON ({exc})") from exc
    if not isinstance(header, dict):
        raise TensorFormatError("header", "header must be a JSON object")
    if header.get("dtype") != "f32":
        raise TensorFormatError("dtype", f"expected 'f32', got {header.get('dtype')!r}")
    if header.get("order") != "row-major":
        raise TensorFormatError(
            "order", f"expected 'row-major', got {header.get('order')!r}"
        )
    raw_shape = header.get("shape")
    if (
        not isinstance(raw_shape, list)
        or len(raw_shape) == 0
        or not all(isinstance(s, int) and s >= 1 for s in raw_shape)
    ):
        raise TensorFormatError("shape", f"invalid shape {raw_shape!r}")
    shape = tuple(raw_shape)
    meta = header.get("meta", {})
    if not isinstance(meta, dict):
        raise TensorFormatError("meta", "meta must be a JSON object")
    n = int(np.prod(shape))
    payload = blob[8 + header_len :]
    if len(payload) < 4 * n:
        raise TensorFormatError(
            "payload", f"truncated: need {4 * n} bytes, found {len(payload)}"
        )
    if len(payload) > 4 * n:
        raise TensorFormatError(
            "payload", f"trailing bytes: need {4 * n} bytes, found {len(payload)}"
        )
    arr = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(shape)
    return shape, arr, meta
