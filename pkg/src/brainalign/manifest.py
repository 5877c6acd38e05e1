"""Feature manifest verification.

Feature extraction usually happens on a different machine (GPU box)
than the regression runs, so extracted tensors travel with a manifest
of SHA-256 hashes. The pipeline refuses to touch a feature file whose
bytes do not match the manifest entry; a silent re-extraction with a
different tokenizer would otherwise go unnoticed.

Manifest layout, JSON:

    {"version": 1,
     "files": {"<path relative to the manifest>": {"sha256": "...", "bytes": N}}}
"""

import hashlib
import json
import os

MANIFEST_VERSION = 1


class ManifestError(ValueError):
    pass


def hash_file(path, chunk=1 << 20):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        while True:
            block = fh.read(chunk)
            if not block:
                break
            h.update(block)
    return h.hexdigest()


def _rel_key(manifest_path, file_path):
    rel = os.path.relpath(
        os.path.abspath(file_path), os.path.dirname(os.path.abspath(manifest_path))
    )
    return rel.replace(os.sep, "/")


def write_manifest(manifest_path, file_paths):
    files = {}
    for path in file_paths:
        files[_rel_key(manifest_path, path)] = {
            "sha256": hash_file(path),
            "bytes": os.path.getsize(path),
        }
    obj = {"version": MANIFEST_VERSION, "files": files}
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return obj


def read_manifest(manifest_path):
    with open(manifest_path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict) or "files" not in obj:
        raise ManifestError(f"{manifest_path}: not a manifest (no files key)")
    if obj.get("version") != MANIFEST_VERSION:
        raise ManifestError(
            f"{manifest_path}: unsupported manifest version {obj.get('version')!r}"
        )
    return obj


def verify_file(manifest_path, file_path):
    """Check one file against the manifest; raise ManifestError on any drift."""
    obj = read_manifest(manifest_path)
    key = _rel_key(manifest_path, file_path)
    entry = obj["files"].get(key)
    if entry is None:
        raise ManifestError(f"{file_path}: no manifest entry for {key!r}")
    size = os.path.getsize(file_path)
    if entry.get("bytes") != size:
        raise ManifestError(
            f"{file_path}: size {size} does not match manifest ({entry.get('bytes')})"
        )
    digest = hash_file(file_path)
    if entry.get("sha256") != digest:
        raise ManifestError(
            f"{file_path}: sha256 {digest} does not match manifest "
            f"({entry.get('sha256')})"
        )
    return True
