"""Checksum manifest for an extraction run.

Same shape as the regression package's manifests ({"version": 1,
"files": {...}}) plus a "job" section describing the extraction, which
readers over there ignore.
"""

import hashlib
import json
import os

_CHUNK = 1 << 20


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        while True:
            block = fh.read(_CHUNK)
            if not block:
                break
            digest.update(block)
    return digest.hexdigest()


def write_manifest(manifest_path, file_paths, job_info):
    base = os.path.dirname(os.path.abspath(manifest_path))
    files = {}
    for path in file_paths:
        rel = os.path.relpath(os.path.abspath(path), base)
        files[rel.replace(os.sep, "/")] = {
            "sha256": _sha256(path),
            "bytes": os.path.getsize(path),
        }
    doc = {"version": 1, "files": files, "job": dict(job_info)}
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return doc
