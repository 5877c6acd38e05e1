"""Cross-package checks: the file formats are the whole contract.

These run only when the regression package is importable; they read
extractor outputs with its loaders and vice versa.
"""

import numpy as np
import pytest

brainalign = pytest.importorskip("brainalign")

from brainalign import manifest as primary_manifest
from brainalign import tensor_io

from brainalign_extractor import btmx, cli
from brainalign_extractor import extract as ex


def test_primary_loader_reads_extractor_tensors(tiny_checkpoint, corpus, tmp_path):
    words_path, windows_path = corpus(["the", "big", "dog", "ran"], 2)
    out = tmp_path / "feats"
    paths = ex.extract(
        ex.ExtractionJob(tiny_checkpoint, words_path, windows_path, "none", str(out))
    )
    for path in paths:
        shape, array, meta = tensor_io.read_tensor(path)
        ours, our_meta = btmx.read_tensor(path)
        assert shape == (4, 16)
        assert np.array_equal(array, ours)
        assert meta == our_meta


def test_extractor_reader_accepts_primary_tensors(tmp_path):
    path = tmp_path / "t.btmx"
    data = np.linspace(-1.0, 1.0, 12).reshape(3, 4)
    tensor_io.write_tensor(path, (3, 4), data.reshape(-1), meta={"layer": "0"})
    array, meta = btmx.read_tensor(path)
    assert np.array_equal(array, data.astype(np.float32).astype(np.float64))
    assert meta == {"layer": "0"}


def test_primary_verifier_accepts_extractor_manifest(tiny_checkpoint, corpus, tmp_path):
    words_path, windows_path = corpus(["the", "cat", "sat"], 2)
    out = tmp_path / "feats"
    rc = cli.main(
        [
            "--model", tiny_checkpoint,
            "--words", words_path,
            "--windows", windows_path,
            "--scenario", "none",
            "--out", str(out),
        ]
    )
    assert rc == 0
    manifest_path = out / "manifest.json"
    doc = primary_manifest.read_manifest(manifest_path)
    assert sorted(doc["files"]) == ["layer00.btmx", "layer01.btmx", "layer02.btmx"]
    for rel in doc["files"]:
        assert primary_manifest.verify_file(manifest_path, out / rel)

    corrupted = out / "layer01.btmx"
    raw = bytearray(corrupted.read_bytes())
    raw[-1] ^= 0xFF
    corrupted.write_bytes(bytes(raw))
    with pytest.raises(primary_manifest.ManifestError, match="sha256"):
        primary_manifest.verify_file(manifest_path, corrupted)
