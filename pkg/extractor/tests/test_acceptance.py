"""Acceptance gate for the extractor.

One test, one criterion: layer-tensor count equals transformer layers
plus the embedding layer, the first S rows of every tensor are
bit-identical, row count equals word count, and switching from the
`none` scenario to `padding_all` changes only rows whose windows
contain a substituted token. Bounded to five minutes on CPU.
"""

import time

import numpy as np

from brainalign_extractor import extract as ex

from test_extract import _read_layers

SEQ_LENGTH = 3
WORDS_NONE = ["the", "cat", "--", "sat", "on", "the", "mat", "."]
WORDS_PADDED = ["the", "cat", "[PAD]", "sat", "on", "the", "mat", "."]


def test_criterion_extractor_contract(tiny_checkpoint, corpus, tmp_path):
    from transformers import AutoConfig

    t0 = time.monotonic()
    n_words = len(WORDS_NONE)
    runs = {}
    for stem, words, scenario in (
        ("none", WORDS_NONE, "none"),
        ("padded", WORDS_PADDED, "padding_all"),
    ):
        words_path, windows_path = corpus(words, SEQ_LENGTH, stem=stem)
        out = tmp_path / stem
        paths = ex.extract(
            ex.ExtractionJob(tiny_checkpoint, words_path, windows_path, scenario, str(out))
        )
        runs[stem] = (paths, _read_layers(out))

    config = AutoConfig.from_pretrained(tiny_checkpoint)
    for paths, layers in runs.values():
        # one tensor per transformer layer plus one for the embeddings
        assert len(paths) == config.num_hidden_layers + 1
        for array, _ in layers:
            assert array.shape[0] == n_words
            for row in range(1, SEQ_LENGTH):
                assert np.array_equal(array[0], array[row])

    # word 2 is the substituted one; windows are (0,3)x3, (1,4), (2,5),
    # then (3,6), (4,7), (5,8) which never contain it
    for (a, _), (b, _) in zip(runs["none"][1], runs["padded"][1]):
        for row in (5, 6, 7):
            assert np.array_equal(a[row], b[row])
        for row in (0, 1, 2, 3, 4):
            assert not np.array_equal(a[row], b[row])

    assert time.monotonic() - t0 < 300.0
