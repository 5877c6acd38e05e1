"""Shared fixtures: a tiny randomly initialized checkpoint.

The contract tests need a real encoder with a real tokenizer, but none
of their assertions depend on trained weights, so a two-layer model
built from a fixed seed stands in for a published checkpoint. It loads
through the same auto classes as any hub snapshot.
"""

import json

import pytest
import torch

VOCAB = (
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "cat", "sat", "on", "mat", "dog", "ran",
    "a", "big", "red", "play", "##ing", "##s",
    "+", ".", "-", "?",
)

_ACCEPTANCE_FILE = "test_acceptance.py"


@pytest.fixture(scope="session")
def tiny_tokenizer(tiny_checkpoint):
    from transformers import AutoTokenizer

    return AutoTokenizer.from_pretrained(tiny_checkpoint)


@pytest.fixture
def corpus(tmp_path):
    def _write(words, seq_length, stem="corpus"):
        return write_corpus(tmp_path, words, seq_length, stem)

    return _write


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    from transformers import BertConfig, BertModel, BertTokenizer

    root = tmp_path_factory.mktemp("checkpoint")
    tokenizer = BertTokenizer(
        vocab={tok: i for i, tok in enumerate(VOCAB)}, do_lower_case=True
    )
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=16,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=64,
    )
    torch.manual_seed(0)
    model = BertModel(config)
    model.eval()
    model.save_pretrained(root)
    tokenizer.save_pretrained(root)
    return str(root)


def write_corpus(tmp_path, words, seq_length, stem="corpus"):
    """Write a word file plus the matching window file; returns both paths."""
    words_path = tmp_path / f"{stem}_words.txt"
    words_path.write_text("\n".join(words) + "\n", encoding="utf-8")
    n = len(words)
    windows = [
        [0, seq_length] if i < seq_length else [i - seq_length + 1, i + 1]
        for i in range(n)
    ]
    windows_path = tmp_path / f"{stem}_windows.jsonl"
    windows_path.write_text(
        "\n".join(json.dumps(w) for w in windows) + "\n", encoding="utf-8"
    )
    return str(words_path), str(windows_path)


def _criterion_names(stats, key, passed_only_calls):
    for rep in stats.get(key, ()):
        nodeid = getattr(rep, "nodeid", "")
        if _ACCEPTANCE_FILE not in nodeid:
            continue
        if passed_only_calls and getattr(rep, "when", "call") != "call":
            continue
        yield nodeid.split("::")[-1]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = {}
    for name in _criterion_names(terminalreporter.stats, "passed", True):
        rows.setdefault(name, "PASS")
    for key in ("failed", "error"):
        for name in _criterion_names(terminalreporter.stats, key, False):
            rows[name] = "FAIL"
    if rows:
        terminalreporter.section("acceptance criteria")
        for name in sorted(rows):
            terminalreporter.write_line(f"{rows[name]}  {name}")
