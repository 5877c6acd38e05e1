"""Windowed hidden-state extraction.

For every window the model sees the window's words (special tokens
added when the tokenizer has them) and contributes one row per window
to every layer tensor, the embedding layer first. Identical windows are
computed once and copied, which both saves work and makes the repeated
head windows bit-identical by construction.

The word stream arrives already rewritten by the upstream scenario
pass; this side only maps the "[UNK]" and "[PAD]" marker tokens onto
the checkpoint's own special token ids.
"""

import os
from dataclasses import dataclass

import numpy as np
import torch

from .btmx import write_tensor
from .wordfiles import read_windows, read_words

UNK_MARKER = "[UNK]"
PAD_MARKER = "[PAD]"

POOL_MODES = ("final-word", "window-mean")


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True)
class ExtractionJob:
    model_id: str
    words_path: str
    windows_path: str
    scenario: str
    out_dir: str
    pool: str = "final-word"
    drop_pad: bool = False
    device: str = "cpu"

    def __post_init__(self):
        if self.pool not in POOL_MODES:
            raise ValueError(f"pool must be one of {POOL_MODES}, got {self.pool!r}")


def load_model(model_id, device="cpu"):
    from transformers import AutoModel, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(model_id)
    model = AutoModel.from_pretrained(model_id)
    model.to(device)
    model.eval()
    return tokenizer, model


def _word_ids(tokenizer, word, where):
    """Token ids for one word; markers map to the checkpoint's own ids."""
    if word == UNK_MARKER:
        if tokenizer.unk_token_id is None:
            raise ExtractionError(f"{where}: tokenizer has no unknown token")
        return [tokenizer.unk_token_id]
    if word == PAD_MARKER:
        if tokenizer.pad_token_id is None:
            raise ExtractionError(f"{where}: tokenizer has no padding token")
        return [tokenizer.pad_token_id]
    ids = tokenizer.encode(word, add_special_tokens=False)
    if not ids:
        raise ExtractionError(f"{where}: word {word!r} produced no tokens")
    return ids


def _window_rows(tokenizer, model, words, window, pool, drop_pad, device):
    """One forward pass; returns [n_layers + 1, hidden] for this window."""
    start, end = window
    where = f"window [{start}, {end})"
    pieces = []
    spans = []  # per word: (lo, hi) into pieces, None for dropped pads
    masked = []  # piece indices to hide from attention
    for word in words[start:end]:
        is_pad = word == PAD_MARKER
        if is_pad and drop_pad:
            spans.append(None)
            continue
        ids = _word_ids(tokenizer, word, where)
        lo = len(pieces)
        pieces.extend(ids)
        spans.append((lo, lo + len(ids)))
        if is_pad:
            masked.extend(range(lo, lo + len(ids)))
    if not pieces:
        raise ExtractionError(f"{where}: no tokens left after dropping pads")

    offset = 0
    input_ids = list(pieces)
    if tokenizer.cls_token_id is not None:
        input_ids.insert(0, tokenizer.cls_token_id)
        offset = 1
    if tokenizer.sep_token_id is not None:
        input_ids.append(tokenizer.sep_token_id)
    attention = [1] * len(input_ids)
    for idx in masked:
        attention[idx + offset] = 0

    with torch.no_grad():
        out = model(
            input_ids=torch.tensor([input_ids], device=device),
            attention_mask=torch.tensor([attention], device=device),
            output_hidden_states=True,
        )
    layers = [hs[0].cpu().numpy() for hs in out.hidden_states]

    if pool == "final-word":
        span = spans[-1]
        if span is None:
            raise ExtractionError(
                f"{where}: final word is a dropped pad; nothing to pool"
            )
        keep = list(range(span[0] + offset, span[1] + offset))
    else:
        masked_set = set(masked)
        keep = [
            i + offset
            for span in spans
            if span is not None
            for i in range(span[0], span[1])
            if i not in masked_set
        ]
        if not keep:
            raise ExtractionError(f"{where}: no unmasked tokens to pool")
    return np.stack([layer[keep].mean(axis=0) for layer in layers])


def extract(job):
    """Run the job; returns the list of written layer tensor paths."""
    tokenizer, model = load_model(job.model_id, job.device)
    words = read_words(job.words_path)
    windows = read_windows(job.windows_path, len(words))
    seq_length = max(end - start for start, end in windows)

    cache = {}
    rows = []
    for window in windows:
        if window not in cache:
            cache[window] = _window_rows(
                tokenizer, model, words, window, job.pool, job.drop_pad, job.device
            )
        rows.append(cache[window])
    stacked = np.stack(rows)  # [n_words, n_layers + 1, hidden]
    n_layers = stacked.shape[1]
    hidden = stacked.shape[2]

    os.makedirs(job.out_dir, exist_ok=True)
    meta = {
        "model": job.model_id,
        "scenario": job.scenario,
        "seq_length": str(seq_length),
        "pool": job.pool,
        "drop_pad": str(job.drop_pad).lower(),
        "n_layers": str(n_layers),
        "hidden": str(hidden),
    }
    paths = []
    for layer in range(n_layers):
        path = os.path.join(job.out_dir, f"layer{layer:02d}.btmx")
        write_tensor(path, stacked[:, layer], meta={**meta, "layer": str(layer)})
        paths.append(path)
    return paths
