"""Readers for the upstream word and window files."""

import json


def read_words(path):
    with open(path, encoding="utf-8") as fh:
        words = [line.rstrip("\n") for line in fh]
    words = [w for w in words if w != ""]
    if not words:
        raise ValueError(f"{path}: no words")
    return words


def read_windows(path, n_words):
    windows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            pair = json.loads(line)
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ValueError(f"{path}:{lineno + 1}: expected [start, end]")
            start, end = int(pair[0]), int(pair[1])
            if not 0 <= start < end <= n_words:
                raise ValueError(
                    f"{path}:{lineno + 1}: window [{start}, {end}) out of range "
                    f"for {n_words} words"
                )
            windows.append((start, end))
    if len(windows) != n_words:
        raise ValueError(
            f"{path}: {len(windows)} windows for {n_words} words; counts must match"
        )
    return windows
