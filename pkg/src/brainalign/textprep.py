"""Punctuation substitution scenarios and sliding-window sequence specs.

A scenario rewrites a word stream token by token: tokens found in its
substitution table are replaced with a marker token, everything else
passes through. Matching is full-token equality, never substring, because
the stimulus presents one token at a time and the fixation cross appears
as its own token.

Marker tokens are the literal strings "[UNK]" and "[PAD]". Downstream
feature extractors map them onto whatever unknown/padding ids their
checkpoint uses, which keeps this module model-agnostic.
"""

import hashlib
import json
from dataclasses import dataclass, field

UNK_TOKEN = "[UNK]"
PAD_TOKEN = "[PAD]"

# Stock sequence lengths for the sliding-window analyses.
DEFAULT_SEQ_LENGTHS = (4, 5, 10, 15, 20, 25, 30, 35, 40)

# Dash spellings: the source text may carry the ASCII double hyphen or a
# single en-dash, so both are in the tables alongside the em-dash.
_DASHES = ("--", "–", "—")
_ELLIPSIS = "…"


@dataclass(frozen=True)
class WordStream:
    """An ordered word-token stream, one token per 0.5 s presentation slot."""

    words: tuple
    source_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        if len(self.words) == 0:
            raise ValueError("word stream must not be empty")
        if any(w == "" for w in self.words):
            raise ValueError("word stream must not contain empty tokens")

    def __len__(self):
        return len(self.words)


@dataclass(frozen=True)
class Scenario:
    """A named substitution table. ``none`` is the identity."""

    id: str
    table: dict = field(default_factory=dict)

    def apply(self, words):
        return tuple(self.table.get(w, w) for w in words)


SCENARIOS = {
    "none": Scenario("none", {}),
    "removing_fixation": Scenario("removing_fixation", {"+": UNK_TOKEN}),
    "padding_fixation": Scenario("padding_fixation", {"+": PAD_TOKEN}),
    "padding_all": Scenario(
        "padding_all", {t: PAD_TOKEN for t in (*_DASHES, _ELLIPSIS)}
    ),
    "padding_everything": Scenario(
        "padding_everything",
        {t: PAD_TOKEN for t in (*_DASHES, _ELLIPSIS, ".", "?")},
    ),
}

SCENARIO_IDS = tuple(SCENARIOS)


def get_scenario(scenario_id):
    try:
        return SCENARIOS[scenario_id]
    except KeyError:
        raise ValueError(
            f"unknown scenario {scenario_id!r}, expected one of {SCENARIO_IDS}"
        ) from None


def apply_scenario(stream, scenario):
    """Rewrite ``stream`` under ``scenario``; length is always preserved."""
    if isinstance(scenario, str):
        scenario = get_scenario(scenario)
    return WordStream(scenario.apply(stream.words), source_id=stream.source_id)


def scenario_table_hash(scenario):
    """SHA-256 over the canonical JSON serialization of a scenario table.

    Pins the exact character lists (including the Unicode ellipsis and
    dashes) against silent edits; the expected values are recorded in
    FORMATS.md and asserted by the regression tests.
    """
    if isinstance(scenario, str):
        scenario = get_scenario(scenario)
    blob = json.dumps(
        {"id": scenario.id, "table": scenario.table},
        sort_keys=True,
        ensure_ascii=True,
        separators=(",", ":"),
    ).encode("ascii")
    return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class WindowSpec:
    """One half-open word-index window per word in the stream.

    The first full window is repeated for the first S positions, so a
    stream of n words always yields exactly n windows.
    """

    seq_length: int
    windows: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "windows", tuple((int(a), int(b)) for a, b in self.windows)
        )

    def __len__(self):
        return len(self.windows)


def make_windows(n_words, seq_length):
    """Sliding windows of ``seq_length`` words over a stream of ``n_words``."""
    if seq_length < 1:
        raise ValueError(f"seq_length must be >= 1, got {seq_length}")
    if seq_length > n_words:
        raise ValueError(
            f"seq_length {seq_length} exceeds stream length {n_words}"
        )
    windows = [(0, seq_length)] * seq_length
    windows += [(i - seq_length + 1, i + 1) for i in range(seq_length, n_words)]
    return WindowSpec(seq_length, tuple(windows))


def read_words(path):
    """Read a words file (one UTF-8 token per line) as a WordStream."""
    with open(path, encoding="utf-8") as fh:
        words = [line.rstrip("\n") for line in fh]
    if words and words[-1] == "":
        words.pop()
    return WordStream(tuple(words), source_id=str(path))


def write_words(path, stream):
    with open(path, "w", encoding="utf-8") as fh:
        for w in stream.words:
            fh.write(w + "\n")


def write_windows(path, spec):
    """Serialize a WindowSpec as JSON lines: one ``[start, end]`` per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for start, end in spec.windows:
            fh.write(json.dumps([start, end]) + "\n")


def read_windows(path):
    windows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                start, end = json.loads(line)
                windows.append((start, end))
    if not windows:
        raise ValueError(f"no windows in {path}")
    return WindowSpec(windows[0][1] - windows[0][0], tuple(windows))
