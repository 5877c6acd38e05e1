"""Scenario substitution and sliding-window construction."""

import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brainalign import cli
from brainalign.textprep import (
    DEFAULT_SEQ_LENGTHS,
    PAD_TOKEN,
    SCENARIO_IDS,
    UNK_TOKEN,
    WordStream,
    apply_scenario,
    get_scenario,
    make_windows,
    read_windows,
    read_words,
    scenario_table_hash,
    write_windows,
    write_words,
)

DATA = os.path.join(os.path.dirname(__file__), "data", "scenarios")

# Frozen digests of the canonical scenario-table JSON. Computed once by
# hand from the table definitions; a change in any character list (for
# example dropping the en dash spelling) breaks these.
TABLE_HASHES = {
    "none": "a6f7903d95f8d9b7fc9e51d083e99f674ad8ae9b74564be3401feb7864764abb",
    "removing_fixation": "5598bb9eb408d09edb5df5ffb53f89a86cc240c921dcafe186f460d9b4e59c98",
    "padding_fixation": "99dd92b36889e5dbcc10276d90a2c72df352622954c77ada3cc93979811a112e",
    "padding_all": "7bd219584cde72875e08af331a4b27b32be0412915bc600f93cb59e88c3de9b6",
    "padding_everything": "d5fff951b806ce25d38e1c613fbe2b2b2fcc249d7fd8d0d1f6474b8f140e4db6",
}


def test_scenario_registry_complete():
    assert SCENARIO_IDS == (
        "none",
        "removing_fixation",
        "padding_fixation",
        "padding_all",
        "padding_everything",
    )


def test_scenario_table_hashes_pinned():
    for sid, expected in TABLE_HASHES.items():
        assert scenario_table_hash(sid) == expected, sid


def test_marker_tokens():
    assert UNK_TOKEN == "[UNK]"
    assert PAD_TOKEN == "[PAD]"


def test_fixation_to_unk():
    stream = WordStream(("+", "Harry", "ran", "."))
    out = apply_scenario(stream, "removing_fixation")
    assert out.words == ("[UNK]", "Harry", "ran", ".")


def test_padding_all_leaves_fixation_and_period():
    stream = WordStream(("+", "Harry", "—", "ran", "…", "fast", "."))
    out = apply_scenario(stream, "padding_all")
    assert out.words == ("+", "Harry", "[PAD]", "ran", "[PAD]", "fast", ".")


def test_padding_everything_extends_to_period_and_question():
    stream = WordStream(("Harry", "ran", "?", "."))
    out = apply_scenario(stream, "padding_everything")
    assert out.words == ("Harry", "ran", "[PAD]", "[PAD]")


def test_double_hyphen_and_en_dash_both_padded():
    stream = WordStream(("a", "--", "b", "–", "c"))
    out = apply_scenario(stream, "padding_all")
    assert out.words == ("a", "[PAD]", "b", "[PAD]", "c")


def test_none_is_identity():
    stream = WordStream(("+", "x", "—", "."))
    assert apply_scenario(stream, "none").words == stream.words


def test_scenarios_against_golden_files():
    stream = read_words(os.path.join(DATA, "input.txt"))
    for sid in SCENARIO_IDS:
        expected = read_words(os.path.join(DATA, f"expected_{sid}.txt"))
        got = apply_scenario(stream, sid)
        assert got.words == expected.words, sid


def test_apply_is_idempotent():
    stream = read_words(os.path.join(DATA, "input.txt"))
    for sid in SCENARIO_IDS:
        once = apply_scenario(stream, sid)
        twice = apply_scenario(once, sid)
        assert once.words == twice.words, sid


def test_unknown_scenario_rejected():
    with pytest.raises(ValueError, match="unknown scenario"):
        get_scenario("nope")


@settings(max_examples=50, deadline=None)
@given(
    words=st.lists(
        st.text(
            alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\n"),
            min_size=1,
            max_size=8,
        ),
        min_size=1,
        max_size=40,
    ),
    sid=st.sampled_from(SCENARIO_IDS),
)
def test_apply_preserves_length_and_untouched_tokens(words, sid):
    stream = WordStream(tuple(words))
    scenario = get_scenario(sid)
    out = apply_scenario(stream, scenario)
    assert len(out.words) == len(stream.words)
    for before, after in zip(stream.words, out.words):
        if before in scenario.table:
            assert after == scenario.table[before]
        else:
            assert after == before


def test_word_stream_invariants():
    with pytest.raises(ValueError):
        WordStream(())
    with pytest.raises(ValueError):
        WordStream(("a", "", "b"))


def test_default_seq_lengths():
    assert DEFAULT_SEQ_LENGTHS == (4, 5, 10, 15, 20, 25, 30, 35, 40)


def test_make_windows_example():
    spec = make_windows(5, 2)
    assert spec.windows == ((0, 2), (0, 2), (1, 3), (2, 4), (3, 5))


def test_make_windows_count_equals_words():
    for n in (1, 4, 17, 160):
        for s in (1, 2, 4):
            if s <= n:
                assert len(make_windows(n, s)) == n


def test_make_windows_first_block_repeated():
    spec = make_windows(20, 10)
    assert all(w == (0, 10) for w in spec.windows[:10])
    assert spec.windows[10] == (1, 11)
    assert spec.windows[19] == (10, 20)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(min_value=1, max_value=200), data=st.data())
def test_make_windows_properties(n, data):
    s = data.draw(st.integers(min_value=1, max_value=n))
    spec = make_windows(n, s)
    assert len(spec.windows) == n
    for i, (a, b) in enumerate(spec.windows):
        assert b - a == s
        assert 0 <= a and b <= n
        if i >= s:
            assert (a, b) == (i - s + 1, i + 1)
        else:
            assert (a, b) == (0, s)


def test_make_windows_rejects_bad_lengths():
    with pytest.raises(ValueError):
        make_windows(3, 0)
    with pytest.raises(ValueError):
        make_windows(3, 4)


def test_words_file_round_trip(tmp_path):
    stream = WordStream(("+", "Harry", "—", "…", "end"))
    path = tmp_path / "w.txt"
    write_words(path, stream)
    got = read_words(path)
    assert got.words == stream.words


def test_windows_file_round_trip(tmp_path):
    spec = make_windows(12, 4)
    path = tmp_path / "w.jsonl"
    write_windows(path, spec)
    got = read_windows(path)
    assert got.windows == spec.windows
    assert got.seq_length == 4


def test_cli_textprep(tmp_path):
    src = tmp_path / "in.txt"
    out = tmp_path / "out.txt"
    win = tmp_path / "win.jsonl"
    write_words(src, WordStream(("+", "Harry", "—", "ran", "…", "fast", ".")))
    rc = cli.main(
        [
            "textprep",
            "--words", str(src),
            "--scenario", "padding_all",
            "--out", str(out),
            "--seq-len", "3",
            "--windows-out", str(win),
        ]
    )
    assert rc == 0
    assert read_words(out).words == ("+", "Harry", "[PAD]", "ran", "[PAD]", "fast", ".")
    spec = read_windows(win)
    assert len(spec) == 7
    assert spec.windows[:3] == ((0, 3), (0, 3), (0, 3))
    assert spec.windows[3] == (1, 4)
