"""Keyed random streams: independence from consumption order."""

import numpy as np
import pytest

from brainalign.rng import PRNG_ID, TAG_SEARCHLIGHT, TAG_SYNTH, stream


def test_prng_identifier():
    assert PRNG_ID == "philox4x64-10"
    assert TAG_SEARCHLIGHT != TAG_SYNTH


def test_same_key_same_stream():
    a = stream(42, TAG_SEARCHLIGHT, 3, 7).integers(0, 1000, size=50)
    b = stream(42, TAG_SEARCHLIGHT, 3, 7).integers(0, 1000, size=50)
    assert np.array_equal(a, b)


def test_distinct_keys_distinct_streams():
    base = stream(42, TAG_SEARCHLIGHT, 3, 7).integers(0, 1 << 32, size=20)
    for seed, tag, a, b in (
        (43, TAG_SEARCHLIGHT, 3, 7),
        (42, TAG_SYNTH, 3, 7),
        (42, TAG_SEARCHLIGHT, 4, 7),
        (42, TAG_SEARCHLIGHT, 3, 8),
    ):
        other = stream(seed, tag, a, b).integers(0, 1 << 32, size=20)
        assert not np.array_equal(base, other)


def test_stream_independent_of_other_consumption():
    # Consuming stream A must not move stream B: each key owns its
    # whole counter space.
    a_then_b = []
    only_b = stream(7, TAG_SYNTH, 0, 1).standard_normal(10)
    ga = stream(7, TAG_SYNTH, 0, 0)
    ga.standard_normal(1000)  # burn
    gb = stream(7, TAG_SYNTH, 0, 1)
    a_then_b = gb.standard_normal(10)
    assert np.array_equal(only_b, a_then_b)


def test_packing_does_not_collide():
    # (a=1, b=0) and (a=0, b=1<<40 - something) must differ; check the
    # corner where naive addition would alias.
    x = stream(0, 1, 1, 0).integers(0, 1 << 32, size=8)
    y = stream(0, 1, 0, (1 << 40) - 1).integers(0, 1 << 32, size=8)
    assert not np.array_equal(x, y)


def test_range_checks():
    with pytest.raises(ValueError):
        stream(0, 256)
    with pytest.raises(ValueError):
        stream(0, 1, 1 << 16, 0)
    with pytest.raises(ValueError):
        stream(0, 1, 0, 1 << 40)
    with pytest.raises(ValueError):
        stream(0, -1)


def test_master_seed_wraps_to_64_bits():
    a = stream((1 << 64) + 5, TAG_SYNTH).integers(0, 100, size=5)
    b = stream(5, TAG_SYNTH).integers(0, 100, size=5)
    assert np.array_equal(a, b)
