"""Deterministic random streams.

All randomness in the package flows through Philox (philox4x64-10, the
counter-based generator shipped as ``numpy.random.Philox``). Streams are
keyed, not sequentially seeded: a stream is identified by a 64-bit master
seed plus a (tag, a, b) triple packed into the second key word. Distinct
ids give statistically independent streams, and a stream's output never
depends on how many other streams were consumed before it, which is what
makes evaluation results independent of worker count and job order.
"""

import numpy as np

PRNG_ID = "philox4x64-10"

# Stream tags. One per consumer so id spaces never collide.
TAG_SEARCHLIGHT = 1
TAG_SYNTH = 2

_MASK64 = (1 << 64) - 1


def stream(master_seed, tag, a=0, b=0):
    """Return a ``numpy.random.Generator`` for stream (master_seed, tag, a, b).

    Packing limits: tag < 2**8, a < 2**16, b < 2**40.
    """
    if not 0 <= tag < (1 << 8):
        raise ValueError(f"tag out of range: {tag}")
    if not 0 <= a < (1 << 16):
        raise ValueError(f"stream id a out of range: {a}")
    if not 0 <= b < (1 << 40):
        raise ValueError(f"stream id b out of range: {b}")
    key = np.array(
        [master_seed & _MASK64, (tag << 56) | (a << 40) | b],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))
