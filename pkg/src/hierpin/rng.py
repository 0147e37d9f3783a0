"""Counter-based random streams.

Every random word is addressed by ``(seed, tag, level, offset)``: the first
three select a Philox key, the offset selects a position in the keystream.
A sample therefore depends only on its coordinates, never on how the work
was split between threads.
"""

import numpy as np
from numpy.random import Philox

# stream tags
INITIAL = 1
PARENTS = 2
LEAVES = 3

_WORDS_PER_BLOCK = 4  # Philox4x64 emits four 64-bit words per counter value
_MASK64 = (1 << 64) - 1


def _key(seed, tag, level):
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.array([seed, (tag << 48) | level], dtype=np.uint64)


def raw_words(seed, tag, level, offset, count):
    """Return ``count`` uint64 words starting at word ``offset`` of the stream."""
    block, skip = divmod(int(offset), _WORDS_PER_BLOCK)
    bitgen = Philox(counter=block, key=_key(seed, tag, level))
    words = bitgen.random_raw(skip + int(count))
    return np.asarray(words, dtype=np.uint64)[skip:]


def to_open_unit(words):
    """Map uint64 words to doubles strictly inside (0, 1) (52-bit grid, midpoints)."""
    return ((words >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52


def to_index(words, upper):
    """Map uint64 words to integers in ``[0, upper)`` using the top 53 bits."""
    idx = np.floor((words >> np.uint64(11)).astype(np.float64) * (upper * 2.0**-53))
    return np.minimum(idx.astype(np.int64), upper - 1)
