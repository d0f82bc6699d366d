import hashlib
from typing import Union

import numpy as np

Key = Union[str, int, float]


def stream_key(*keys: Key) -> int:
    """Stable 256-bit integer for a tuple of keys such as (family, size, seed, purpose)"""
    text = "\x1f".join(str(k) for k in keys)
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest(), "big")


def named_rng(*keys: Key) -> np.random.Generator:
    """
    Independent generator per named purpose. Streams keyed differently never
    share state, so adding draws to one stage leaves the others unchanged.
    """
    return np.random.default_rng(np.random.SeedSequence(stream_key(*keys)))


def substream(parent_keys: tuple, index: int) -> np.random.Generator:
    """Per-record generator, identical whether records are produced serially or in parallel"""
    return named_rng(*parent_keys, "record", index)
