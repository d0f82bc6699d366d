"""
Shared helpers: named, splittable random streams.
"""

from .rng import named_rng, stream_key, substream

__all__ = ["named_rng", "stream_key", "substream"]
