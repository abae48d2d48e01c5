"""Deterministic random-number streams.

Every stochastic routine in the package draws from a Philox counter-based
generator whose 128-bit key is derived from a user seed plus a sequence of
tags (strings or integers) naming the consumer.  Same seed and tags, same
stream, on any platform; different tags give streams that are independent
for all practical purposes.

The derivation is a splitmix64 absorb chain: start from the seed, and for
each tag advance the chain once and xor in the tag word.  String tags are
hashed to 64 bits with blake2b.  Two further outputs of the chain form the
Philox key.
"""

from __future__ import annotations

import hashlib

import numpy as np

from trotterkit.errors import ArgumentError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def splitmix64(seed: int, count: int) -> list[int]:
    """Return the first `count` outputs of the splitmix64 stream at `seed`."""
    state = seed & _MASK64
    out = []
    for _ in range(count):
        state = (state + _GOLDEN) & _MASK64
        out.append(_finalize(state))
    return out


def _tag_word(tag) -> int:
    if isinstance(tag, str):
        digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    if isinstance(tag, (int, np.integer)) and not isinstance(tag, bool):
        return int(tag) & _MASK64
    raise ArgumentError(f"rng tags must be str or int, got {type(tag).__name__}")


def derive_key(seed: int, *tags) -> int:
    """Derive a 128-bit Philox key from a seed and a tag sequence."""
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ArgumentError(f"seed must be an int, got {type(seed).__name__}")
    state = int(seed) & _MASK64
    for tag in tags:
        state = (state + _GOLDEN) & _MASK64
        state = _finalize(state) ^ _tag_word(tag)
    lo_state = (state + _GOLDEN) & _MASK64
    hi_state = (lo_state + _GOLDEN) & _MASK64
    return _finalize(lo_state) | (_finalize(hi_state) << 64)


def generator(seed: int, *tags) -> np.random.Generator:
    """A numpy Generator on an independent Philox stream for (seed, tags)."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *tags)))
