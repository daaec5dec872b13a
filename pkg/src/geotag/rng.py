"""Seeded, splittable randomness.

Every stochastic operation in the toolkit draws from a counter-based
Philox stream keyed by (64-bit seed, stream index).  Streams with
different keys are statistically independent, and the same key always
replays the same draws on any platform, which is what makes manifest
expansion and training reproducible.
"""

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def substream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent generator for stream ``index`` of a 64-bit ``seed``."""
    key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from a tuple of ints/strings.

    Uses blake2b over a delimited byte encoding, so the result is
    identical across processes and platforms (unlike ``hash()``).
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")
