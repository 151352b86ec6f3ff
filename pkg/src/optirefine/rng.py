"""Seeded, counter-based random streams.

All randomness goes through Philox generators keyed by a ``SeedSequence`` built
from integers (and string tags hashed with crc32), so a stream depends only on
its key and never on scheduling or on Python's salted ``hash``.
"""
from __future__ import annotations

import zlib

import numpy as np


def _word(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if part is None:
        return 0
    return int(part) & 0xFFFFFFFFFFFFFFFF


def derive_seed(*parts) -> int:
    """Deterministic 63-bit seed from a tuple of ints/strings."""
    ss = np.random.SeedSequence([_word(p) for p in parts])
    return int(ss.generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))


def stream(*parts) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([_word(p) for p in parts])))
