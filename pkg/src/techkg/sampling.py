"""Deterministic seeded sampling.

Every derivation owns its own RNG stream, keyed by (master seed, domain,
derivation name) through a stable hash, so running derivations in any order
or in parallel cannot change their output.
"""

from __future__ import annotations

import hashlib
import random
from typing import Sequence, TypeVar

T = TypeVar("T")


def derived_rng(master_seed: int, *parts: object) -> random.Random:
    """An RNG whose stream depends only on the seed and the key parts."""
    payload = repr((master_seed,) + parts).encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def sample_keep_order(rng: random.Random, items: Sequence[T], k: int) -> list[T]:
    """Uniform sample without replacement, preserving the original relative
    order of the kept items.  Returns everything when k >= len(items)."""
    if k < 0:
        raise ValueError("sample size must be >= 0")
    if len(items) <= k:
        return list(items)
    indices = sorted(rng.sample(range(len(items)), k))
    return [items[i] for i in indices]
