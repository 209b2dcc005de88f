"""Deterministic derivation of child RNG seeds.

Experiments nest randomness (runs contain repetitions contain k-means
inits). Children are derived by hashing the parent seed with a structured
key so that every chain is reproducible and collision-free, and so that
two strategies given the same parent seed see the same k-means inits
(which is what makes paired BASP-vs-naive comparisons exact).
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(base: int, *key: int | str) -> int:
    """Derive a child seed from ``base`` and a mixed int/str key path."""
    parts = [int(base) & _MASK64]
    for part in key:
        if isinstance(part, str):
            digest = hashlib.blake2s(part.encode("utf-8"), digest_size=4).digest()
            parts.append(int.from_bytes(digest, "big"))
        else:
            parts.append(int(part) & _MASK64)
    return int(np.random.SeedSequence(parts).generate_state(1)[0])
