"""Small shared helpers: seed derivation and deterministic sub-rngs."""

import hashlib
import random


def derive_seed(seed: int, label: str) -> int:
    """Stable 64-bit sub-seed for a named stage (independent of PYTHONHASHSEED)."""
    digest = hashlib.sha256(f"{seed}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(seed: int, label: str) -> random.Random:
    return random.Random(derive_seed(seed, label))
