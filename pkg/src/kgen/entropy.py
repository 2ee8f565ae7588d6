"""Deterministic splittable seeding for construction randomness.

Generator seeds proper are field-element vectors; this module only covers
auxiliary randomness (graph sampling, experiment repetition), derived from a
master seed so that every run is replayable.
"""

from __future__ import annotations

import hashlib
import random
import secrets


def spawn_rng(seed: int | bytes | str, *labels) -> random.Random:
    """Child PRNG derived from (seed, labels); stable across platforms."""
    material = repr((seed, labels)).encode()
    digest = hashlib.sha256(material).digest()
    return random.Random(int.from_bytes(digest, "big"))


def fresh_seed() -> int:
    """One draw from the OS entropy pool; record it to make the run replayable."""
    return secrets.randbits(64)
