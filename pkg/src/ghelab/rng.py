"""Per-trial randomness streams derived from a master seed.

Every trial gets its own ``random.Random`` seeded from
``sha256(master_seed, trial_index, *labels)`` so runs are reproducible and
trials never share state, whatever order they execute in.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(master_seed: int, *path) -> int:
    h = hashlib.sha256(repr((int(master_seed),) + tuple(path)).encode())
    return int.from_bytes(h.digest()[:16], "big")


def trial_rng(master_seed: int, trial: int, *labels) -> random.Random:
    return random.Random(derive_seed(master_seed, trial, *labels))


def coin(rng: random.Random) -> int:
    return rng.getrandbits(1)
