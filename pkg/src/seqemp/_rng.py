"""Counter-based seeded random streams.

Every stream is a Philox generator keyed by a master seed plus a path of
integer keys, so replication ``r`` of an experiment seeded with ``s`` uses the
stream ``(s, r)`` no matter which worker runs it.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

Seed = Union[int, Sequence[int]]


def seed_path(seed: Seed) -> tuple[int, ...]:
    if isinstance(seed, (int, np.integer)):
        path = (int(seed),)
    else:
        path = tuple(int(k) for k in seed)
    if not path or any(k < 0 for k in path):
        raise ValueError(f"seed must be a nonnegative integer or a nonempty path of them, got {seed!r}")
    return path


def make_rng(seed: Seed, *keys: int) -> np.random.Generator:
    path = seed_path(seed) + tuple(int(k) for k in keys)
    ss = np.random.SeedSequence(entropy=path[0], spawn_key=path[1:])
    return np.random.Generator(np.random.Philox(ss))


def child(seed: Seed, *keys: int) -> tuple[int, ...]:
    """Seed path for a derived stream, e.g. ``child(master, r)``."""
    return seed_path(seed) + tuple(int(k) for k in keys)
