"""Deterministic random substreams.

Every stochastic stage draws from a generator derived from one master seed
and a tuple of keys (discipline, year, productivity level, batch index, ...),
so results do not depend on iteration order or on how work is split across
threads.
"""

import hashlib

import numpy as np


def _key_to_int(key):
    if isinstance(key, (bool, np.bool_)):
        return int(key)
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError("integer substream keys must be non-negative")
        return int(key)
    digest = hashlib.blake2b(str(key).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(seed, *keys):
    """Return a Generator for the substream identified by ``keys``.

    Parameters
    ----------
    seed : int
        Master seed.
    *keys : int or str
        Path of the substream. Strings are hashed stably (not with ``hash``).
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key_to_int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def as_seed(rng_or_seed):
    """Collapse an int, None or Generator into an integer master seed."""
    if rng_or_seed is None:
        return int(np.random.SeedSequence().entropy % (2**63))
    if isinstance(rng_or_seed, np.random.Generator):
        return int(rng_or_seed.integers(0, 2**63 - 1))
    return int(rng_or_seed)


def derive_seed(seed, *keys):
    """Integer seed for a named sub-computation that takes its own master seed."""
    return int(substream(seed, *keys).integers(0, 2**63 - 1))
