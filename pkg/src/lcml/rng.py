"""Deterministic random-stream derivation.

Every randomized operation in lcml draws from a `numpy.random.Generator`
seeded through `SeedSequence`, so a root seed plus a structural path
(step index, row index, sample index, ...) always yields the same
stream — independent of thread count, process count, or platform.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def mask64(value: int) -> int:
    """Reduce any integer to its unsigned 64-bit representation."""
    return int(value) & _MASK64


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream identified by ``(seed, *path)``.

    Distinct paths give statistically independent streams; the same
    path always gives the same stream.
    """
    ss = np.random.SeedSequence(mask64(seed), spawn_key=tuple(mask64(p) for p in path))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *path: int) -> int:
    """Collapse ``(seed, *path)`` into a single 64-bit child seed.

    Used when an operation takes a plain integer seed but must be
    decoupled from its siblings (e.g. one seed per pipeline step).
    """
    ss = np.random.SeedSequence(mask64(seed), spawn_key=tuple(mask64(p) for p in path))
    state = ss.generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)
