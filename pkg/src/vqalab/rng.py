"""Splittable deterministic randomness.

Every random choice in the package flows from an explicit 64-bit master seed
through a counter-based generator (Philox).  Streams are addressed by integer
paths, so per-trial randomness is independent of execution order and of how
work is sharded across processes.
"""

from __future__ import annotations

import numpy as np

_U64 = np.uint64


def _normalize_path(path: tuple[int, ...]) -> tuple[int, ...]:
    out = []
    for part in path:
        part = int(part)
        if part < 0:
            raise ValueError(f"rng path components must be non-negative, got {part}")
        out.append(part)
    return tuple(out)


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream addressed by (seed, *path).

    Distinct paths give statistically independent streams; the same path
    always gives the same stream.
    """
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=_normalize_path(path))
    return np.random.Generator(np.random.Philox(seq))


def derive_seed(seed: int, *path: int) -> int:
    """A 64-bit sub-seed addressed by (seed, *path), for handing to other APIs."""
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=_normalize_path(path))
    return int(seq.generate_state(1, dtype=_U64)[0])
