"""Deterministic seed derivation for parallel-safe reproducibility."""

from __future__ import annotations

import numpy as np

# Role tags namespace the derivation tree. Reusing a tag for two different
# purposes would silently correlate the resulting random streams.
ROLE_SPLIT = 0
ROLE_PERMUTE = 1
ROLE_PPI_CALL = 2
ROLE_FOLDS = 3
ROLE_REPLICATE = 4
ROLE_BENCH = 5


def derive_seed(*parts: int) -> int:
    """Collapse an integer path like (seed, role, index, ...) into a child seed.

    The derivation is stable across platforms and processes, so work items
    scheduled from pre-derived seeds produce identical results regardless of
    how many workers execute them or in which order.
    """
    for p in parts:
        if p < 0:
            raise ValueError(f"seed parts must be non-negative, got {parts!r}")
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])
