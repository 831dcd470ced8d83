"""Deterministic stream derivation for replicate-parallel Monte Carlo.

Every random draw in the package comes from a counter-based Philox
generator keyed on (master_seed, purpose, replicate, ...).  Distinct keys
give statistically independent streams, and the derivation never depends
on draw order elsewhere, so replicates reproduce bit-identically no
matter how they are scheduled.
"""

import numpy as np

# Purpose tags.  PATH feeds the main path construction, INITIAL the X_0
# draw, BRIDGE the conditional-expectation inner sampling, LEVEL the
# per-level dyadic refinement draws of the Wiener construction.
PATH = 0
INITIAL = 1
BRIDGE = 2
LEVEL = 3


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for this (master_seed, key) pair."""
    ss = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=tuple(int(k) for k in key)
    )
    return np.random.Generator(np.random.Philox(ss))
