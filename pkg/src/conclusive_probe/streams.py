"""Per-trial random substreams on top of numpy's counter-based Philox generator.

Trial ``t`` of a run seeded with ``seed`` owns the Philox blocks at counters
``2t`` and ``2t + 1`` under key ``seed``: eight 64-bit words, turned into
eight uniforms in [0, 1).  A trial's randomness is therefore a pure function
of ``(seed, t)``, and any slice of trials can be generated independently.
"""
from __future__ import annotations

import numpy as np
from numpy.random import Philox

WORDS_PER_TRIAL = 8
_BLOCKS_PER_TRIAL = 2  # Philox4x64 yields four words per counter step
_SEED_MAX = 2**64 - 1

# uniform slots consumed by one protocol round, in order
ALICE_BIT, ALICE_BASIS, BOB_BASIS, ERROR, EVE, LOSS, BOB_RANDOM_BIT = range(7)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= _SEED_MAX:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def trial_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniforms for trials ``start .. start+count-1``, shape ``(count, 8)``."""
    seed = _check_seed(seed)
    if start < 0 or count < 0:
        raise ValueError("trial range must be non-negative")
    bitgen = Philox(key=seed, counter=[start * _BLOCKS_PER_TRIAL, 0, 0, 0])
    raw = bitgen.random_raw(count * WORDS_PER_TRIAL)
    # top 53 bits -> double in [0, 1)
    u = (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
    return u.reshape(count, WORDS_PER_TRIAL)


class TrialStream:
    """Sequential view of one trial's uniforms, usable wherever ``rng.random()`` is expected."""

    def __init__(self, seed: int, index: int):
        self._values = trial_uniforms(seed, index, 1)[0].tolist()
        self._pos = 0

    def random(self) -> float:
        if self._pos >= len(self._values):
            raise RuntimeError("trial substream exhausted")
        value = self._values[self._pos]
        self._pos += 1
        return value
