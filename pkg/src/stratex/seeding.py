"""Deterministic seed derivation: every RNG stream is a pure function of integer keys."""

from __future__ import annotations

import random

import numpy as np


def derive_seed(*keys: int) -> int:
    return int(np.random.SeedSequence([int(k) & 0xFFFFFFFF for k in keys]).generate_state(1)[0])


def derive_rng(*keys: int) -> random.Random:
    return random.Random(derive_seed(*keys))


# stream tags keep positives, negatives, discovery and normalisation independent
POSITIVE, NEGATIVE, DISCOVERY, NORMALISE, AGENT, TRAIN, EVAL = range(1, 8)
