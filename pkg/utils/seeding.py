# utils/seeding.py
"""
Seed derivation so every work item draws from its own reproducible stream,
independent of the order in which work items run.
"""

import numpy as np


def spawn_generator(master_seed: int, *keys: int) -> np.random.Generator:
    """Generator for the work item identified by ``keys`` under ``master_seed``"""
    sequence = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(sequence)


def derive_seed(master_seed: int, *keys: int) -> int:
    """Integer seed for APIs that take a plain seed rather than a generator"""
    sequence = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])
