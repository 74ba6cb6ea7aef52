"""Deterministic named RNG streams derived from one master seed.

Every consumer of randomness gets its own stream, addressed by a fixed
integer path under the master seed. Constellation sampling, task generation
and each (experiment point, trial, heuristic) cell are independent, so
adding heuristics or reordering trial execution never perturbs any other
draw, and results are identical at any worker count.
"""

from __future__ import annotations

import numpy as np

CONSTELLATION_DOMAIN = 0
TASKS_DOMAIN = 1
TRIALS_DOMAIN = 2


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream at a fixed position under the master seed."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(key)))


def constellation_stream(master_seed: int) -> np.random.Generator:
    return substream(master_seed, CONSTELLATION_DOMAIN)


def task_stream(master_seed: int, point_index: int = 0) -> np.random.Generator:
    return substream(master_seed, TASKS_DOMAIN, point_index)


def trial_stream(
    master_seed: int, point_index: int, trial_index: int, heuristic_index: int
) -> np.random.Generator:
    return substream(master_seed, TRIALS_DOMAIN, point_index, trial_index, heuristic_index)
