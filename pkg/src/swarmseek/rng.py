"""Seeded random streams.

Every stream is a PCG64 generator keyed by ``SeedSequence(seed,
spawn_key=(stream,))``, so streams never overlap and adding a new one
does not perturb the others.  Per-run seeds are ``master_seed XOR
splitmix64(run_index)``.
"""

import numpy as np

NOISE = 0
INIT = 1
ITERATION = 2
AVOIDANCE = 3

_MASK = (1 << 64) - 1


def stream(seed: int, which: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & _MASK, spawn_key=(which,))
    return np.random.Generator(np.random.PCG64(ss))


def splitmix64(x: int) -> int:
    z = (int(x) + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def run_seed(master_seed: int, run_index: int) -> int:
    return (int(master_seed) & _MASK) ^ splitmix64(run_index)
