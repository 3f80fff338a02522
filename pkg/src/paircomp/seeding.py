"""Deterministic seed derivation on top of the Philox counter-based generator.

Every stochastic operation in the package takes an explicit seed, and all
seeds are derived from a single master seed through a fixed counter scheme
so that experiments are bit-reproducible and extending an experiment never
perturbs earlier draws:

* stream 0: instance selection (sampling without replacement from the pool)
* stream 1, k: seed for the k-th selected instance (k = 0, 1, ...)
* stream 2: diagnostics bootstrap
* stream 3: synthetic pool construction
* stream 4: within-instance bootstrap standard errors

Within one instance, the run that gives algorithm ``a`` (0 or 1) its
``r``-th observation uses ``derive_seed(instance_seed, a, r)``.  Run
indices are never reused, so distinct runs always get distinct seeds.
"""

from __future__ import annotations

import numpy as np

SELECTION_STREAM = 0
INSTANCE_STREAM = 1
DIAGNOSTICS_STREAM = 2
POOL_STREAM = 3
BOOTSTRAP_STREAM = 4


def derive_seed(root: int, *path: int) -> int:
    """Derive a 64-bit child seed from ``root`` along a counter path."""
    ss = np.random.SeedSequence(entropy=int(root), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])


def make_generator(seed: int) -> np.random.Generator:
    """Philox generator for a 64-bit seed (counter-based, splittable)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def run_seed(instance_seed: int, algo_index: int, run_index: int) -> int:
    """Seed for one algorithm run, unique per (instance, algorithm, run)."""
    return derive_seed(instance_seed, algo_index, run_index)
