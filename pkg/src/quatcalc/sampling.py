"""Seeded random draws used by the verification suites and experiments.

Every random quantity in the package flows from a single integer seed through
numpy's counter-based Philox generator.  Independent substreams are derived
with SeedSequence.spawn, so runs are reproducible and streams never overlap.
"""

from __future__ import annotations

import numpy as np

from .quaternion import Quaternion


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for substream ``stream`` of the run seeded by ``seed``."""
    root = np.random.SeedSequence(seed)
    children = root.spawn(stream + 1)
    return np.random.Generator(np.random.Philox(children[stream]))


def random_quaternion(rng: np.random.Generator, lo: float = -2.0, hi: float = 2.0,
                      min_modulus: float = 0.0) -> Quaternion:
    """Uniform components in [lo, hi], rejecting draws with |q| < min_modulus."""
    while True:
        q = Quaternion.from_components(rng.uniform(lo, hi, size=4))
        if q.modulus() >= min_modulus:
            return q


def random_unit(rng: np.random.Generator) -> Quaternion:
    """Uniformly distributed unit quaternion."""
    while True:
        q = Quaternion.from_components(rng.normal(size=4))
        mod = q.modulus()
        if mod > 1e-6:
            return q / mod


def random_pure_unit(rng: np.random.Generator) -> Quaternion:
    """Uniformly distributed pure unit quaternion."""
    while True:
        v = rng.normal(size=3)
        norm = float(np.sqrt(v @ v))
        if norm > 1e-6:
            return Quaternion(0.0, v[0] / norm, v[1] / norm, v[2] / norm)
