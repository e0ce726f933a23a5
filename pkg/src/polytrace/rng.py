"""Seeded random streams.

Every stochastic choice draws from ``stream(seed, label, ...)``, a numpy
Generator keyed by the user seed plus a path of labels.  String labels are
hashed with CRC-32 so the derivation is stable across processes and
platforms.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    return int(part) & 0xFFFFFFFF


def stream(seed: int, *labels) -> np.random.Generator:
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_key(p) for p in labels]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def complex_normal(rng: np.random.Generator, shape=()) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def unit_phase(rng: np.random.Generator, shape=()) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(shape))
