"""Portable random streams.

Uniforms come from numpy's PCG64 bit generator (a fixed, documented algorithm),
and normals are produced here by Box-Muller so no library normal sampler is involved.
Seeds for sub-streams are derived with SplitMix64:

    z = (x + 0x9E3779B97F4A7C15) mod 2^64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2^64
    return z ^ (z >> 31)

``derive_seed(base, k1, k2, ...)`` folds keys left to right:
``s = splitmix64(base); s = splitmix64(s ^ k)`` for each key ``k``.
"""

import math

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x):
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(base, *keys):
    s = splitmix64(int(base) & MASK64)
    for k in keys:
        s = splitmix64(s ^ (int(k) & MASK64))
    return s


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))


def standard_normal(rng, shape):
    """Standard normal array of ``shape`` from Box-Muller on PCG64 uniforms."""
    size = int(np.prod(shape))
    pairs = (size + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1], keeps log finite
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * math.pi * u2
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(theta)
    z[1::2] = r * np.sin(theta)
    return z[:size].reshape(shape)


def uniform(rng, shape=None):
    return rng.random(shape)
