"""Small statistics helpers for SRP curves."""

import numpy as np
from scipy.stats import norm

Z95 = float(norm.ppf(0.975))


def wilson_interval(successes, trials, z=Z95):
    """Wilson score interval for a binomial proportion; works elementwise on arrays."""
    k = np.asarray(successes, dtype=float)
    n = float(trials)
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = np.where(k == 0, 0.0, np.clip(centre - half, 0.0, 1.0))
    hi = np.where(k == n, 1.0, np.clip(centre + half, 0.0, 1.0))
    return lo, hi


def isotonic(values, increasing=True, weights=None):
    """Least-squares monotone fit by pool-adjacent-violators."""
    y = np.asarray(values, dtype=float)
    if not increasing:
        return -isotonic(-y, True, weights)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    blocks = []  # [mean, weight, count]
    for yi, wi in zip(y, w):
        blocks.append([yi, wi, 1])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            m2, w2, c2 = blocks.pop()
            m1, w1, c1 = blocks.pop()
            blocks.append([(m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2, c1 + c2])
    return np.concatenate([np.full(c, m) for m, _, c in blocks])
