"""Tracy-Widom (beta = 1) machinery for the spectral norm of Gaussian noise matrices.

F1 is read from an embedded table (``data/tw1_table.csv``, built by
``scripts/build_tw_table.py``) and interpolated with a monotone cubic (PCHIP).
Outside the table the CDF is held at the end values rather than extrapolated.
"""

import functools
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError

QUANTILE_TOL = 1e-9


@dataclass(frozen=True)
class Tw1Table:
    s_grid: np.ndarray
    f1_values: np.ndarray
    source: str

    def to_csv(self):
        lines = ["s,F1"] + [f"{float(s)!r},{float(f)!r}" for s, f in zip(self.s_grid, self.f1_values)]
        return "\n".join(lines) + "\n"


@functools.lru_cache(maxsize=1)
def load_table():
    text = resources.files("sompkit").joinpath("data/tw1_table.csv").read_text(encoding="utf-8")
    source = "unknown"
    rows = []
    for line in text.splitlines():
        if line.startswith("# source:"):
            source = line[len("# source:"):].strip()
        elif line and not line.startswith("#") and not line.startswith("s,"):
            s, f = line.split(",")
            rows.append((float(s), float(f)))
    data = np.array(rows)
    table = Tw1Table(data[:, 0], data[:, 1], source)
    table.s_grid.setflags(write=False)
    table.f1_values.setflags(write=False)
    return table


@functools.lru_cache(maxsize=1)
def _interpolant():
    t = load_table()
    return PchipInterpolator(t.s_grid, t.f1_values, extrapolate=False)


def f1_cdf(s):
    """Tracy-Widom beta=1 CDF. Accepts scalars or arrays."""
    t = load_table()
    s_arr = np.asarray(s, dtype=float)
    clipped = np.clip(s_arr, t.s_grid[0], t.s_grid[-1])
    out = _interpolant()(clipped)
    if out.ndim == 0:
        return float(out)
    return out


def f1_quantile(p):
    """Inverse of :func:`f1_cdf` by bisection, to ``|F1(x) - p| <= 1e-9``."""
    return _f1_quantile(float(p))


@functools.lru_cache(maxsize=4096)
def _f1_quantile(p):
    t = load_table()
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p}")
    if p < t.f1_values[0] or p > t.f1_values[-1]:
        raise DomainError(f"p = {p} is outside the table range [{t.f1_values[0]:.3g}, {t.f1_values[-1]!r}]")
    # bracket on the grid, then bisect inside one cell
    k = int(np.searchsorted(t.f1_values, p))
    lo = t.s_grid[max(k - 1, 0)]
    hi = t.s_grid[min(k, t.s_grid.size - 1)]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f1_cdf(mid)
        if abs(fm - p) <= QUANTILE_TOL * 1e-3 or hi - lo <= 1e-15 * max(1.0, abs(mid)):
            return mid
        if fm < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def centering_constants(M, d):
    """(mu_Md, sigma_Md) standardizing ||N||_2^2 / sigma^2 toward F1."""
    if M < 1 or d < 1:
        raise DomainError(f"need M, d >= 1, got M={M}, d={d}")
    a = math.sqrt(M - 0.5)
    b = math.sqrt(d - 0.5)
    return (a + b) ** 2, (a + b) * (1 / a + 1 / b) ** (1 / 3)


@dataclass(frozen=True)
class GaussianNormModel:
    m: int
    d: int
    sigma: float = 1.0

    @property
    def mu_md(self):
        return centering_constants(self.m, self.d)[0]

    @property
    def sigma_md(self):
        return centering_constants(self.m, self.d)[1]

    def standardize(self, x):
        return (np.asarray(x, dtype=float) ** 2 / self.sigma**2 - self.mu_md) / self.sigma_md


def spectral_norm_cdf_tw(x, model):
    """Tracy-Widom approximation of Pr(||N||_2 <= x) for i.i.d. N(0, sigma^2) entries."""
    if np.any(np.asarray(x) < 0):
        raise DomainError("x must be nonnegative")
    return f1_cdf(model.standardize(x))


def spectral_norm_quantile_tw(p, model):
    """x with spectral_norm_cdf_tw(x) = p: sqrt((F1^-1(p) sigma_Md + mu_Md) sigma^2)."""
    radicand = f1_quantile(p) * model.sigma_md + model.mu_md
    if radicand <= 0:
        raise DomainError(f"quantile radicand {radicand} <= 0 for p={p}, M={model.m}, d={model.d}")
    return math.sqrt(radicand * model.sigma**2)


def t_from_delta(delta):
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return math.sqrt(math.log(1.0 / delta))


def chernoff_spectral_quantile(delta, M, d, sigma):
    """sigma (sqrt(ln 1/delta) + sqrt(M) + sqrt(d)); Pr(||N||_2 <= it) >= 1 - delta."""
    return sigma * (t_from_delta(delta) + math.sqrt(M) + math.sqrt(d))
