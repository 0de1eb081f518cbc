"""Monte-Carlo engine: seeded trials over a 1-D or 2-D parameter grid.

Seeding. Trial ``k`` at grid point ``g`` (1-D) or ``(g1, g2)`` (2-D) uses
``derive_seed(base_seed, g, k)`` or ``derive_seed(base_seed, g1, g2, k)``; the
signal is drawn from ``derive_seed(trial_seed, 1)`` and the noise from
``derive_seed(trial_seed, 2)``. Every algorithm sees the same draws. Results are
therefore independent of how trials are distributed over worker processes.

The measurement matrix is built once per distinct M and shared by all trials.
"""

import functools
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import bounds as B
from ..dictionary import (
    GaussianNoise,
    MeasurementMatrix,
    SpectralBoundedNoise,
    design_low_coherence,
    gaussian_matrix,
    gen_signal,
    gen_signal_dynamic_range,
    load_matrix,
    sample_noise,
    save_matrix,
)
from ..errors import ConfigError, DomainError
from ..numerics import spectral_norms
from ..rng import derive_seed, make_rng, standard_normal
from ..somp import shared_path, somps_from_path, sompt_from_path, recovery_success
from ..tracywidom import GaussianNormModel, spectral_norm_cdf_tw
from .config import config_hash
from .stats import wilson_interval

BAD_DIRECTION = ("epsilon", "sigma", "L")  # larger values make recovery harder
GOOD_DIRECTION = ("c_min", "d", "M", "ratio")
MATRIX_CACHE_ENV = "SOMPKIT_MATRIX_CACHE"


# matrices

@functools.lru_cache(maxsize=64)
def _matrix_cached(source, M, N, seed):
    if source == "designed":
        cache_dir = os.environ.get(MATRIX_CACHE_ENV)
        if cache_dir:
            path = os.path.join(cache_dir, f"designed_{M}x{N}_seed{seed}.txt")
            if os.path.exists(path):
                return MeasurementMatrix.from_array(load_matrix(path), generator="design_low_coherence", seed=seed)
            mm = design_low_coherence(M, N, seed=seed)
            os.makedirs(cache_dir, exist_ok=True)
            save_matrix(mm, path)
            # reload so cached and fresh runs see bit-identical matrices
            return MeasurementMatrix.from_array(load_matrix(path), generator="design_low_coherence", seed=seed)
        return design_low_coherence(M, N, seed=seed)
    if source == "gaussian":
        return gaussian_matrix(M, N, seed=seed)
    try:
        a = load_matrix(source)
    except OSError as exc:
        raise ConfigError(f"cannot read matrix file {source}: {exc.strerror}") from exc
    mm = MeasurementMatrix.from_array(a, generator="file", path=source)
    if mm.M != M or mm.N != N:
        raise ConfigError(f"matrix file {source} is {mm.M}x{mm.N}, config says {M}x{N}")
    return mm


def experiment_matrix(cfg, M=None):
    return _matrix_cached(cfg.matrix, int(M or cfg.M), cfg.N, cfg.matrix_seed)


# per-point parameters

@dataclass(frozen=True)
class PointParams:
    L: int
    d: int
    M: int
    c_min: float
    c_max: float
    epsilon: float
    sigma: float


def point_params(cfg, v1, v2=None):
    p = dict(L=cfg.L, d=cfg.d, M=cfg.M, c_min=cfg.c_min, c_max=cfg.c_max, epsilon=cfg.epsilon, sigma=cfg.sigma)
    for axis, v in ((cfg.axis, v1), (cfg.axis2, v2)):
        if axis is None:
            continue
        if axis in ("L", "d", "M"):
            p[axis] = int(v)
        elif axis == "ratio":
            p["c_min"] = float(v) * cfg.c_max
        else:
            p[axis] = float(v)
    if cfg.c_m is not None:
        p["c_min"] = math.sqrt(p["d"] * cfg.c_m)
    if cfg.signal == "equal":
        p["c_max"] = p["c_min"]
    return PointParams(**p)


def noise_spec(cfg, p):
    if cfg.noise == "bounded":
        return SpectralBoundedNoise(p.epsilon, (p.M, p.d))
    if cfg.noise == "gaussian":
        return GaussianNoise(p.sigma, (p.M, p.d))
    return None


def sompt_tau(cfg, p):
    rule = cfg.tau_rule
    if rule == "explicit":
        return float(cfg.tau)
    if rule == "auto":
        rule = {"bounded": "epsilon", "gaussian": "tw"}.get(cfg.noise, "explicit")
    spec = noise_spec(cfg, p)
    if rule == "epsilon":
        return B.sompt_threshold(spec)
    return B.sompt_threshold(spec, cfg.delta, p.M, p.d, rule=rule)


# trials

def _one_trial(phi, cfg, p, tau, trial_seed):
    n = phi.shape[1]
    if cfg.signal == "dynamic":
        sig = gen_signal_dynamic_range(n, p.L, p.d, p.c_min, p.c_max, seed=derive_seed(trial_seed, 1))
    else:
        sig = gen_signal(n, p.L, p.d, p.c_min, seed=derive_seed(trial_seed, 1))
    y = phi[:, list(sig.support)] @ sig.coeffs
    spec = noise_spec(cfg, p)
    fro = 0.0
    if spec is not None:
        noise = sample_noise(spec, seed=derive_seed(trial_seed, 2))
        fro = float(np.sqrt(np.sum(noise * noise)))
        y = y + noise
    want_s = "somps" in cfg.algorithms
    want_t = "sompt" in cfg.algorithms
    path = shared_path(phi, y, p.L if want_s else 0, tau if want_t else math.inf)
    out = []
    for alg in cfg.algorithms:
        if alg == "somps":
            out.append(recovery_success(somps_from_path(path, p.L), sig))
        else:
            out.append(recovery_success(sompt_from_path(path, tau, phi.shape[0]), sig))
    return out, fro


def _run_point(task):
    phi, cfg, keys, values = task
    p = point_params(cfg, *values)
    tau = sompt_tau(cfg, p) if "sompt" in cfg.algorithms else math.inf
    counts = np.zeros(len(cfg.algorithms), dtype=np.int64)
    fro_max = 0.0
    for k in range(cfg.trials):
        ok, fro = _one_trial(phi, cfg, p, tau, derive_seed(cfg.base_seed, *keys, k))
        counts += np.asarray(ok, dtype=np.int64)
        fro_max = max(fro_max, fro)
    return keys, counts, fro_max


# results

@dataclass(frozen=True)
class Overlay:
    method: str
    values: tuple  # boundary on the last axis; one entry (1-D) or one per axis-1 value (2-D)


@dataclass
class SrpCurve:
    algorithm: str
    axis: str
    grid: tuple
    successes: np.ndarray  # shape (n1,) or (n1, n2)
    trials: int
    axis2: str = None
    grid2: tuple = ()
    overlays: tuple = ()
    guaranteed: dict = field(default_factory=dict)  # method -> bool array shaped like successes
    metadata: dict = field(default_factory=dict)

    @property
    def is_2d(self):
        return self.axis2 is not None

    @property
    def srp(self):
        return self.successes / self.trials

    def wilson(self):
        return wilson_interval(self.successes, self.trials)


def _mu_by_M(cfg):
    ms = {cfg.M}
    for axis, grid in ((cfg.axis, cfg.grid), (cfg.axis2, cfg.grid2)):
        if axis == "M":
            ms.update(int(v) for v in grid)
    return {m: experiment_matrix(cfg, m).mu for m in sorted(ms)}


def guaranteed_at(cfg, p, mu, method, fro_max=None):
    """Does the theory (``method``) guarantee recovery at point ``p``?

    Methods: bounded-l2, frobenius (bounded noise), tracy-widom, chernoff (Gaussian),
    noiseless. Infeasible coherence means no guarantee.
    """
    if not B.is_feasible(p.L, mu):
        return False
    try:
        if method == "noiseless":
            return True
        if method == "bounded-l2":
            return p.c_min > B.cmin_threshold_bounded(p.epsilon, p.L, mu)
        if method == "frobenius":
            return p.c_min > B.cmin_threshold_frobenius(fro_max, p.L, mu)
        if method == "tracy-widom":
            return p.sigma < B.sigma_threshold_gaussian(cfg.delta, p.c_min, p.M, p.d, p.L, mu)
        if method == "chernoff":
            return p.sigma < B.sigma_threshold_chernoff(cfg.delta, p.c_min, p.M, p.d, p.L, mu)
    except DomainError:
        return False
    raise ValueError(f"unknown method {method!r}")


def theory_methods(cfg):
    if cfg.noise == "bounded":
        return ("bounded-l2", "frobenius") if "c_min" in (cfg.axis, cfg.axis2) else ("bounded-l2",)
    if cfg.noise == "gaussian":
        return ("tracy-widom", "chernoff")
    return ("noiseless",)


def _closed_form_boundary(cfg, p, mu, method, axis, fro_max):
    """Boundary value on ``axis`` with the other parameters fixed at ``p``; None if not closed-form."""
    margin = lambda: B.coherence_margin(p.L, mu)  # noqa: E731
    if axis == "epsilon" and method == "bounded-l2":
        return B.epsilon_threshold_bounded(p.c_min, p.L, mu)
    if axis == "sigma" and method == "tracy-widom":
        return B.sigma_threshold_gaussian(cfg.delta, p.c_min, p.M, p.d, p.L, mu)
    if axis == "sigma" and method == "chernoff":
        return B.sigma_threshold_chernoff(cfg.delta, p.c_min, p.M, p.d, p.L, mu)
    if axis in ("c_min", "ratio"):
        scale = 1.0 if axis == "c_min" else 1.0 / cfg.c_max
        if method == "bounded-l2":
            return scale * B.cmin_threshold_bounded(p.epsilon, p.L, mu)
        if method == "frobenius":
            return scale * B.cmin_threshold_frobenius(fro_max, p.L, mu)
        if method == "tracy-widom":
            return scale * B.cmin_threshold_gaussian(cfg.delta, p.sigma, p.M, p.d, p.L, mu)
        if method == "chernoff":
            return scale * B.cmin_threshold_chernoff(cfg.delta, p.sigma, p.M, p.d, p.L, mu)
        if method == "noiseless":
            margin()
            return 0.0
    if axis == "d" and cfg.c_m is not None:
        if method == "tracy-widom":
            v = B.min_d_gaussian(cfg.c_m, p.sigma, p.M, p.L, mu, cfg.delta)
            return math.nan if v is None else float(v)
        if method == "chernoff":
            return B.d_threshold_chernoff(cfg.c_m, p.sigma, p.M, p.L, mu, cfg.delta).exact
    return None


def _boundary_from_mask(axis, grid, mask):
    """Grid-scan boundary: first grid value of the guaranteed run (good axes) or last (bad axes)."""
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return math.nan
    if axis in BAD_DIRECTION:
        return float(grid[idx[-1]])
    return float(grid[idx[0]])


def _overlays(cfg, mus, guaranteed, fro_max):
    last_axis = cfg.axis2 if cfg.is_2d else cfg.axis
    last_grid = cfg.grid2 if cfg.is_2d else cfg.grid
    outer = cfg.grid if cfg.is_2d else (None,)
    overlays = []
    for method in theory_methods(cfg):
        values = []
        for i, v1 in enumerate(outer):
            vals = (v1, last_grid[0]) if cfg.is_2d else (last_grid[0],)
            p = point_params(cfg, *vals)
            value = None
            if last_axis != "M":
                try:
                    value = _closed_form_boundary(cfg, p, mus[p.M], method, last_axis, fro_max)
                except DomainError:
                    value = math.nan
            if value is None:
                mask = guaranteed[method][i] if cfg.is_2d else guaranteed[method]
                value = _boundary_from_mask(last_axis, last_grid, mask)
            values.append(float(value))
        overlays.append(Overlay(method, tuple(values)))
    return tuple(overlays)


def _tasks(cfg, mus):
    phis = {m: experiment_matrix(cfg, m).matrix for m in mus}
    if cfg.is_2d:
        for i, v1 in enumerate(cfg.grid):
            for j, v2 in enumerate(cfg.grid2):
                p = point_params(cfg, v1, v2)
                yield (phis[p.M], cfg, (i, j), (v1, v2))
    else:
        for i, v1 in enumerate(cfg.grid):
            p = point_params(cfg, v1)
            yield (phis[p.M], cfg, (i,), (v1,))


def run_experiment(cfg, progress=None):
    """Run ``cfg`` (kind ``srp``); returns {algorithm: SrpCurve}.

    ``progress`` is an optional callable receiving (done, total) after each grid point.
    """
    cfg.validate()
    if cfg.kind != "srp":
        raise ConfigError(f"run_experiment handles kind=srp, got {cfg.kind!r}")
    mus = _mu_by_M(cfg)
    shape = (len(cfg.grid), len(cfg.grid2)) if cfg.is_2d else (len(cfg.grid),)
    counts = np.zeros(shape + (len(cfg.algorithms),), dtype=np.int64)
    fro_max = 0.0
    tasks = list(_tasks(cfg, mus))
    total = len(tasks)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = pool.map(_run_point, tasks, chunksize=max(1, total // (4 * cfg.workers)))
            for done, (keys, c, f) in enumerate(results, 1):
                counts[keys] = c
                fro_max = max(fro_max, f)
                if progress:
                    progress(done, total)
    else:
        for done, task in enumerate(tasks, 1):
            keys, c, f = _run_point(task)
            counts[keys] = c
            fro_max = max(fro_max, f)
            if progress:
                progress(done, total)

    guaranteed = {}
    for method in theory_methods(cfg):
        mask = np.zeros(shape, dtype=bool)
        for idx in np.ndindex(*shape):
            vals = (cfg.grid[idx[0]], cfg.grid2[idx[1]]) if cfg.is_2d else (cfg.grid[idx[0]],)
            p = point_params(cfg, *vals)
            mask[idx] = guaranteed_at(cfg, p, mus[p.M], method, fro_max)
        guaranteed[method] = mask
    overlays = _overlays(cfg, mus, guaranteed, fro_max)
    meta = {
        "name": cfg.name,
        "config_hash": config_hash(cfg),
        "base_seed": cfg.base_seed,
        "trials": cfg.trials,
        "mu": {str(m): float(mu) for m, mu in mus.items()},
        "noise_frobenius_max": fro_max,
        "notes": list(cfg.notes),
    }
    curves = {}
    for a, alg in enumerate(cfg.algorithms):
        curves[alg] = SrpCurve(
            algorithm=alg, axis=cfg.axis, grid=tuple(cfg.grid), successes=counts[..., a].copy(),
            trials=cfg.trials, axis2=cfg.axis2, grid2=tuple(cfg.grid2), overlays=overlays,
            guaranteed=guaranteed, metadata=dict(meta, algorithm=alg),
        )
    return curves


def _edge_1d(axis, grid, srp, target):
    ok = np.asarray(srp) >= target
    if axis in BAD_DIRECTION:
        # largest value with every smaller grid value also meeting the target
        if not ok[0]:
            return None
        k = len(ok) if ok.all() else int(np.argmin(ok))
        return float(grid[k - 1])
    # smallest value from which the target holds to the grid end
    if not ok[-1]:
        return None
    bad = np.flatnonzero(~ok)
    k = 0 if bad.size == 0 else int(bad[-1]) + 1
    return float(grid[k])


def empirical_guarantee_edge(curve, target):
    """Edge of the region where empirical SRP >= ``target``; None when there is none.

    For 2-D curves the edge is taken along the second axis, one value per axis-1
    grid value (a list with None entries where no edge exists).
    """
    if curve.is_2d:
        return [_edge_1d(curve.axis2, curve.grid2, row, target) for row in curve.srp]
    return _edge_1d(curve.axis, curve.grid, curve.srp, target)


# norm CDF validation (fig1)

@dataclass
class NormCdfResult:
    M: int
    sigma: float
    d_values: tuple
    samples: dict  # d -> sorted spectral norms
    sup_gap: dict  # d -> sup |empirical CDF - TW CDF|
    metadata: dict = field(default_factory=dict)

    def curve(self, d, points=200):
        """(x, empirical CDF, TW CDF) on an even grid spanning the samples."""
        s = self.samples[d]
        x = np.linspace(s[0], s[-1], points)
        emp = np.searchsorted(s, x, side="right") / s.size
        tw = spectral_norm_cdf_tw(x, GaussianNormModel(self.M, d, self.sigma))
        return x, emp, np.asarray(tw)


def ks_gap(sorted_samples, cdf_values):
    """Kolmogorov-Smirnov distance between the sample's empirical CDF and a CDF at the samples."""
    n = sorted_samples.size
    upper = np.arange(1, n + 1) / n - cdf_values
    lower = cdf_values - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def run_norm_cdf(cfg, progress=None):
    """Empirical distribution of ||N||_2 for M x d Gaussian noise, one grid value of d at a time."""
    cfg.validate()
    if cfg.axis != "d" or cfg.is_2d:
        raise ConfigError("norm-cdf runs sweep exactly one axis, d")
    sigma = cfg.sigma if cfg.sigma is not None else 1.0
    samples, gaps = {}, {}
    for g, d in enumerate(cfg.grid):
        d = int(d)
        gen = make_rng(derive_seed(cfg.base_seed, g))
        norms = []
        for start in range(0, cfg.trials, 1000):
            k = min(1000, cfg.trials - start)
            norms.append(spectral_norms(sigma * standard_normal(gen, (k, cfg.M, d))))
        s = np.sort(np.concatenate(norms))
        samples[d] = s
        gaps[d] = ks_gap(s, np.asarray(spectral_norm_cdf_tw(s, GaussianNormModel(cfg.M, d, sigma))))
        if progress:
            progress(g + 1, len(cfg.grid))
    meta = {"name": cfg.name, "config_hash": config_hash(cfg), "base_seed": cfg.base_seed, "samples": cfg.trials}
    return NormCdfResult(cfg.M, sigma, tuple(int(v) for v in cfg.grid), samples, gaps, meta)


def stderr_progress(label):
    def report(done, total):
        end = "\n" if done == total else ""
        print(f"\r{label}: {done}/{total} grid points", end=end, file=sys.stderr, flush=True)

    return report
