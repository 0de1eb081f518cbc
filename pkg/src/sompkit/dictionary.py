"""Generators for measurement matrices, row-sparse signals and noise.

All generators are pure functions of their parameters and an integer seed
(see :mod:`sompkit.rng` for the stream definition).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import rng as _rng
from .coherence import CoherenceReport, mutual_coherence
from .errors import DimensionError, DomainError, SingularityError
from .numerics import as_matrix, spectral_norm


@dataclass(frozen=True)
class MeasurementMatrix:
    matrix: np.ndarray
    coherence: CoherenceReport
    provenance: dict = field(default_factory=dict)

    @property
    def M(self):
        return self.matrix.shape[0]

    @property
    def N(self):
        return self.matrix.shape[1]

    @property
    def mu(self):
        return self.coherence.mu

    @classmethod
    def from_array(cls, matrix, **provenance):
        matrix = as_matrix(matrix, "phi")
        if matrix.shape[0] > matrix.shape[1]:
            raise DimensionError(f"need M <= N, got shape {matrix.shape}")
        return cls(matrix, mutual_coherence(matrix), dict(provenance))


@dataclass(frozen=True)
class RowSparseSignal:
    n_cols_total: int
    support: tuple
    coeffs: np.ndarray  # L x d, rows aligned with the sorted support
    c_min: float
    c_max: float

    @property
    def L(self):
        return len(self.support)

    @property
    def d(self):
        return self.coeffs.shape[1]

    def to_dense(self):
        c = np.zeros((self.n_cols_total, self.d))
        c[list(self.support)] = self.coeffs
        return c

    def row_norms(self):
        return np.linalg.norm(self.coeffs, axis=1)


@dataclass(frozen=True)
class GaussianNoise:
    """i.i.d. N(0, sigma^2) entries."""

    sigma: float
    dims: tuple

    kind = "gaussian"

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class SpectralBoundedNoise:
    """Noise whose spectral norm is pinned at ``epsilon``."""

    epsilon: float
    dims: tuple

    kind = "bounded"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be positive, got {self.epsilon}")


def gaussian_matrix(M, N, seed=0):
    """i.i.d. Gaussian M x N matrix with columns scaled to unit norm."""
    if not 1 <= M <= N:
        raise DimensionError(f"need 1 <= M <= N, got M={M}, N={N}")
    g = _rng.standard_normal(_rng.make_rng(seed), (M, N))
    phi = g / np.linalg.norm(g, axis=0)
    return MeasurementMatrix.from_array(phi, generator="gaussian", seed=int(seed))


@dataclass(frozen=True)
class DesignParams:
    """Parameters of :func:`design_low_coherence`.

    The first stage is Gram shrinkage: off-diagonal Gram entries in the top
    ``shrink_fraction`` by magnitude are multiplied by ``gamma``, the Gram matrix is
    projected back to rank M and the columns renormalized. It stops after ``iters``
    steps or when the best coherence improves by less than ``min_improvement`` over
    ``patience`` steps. The second stage minimizes the smooth potential
    ``log sum_{i != j} (g_ij / s)^p`` for each exponent in ``refine_powers`` with
    L-BFGS (``s`` is the coherence at the start of the stage), which approaches the
    max-coherence objective as ``p`` grows.
    """

    gamma: float = 0.95
    shrink_fraction: float = 0.2
    iters: int = 1000
    patience: int = 50
    min_improvement: float = 1e-5
    refine_powers: tuple = (8, 16, 32, 64, 128)
    refine_maxiter: int = 150


def _coherence(phi):
    g = np.abs(phi.T @ phi)
    np.fill_diagonal(g, 0.0)
    return float(g.max())


def _unit_columns(x):
    return x / np.linalg.norm(x, axis=0)


def _shrink_stage(phi, M, params):
    n = phi.shape[1]
    iu = np.triu_indices(n, 1)
    best_mu, best = _coherence(phi), phi
    last_gain_at, ref_mu = 0, best_mu
    for it in range(params.iters):
        g = phi.T @ phi
        mag = np.abs(g)
        t = np.quantile(mag[iu], 1.0 - params.shrink_fraction)
        hit = mag >= t
        np.fill_diagonal(hit, False)
        g = np.where(hit, params.gamma * g, g)
        w, v = np.linalg.eigh(g)
        w, v = w[-M:], v[:, -M:]
        if w[0] <= 1e-12 * w[-1]:
            raise SingularityError(int(n - M), "Gram projection lost rank during coherence design")
        phi = _unit_columns((v * np.sqrt(w)).T)
        mu = _coherence(phi)
        if mu < best_mu:
            best_mu, best = mu, phi
        if ref_mu - best_mu >= params.min_improvement:
            ref_mu, last_gain_at = best_mu, it
        elif it - last_gain_at >= params.patience:
            break
    return best, best_mu


def _refine_stage(phi, params):
    m, n = phi.shape
    best, best_mu = phi, _coherence(phi)
    x = phi
    for p in params.refine_powers:
        scale = _coherence(x)

        def potential(flat):
            xm = flat.reshape(m, n)
            norms = np.linalg.norm(xm, axis=0)
            u = xm / norms
            g = (u.T @ u) / scale
            np.fill_diagonal(g, 0.0)
            gp = g ** (p - 1)
            total = np.sum(gp * g)
            grad_u = (2.0 * p / scale) * (u @ gp)
            grad_x = (grad_u - u * np.sum(grad_u * u, axis=0)) / norms
            return np.log(total), (grad_x / total).ravel()

        res = scipy.optimize.minimize(
            potential, x.ravel(), jac=True, method="L-BFGS-B",
            options={"maxiter": params.refine_maxiter},
        )
        x = _unit_columns(res.x.reshape(m, n))
        mu = _coherence(x)
        if mu < best_mu:
            best_mu, best = mu, x
    return best, best_mu


def design_low_coherence(M, N, params=None, seed=0):
    """Measurement matrix with low mutual coherence, started from ``gaussian_matrix``.

    Returns the lowest-coherence iterate seen across both stages of
    :class:`DesignParams`. For M == N an orthonormal basis is returned.
    """
    params = params or DesignParams()
    if not 1 <= M <= N:
        raise DimensionError(f"need 1 <= M <= N, got M={M}, N={N}")
    start = gaussian_matrix(M, N, seed).matrix
    prov = {"generator": "design_low_coherence", "seed": int(seed), "params": params}
    if M == N:
        q, r = np.linalg.qr(start)
        q = q * np.sign(np.diag(r))
        return MeasurementMatrix.from_array(q, **prov)
    phi, _ = _shrink_stage(start, M, params)
    if params.refine_powers:
        phi, _ = _refine_stage(phi, params)
    return MeasurementMatrix.from_array(phi, **prov)


def _sample_support(gen, N, L):
    # partial Fisher-Yates on PCG64 uniforms
    idx = list(range(N))
    u = gen.random(L)
    for i in range(L):
        j = i + min(int(u[i] * (N - i)), N - i - 1)
        idx[i], idx[j] = idx[j], idx[i]
    return tuple(sorted(idx[:L]))


def gen_signal(N, L, d, c_min, seed=0):
    """Equal-norm row-sparse signal: entries +-sqrt(c_min^2/d) with fair random signs."""
    if L > N or L < 0:
        raise DomainError(f"need 0 <= L <= N, got L={L}, N={N}")
    if d < 1 or not c_min > 0:
        raise DomainError("need d >= 1 and c_min > 0")
    gen = _rng.make_rng(seed)
    support = _sample_support(gen, N, L)
    signs = np.where(gen.random((L, d)) < 0.5, -1.0, 1.0)
    coeffs = signs * np.sqrt(c_min**2 / d)
    return RowSparseSignal(N, support, coeffs, float(c_min), float(c_min))


def gen_signal_dynamic_range(N, L, d, c_min, c_max, seed=0):
    """Row norms uniform on [c_min, c_max], row directions isotropic Gaussian.

    The returned c_min / c_max are the realized extreme row norms.
    """
    if not 0 < c_min <= c_max:
        raise DomainError(f"need 0 < c_min <= c_max, got {c_min}, {c_max}")
    if L > N or L < 1 or d < 1:
        raise DomainError(f"need 1 <= L <= N and d >= 1, got L={L}, N={N}, d={d}")
    gen = _rng.make_rng(seed)
    support = _sample_support(gen, N, L)
    targets = c_min + (c_max - c_min) * gen.random(L)
    rows = _rng.standard_normal(gen, (L, d))
    coeffs = rows / np.linalg.norm(rows, axis=1, keepdims=True) * targets[:, None]
    norms = np.linalg.norm(coeffs, axis=1)
    return RowSparseSignal(N, support, coeffs, float(norms.min()), float(norms.max()))


def sample_noise(spec, seed=0):
    """One M x d noise realization for ``spec``.

    Spectrally bounded noise is a Gaussian draw rescaled so its spectral norm equals
    epsilon exactly (the worst case of the bound).
    """
    gen = _rng.make_rng(seed)
    z = _rng.standard_normal(gen, tuple(spec.dims))
    if isinstance(spec, GaussianNoise):
        return spec.sigma * z
    if isinstance(spec, SpectralBoundedNoise):
        return z * (spec.epsilon / spectral_norm(z))
    raise TypeError(f"unknown noise spec {spec!r}")


def save_matrix(phi, path):
    """Write ``M N`` then M rows of N reals with 17 significant digits."""
    a = as_matrix(getattr(phi, "matrix", phi), "phi")
    lines = [f"{a.shape[0]} {a.shape[1]}"]
    lines += [" ".join(format(v, ".17g") for v in row) for row in a]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_matrix(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: first line must be 'M N'")
        m, n = int(header[0]), int(header[1])
        rows = [line.split() for line in fh if line.strip()]
    if len(rows) != m or any(len(r) != n for r in rows):
        raise ValueError(f"{path}: expected {m} rows of {n} values")
    return np.array([[float(v) for v in r] for r in rows])
