"""Closed-form recovery guarantees for SOMPS / SOMPT under bounded and Gaussian noise.

Every threshold returned here is a boundary value: the guarantee holds for
parameters strictly on the good side of it. All calculators raise
:class:`~sompkit.errors.FeasibilityError` when ``mu >= 1/(2L-1)`` instead of
returning a negative or NaN threshold.

Confidence levels are passed as a failure probability ``delta`` everywhere; the
Chernoff-type formulas derive ``t = sqrt(ln(1/delta))`` from it.

The Gaussian results hold up to an O(d^(-2/3)) correction whose constants are
unknown; see :data:`GAUSSIAN_CAVEAT`.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FeasibilityError
from .tracywidom import (
    GaussianNormModel,
    chernoff_spectral_quantile,
    f1_cdf,
    spectral_norm_quantile_tw,
    t_from_delta,
)

GAUSSIAN_CAVEAT = "Tracy-Widom bounds hold up to an O(d^(-2/3)) term with unspecified constants"


def coherence_margin(L, mu):
    """1 - (2L-1) mu, after checking mu < 1/(2L-1)."""
    if L < 1:
        raise DomainError(f"sparsity must be >= 1, got {L}")
    if mu < 0:
        raise DomainError(f"mu must be nonnegative, got {mu}")
    margin = 1 - (2 * L - 1) * mu
    if margin <= 0:
        raise FeasibilityError(f"mu = {mu} >= 1/(2L-1) = {1 / (2 * L - 1)} for L = {L}")
    return margin


@dataclass(frozen=True)
class SrpBound:
    value: float
    method: str
    unclamped: float
    inputs: dict = field(default_factory=dict)


def _srp(raw, method, **inputs):
    return SrpBound(float(min(max(raw, 0.0), 1.0)), method, float(raw), inputs)


# bounded noise

def cmin_threshold_bounded(epsilon, L, mu):
    if epsilon < 0:
        raise DomainError("epsilon must be nonnegative")
    return 2 * epsilon / coherence_margin(L, mu)


def epsilon_threshold_bounded(c_min, L, mu):
    return c_min * coherence_margin(L, mu) / 2


def cmin_threshold_frobenius(noise_frobenius, L, mu):
    """Same form as the l2 threshold with ||N||_F in place of ||N||_2 (comparison bound)."""
    return cmin_threshold_bounded(noise_frobenius, L, mu)


def mu_threshold_bounded(c_min, noise_l2, L):
    """Largest coherence (exclusive) for which recovery is guaranteed."""
    if not c_min > 0:
        raise DomainError("c_min must be positive")
    if noise_l2 >= c_min / 2:
        raise FeasibilityError(f"||N||_2 = {noise_l2} >= c_min/2 = {c_min / 2}: no coherence suffices")
    return (1 - 2 * noise_l2 / c_min) / (2 * L - 1)


def min_measurements_bounded(N, L, c_min, noise_l2):
    """Smallest M exceeding N / (mu*^2 (N-1) + 1), mu* = mu_threshold_bounded, capped at N.

    Assumes the matrix meets the Welch bound.
    """
    mu_star = mu_threshold_bounded(c_min, noise_l2, L)
    rhs = N / (mu_star**2 * (N - 1) + 1)
    return int(min(math.floor(rhs) + 1, N))


# generic and Gaussian noise

def srp_lower_bound_generic(noise_cdf, c_min, L, mu):
    """F_N(c_min (1 - (2L-1) mu) / 2) for a CDF ``noise_cdf`` of ||N||_2."""
    x = c_min * coherence_margin(L, mu) / 2
    return _srp(float(noise_cdf(x)), "generic-cdf", c_min=c_min, L=L, mu=mu)


def srp_lower_bound_gaussian(c_min, L, mu, sigma, M, d):
    margin = coherence_margin(L, mu)
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    model = GaussianNormModel(M, d, sigma)
    arg = (margin**2 * c_min**2 - 4 * sigma**2 * model.mu_md) / (4 * sigma**2 * model.sigma_md)
    return _srp(f1_cdf(arg), "tracy-widom", c_min=c_min, L=L, mu=mu, sigma=sigma, M=M, d=d)


def srp_lower_bound_chernoff(c_min, L, mu, sigma, M, d):
    """1 - exp(-t^2) with t = c_min (1-(2L-1)mu) / (2 sigma) - sqrt(M) - sqrt(d), for t >= 0."""
    margin = coherence_margin(L, mu)
    t = c_min * margin / (2 * sigma) - math.sqrt(M) - math.sqrt(d)
    raw = 1 - math.exp(-t * t) if t > 0 else 0.0
    return _srp(raw, "chernoff", c_min=c_min, L=L, mu=mu, sigma=sigma, M=M, d=d)


def cmin_threshold_gaussian(delta, sigma, M, d, L, mu):
    margin = coherence_margin(L, mu)
    return 2 * spectral_norm_quantile_tw(1 - delta, GaussianNormModel(M, d, sigma)) / margin


def sigma_threshold_gaussian(delta, c_min, M, d, L, mu):
    margin = coherence_margin(L, mu)
    unit = spectral_norm_quantile_tw(1 - delta, GaussianNormModel(M, d, 1.0))
    return c_min * margin / (2 * unit)


def cmin_threshold_chernoff(delta, sigma, M, d, L, mu):
    margin = coherence_margin(L, mu)
    return 2 * chernoff_spectral_quantile(delta, M, d, sigma) / margin


def sigma_threshold_chernoff(delta, c_min, M, d, L, mu):
    margin = coherence_margin(L, mu)
    return c_min * margin / (2 * chernoff_spectral_quantile(delta, M, d, 1.0))


def mu_threshold_gaussian_chernoff(c_min, sigma, M, d, L, delta):
    """(1 - 2 (sqrt M + sqrt d + t) sigma / c_min) / (2L-1)."""
    t = t_from_delta(delta)
    noise = (math.sqrt(M) + math.sqrt(d) + t) * sigma
    if 2 * noise >= c_min:
        raise FeasibilityError(f"2 (sqrt M + sqrt d + t) sigma = {2 * noise} >= c_min = {c_min}")
    return (1 - 2 * noise / c_min) / (2 * L - 1)


@dataclass(frozen=True)
class DThreshold:
    exact: float
    approx: float  # small-sigma form 4 (sqrt M + t)^2 sigma^2 / ((1-(2L-1)mu)^2 c_m)


def d_threshold_chernoff(c_m, sigma, M, L, mu, delta):
    """Number of vectors needed when c_min^2 = d c_m (Chernoff-type bound)."""
    margin = coherence_margin(L, mu)
    t = t_from_delta(delta)
    snr = math.sqrt(c_m) * margin / (2 * sigma) if sigma > 0 else math.inf
    if snr <= 1:
        raise FeasibilityError(
            f"sqrt(c_m)(1-(2L-1)mu)/(2 sigma) = {snr} <= 1: no number of vectors suffices"
        )
    if math.isinf(snr):
        return DThreshold(0.0, 0.0)
    exact = (math.sqrt(M) + t) ** 2 / (snr - 1) ** 2
    approx = 4 * (math.sqrt(M) + t) ** 2 * sigma**2 / (margin**2 * c_m)
    return DThreshold(exact, approx)


def min_d_gaussian(c_m, sigma, M, L, mu, delta, d_max=100000):
    """Smallest d with sigma < sigma_threshold_gaussian(delta, sqrt(d c_m), M, d, L, mu).

    Returns None if no d <= d_max qualifies.
    """
    coherence_margin(L, mu)

    def ok(d):
        try:
            return sigma < sigma_threshold_gaussian(delta, math.sqrt(d * c_m), M, d, L, mu)
        except DomainError:
            return False

    # the condition is monotone in d once it starts holding; scan then bisect
    hi = 1
    while not ok(hi):
        hi *= 2
        if hi > d_max:
            return None
    lo = hi // 2
    if lo >= 1 and ok(lo):
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def sompt_threshold(spec, delta=None, M=None, d=None, rule="tw"):
    """SOMPT stopping threshold tau for a noise spec.

    Bounded noise: tau = epsilon. Gaussian noise: the Tracy-Widom quantile at
    1 - delta (``rule="tw"``) or the Chernoff value sigma (sqrt M + sqrt d + t)
    (``rule="chernoff"``).
    """
    kind = getattr(spec, "kind", None)
    if kind == "bounded":
        return float(spec.epsilon)
    if kind == "gaussian":
        if delta is None:
            raise ValueError("Gaussian noise needs delta to set the SOMPT threshold")
        m, dd = (M, d) if M is not None else tuple(spec.dims)
        if rule == "tw":
            return spectral_norm_quantile_tw(1 - delta, GaussianNormModel(m, dd, spec.sigma))
        if rule == "chernoff":
            return chernoff_spectral_quantile(delta, m, dd, spec.sigma)
        raise ValueError(f"unknown threshold rule {rule!r}")
    raise TypeError(f"unknown noise spec {spec!r}")


@dataclass
class GuaranteeInputs:
    L: int
    mu: float
    M: int = None
    N: int = None
    d: int = None
    c_min: float = None
    sigma: float = None
    epsilon: float = None
    delta: float = 1e-3
    c_m: float = None


def guarantee_table(g):
    """Evaluate every calculator applicable to ``g``; returns (label, value, note) rows.

    Calculators that are infeasible for ``g`` report NaN with the reason as note.
    """
    rows = []

    def add(label, fn, *args):
        try:
            v = fn(*args)
            if isinstance(v, SrpBound):
                v = v.value
            elif isinstance(v, DThreshold):
                rows.append((label + " (small-sigma approx)", float(v.approx), ""))
                v = v.exact
            rows.append((label, float(v) if v is not None else math.nan, ""))
        except (DomainError, ValueError) as exc:
            rows.append((label, math.nan, str(exc)))

    rows.append(("noiseless mu limit 1/(2L-1)", 1 / (2 * g.L - 1), ""))
    if g.epsilon is not None:
        add("cmin threshold (bounded, l2)", cmin_threshold_bounded, g.epsilon, g.L, g.mu)
        add("sompt tau (bounded)", lambda e: e, g.epsilon)
        if g.c_min is not None:
            add("epsilon threshold (bounded)", epsilon_threshold_bounded, g.c_min, g.L, g.mu)
            add("mu threshold (bounded)", mu_threshold_bounded, g.c_min, g.epsilon, g.L)
            if g.N is not None:
                add("min measurements (bounded, Welch)", min_measurements_bounded, g.N, g.L, g.c_min, g.epsilon)
    if g.sigma is not None and g.M is not None and g.d is not None:
        add("cmin threshold (gaussian, TW)", cmin_threshold_gaussian, g.delta, g.sigma, g.M, g.d, g.L, g.mu)
        add("cmin threshold (gaussian, Chernoff)", cmin_threshold_chernoff, g.delta, g.sigma, g.M, g.d, g.L, g.mu)
        model = GaussianNormModel(g.M, g.d, g.sigma)
        add("sompt tau (gaussian, TW)", spectral_norm_quantile_tw, 1 - g.delta, model)
        add("sompt tau (gaussian, Chernoff)", chernoff_spectral_quantile, g.delta, g.M, g.d, g.sigma)
        if g.c_min is not None:
            add("sigma threshold (gaussian, TW)", sigma_threshold_gaussian, g.delta, g.c_min, g.M, g.d, g.L, g.mu)
            add("srp lower bound (gaussian, TW)", srp_lower_bound_gaussian, g.c_min, g.L, g.mu, g.sigma, g.M, g.d)
            add("srp lower bound (gaussian, Chernoff)", srp_lower_bound_chernoff, g.c_min, g.L, g.mu, g.sigma, g.M, g.d)
            add("mu threshold (gaussian, Chernoff)", mu_threshold_gaussian_chernoff,
                g.c_min, g.sigma, g.M, g.d, g.L, g.delta)
        if g.c_m is not None:
            add("d threshold (Chernoff)", d_threshold_chernoff, g.c_m, g.sigma, g.M, g.L, g.mu, g.delta)
            add("d threshold (TW)", min_d_gaussian, g.c_m, g.sigma, g.M, g.L, g.mu, g.delta)
    return rows


def is_feasible(L, mu):
    return np.isfinite(mu) and mu * (2 * L - 1) < 1
