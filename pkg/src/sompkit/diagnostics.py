"""Per-iteration quantities of SOMP used to check the recovery analysis numerically.

These need the true support, so they are test instrumentation rather than part of
the recovery API. ``selected`` is always a correct partial selection (a subset of
the true support); P_perp is the projector onto the orthogonal complement of the
selected atoms' span, formed explicitly.
"""

from dataclasses import dataclass

import numpy as np

from .coherence import erc_constant
from .errors import DomainError
from .numerics import as_matrix, min_eig_gram, pivoted_qr


@dataclass(frozen=True)
class IterationDiagnostics:
    q1: float  # max over support atoms of ||d^T P_perp Phi C||_2
    q2: float  # same maximum over off-support atoms
    z: float  # max over all atoms of ||d^T P_perp N||_2
    g: float  # ERC constant of the true support


def complement_projector(a):
    """I - Q Q^T for an orthonormal basis Q of span(a); identity when ``a`` has no columns."""
    m = a.shape[0]
    if a.shape[1] == 0:
        return np.eye(m)
    q = pivoted_qr(a)[0]
    return np.eye(m) - q @ q.T


def _check_partial(selected, support):
    extra = set(selected) - set(support)
    if extra:
        raise DomainError(f"selection {sorted(selected)} is not inside the support: {sorted(extra)} are wrong")


def iteration_diagnostics(phi, signal, noise, selected):
    phi = as_matrix(getattr(phi, "matrix", phi), "phi")
    support = list(signal.support)
    selected = list(selected)
    _check_partial(selected, support)
    p = complement_projector(phi[:, selected])
    c = signal.to_dense()
    x = phi @ c
    corr_signal = np.linalg.norm(phi.T @ (p @ x), axis=1)
    corr_noise = np.linalg.norm(phi.T @ (p @ as_matrix(noise, "N")), axis=1)
    off = np.setdiff1d(np.arange(phi.shape[1]), support)
    q1 = float(corr_signal[support].max()) if support else 0.0
    q2 = float(corr_signal[off].max()) if off.size else 0.0
    return IterationDiagnostics(q1, q2, float(corr_noise.max()), float(erc_constant(phi, support)))


def q1_lower_bound(signal, selected, mu):
    """(L - l)^(-1/2) (1 - (L-1) mu) ||C restricted to unselected support rows||_F."""
    support = list(signal.support)
    selected = set(selected)
    _check_partial(selected, support)
    remaining = [k for k, s in enumerate(support) if s not in selected]
    if not remaining:
        return 0.0
    L = len(support)
    rows = signal.coeffs[remaining]
    return float((1 - (L - 1) * mu) * np.linalg.norm(rows) / np.sqrt(len(remaining)))


def projected_min_eig(phi, support, selected):
    """(lambda_min of the support Gram, lambda_min of the projected Gram of unselected support atoms)."""
    phi = as_matrix(getattr(phi, "matrix", phi), "phi")
    support = list(support)
    _check_partial(selected, support)
    rest = [s for s in support if s not in set(selected)]
    full = min_eig_gram(phi[:, support])
    if not rest:
        return full, np.inf
    p = complement_projector(phi[:, list(selected)])
    b = phi[:, rest]
    w = np.linalg.eigvalsh(b.T @ p @ b)
    return full, float(w[0])


def correct_selection_margin(L, mu):
    """Factor 2 (1-(L-1)mu)/(1-(2L-1)mu): Q1 above this times Z forces a correct next pick."""
    return 2 * (1 - (L - 1) * mu) / (1 - (2 * L - 1) * mu)
