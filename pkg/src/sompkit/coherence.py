"""Mutual-incoherence quantities: coherence, Welch bound, ERC constant, Gershgorin bound."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError, NormalizationError, SingularityError
from .numerics import as_matrix, pivoted_qr

UNIT_NORM_TOL = 1e-8
GRAM_LIMIT = 2048


@dataclass(frozen=True)
class CoherenceReport:
    mu: float
    welch_lower_bound: float
    argmax_pair: tuple
    gram_offdiag_max_abs: float


def _matrix_of(phi):
    return as_matrix(getattr(phi, "matrix", phi), "phi")


def check_unit_norm(phi, tol=UNIT_NORM_TOL):
    norms = np.linalg.norm(phi, axis=0)
    bad = np.flatnonzero(np.abs(norms - 1.0) > tol)
    if bad.size:
        raise NormalizationError(int(bad[0]), float(norms[bad[0]]))


def renormalize(phi):
    """Scale every column to unit l2 norm (explicit, never done silently)."""
    phi = as_matrix(phi, "phi")
    norms = np.linalg.norm(phi, axis=0)
    if np.any(norms == 0):
        raise NormalizationError(int(np.flatnonzero(norms == 0)[0]), 0.0)
    return phi / norms


def _max_offdiag_gram(phi):
    g = np.abs(phi.T @ phi)
    iu = np.triu_indices(phi.shape[1], 1)
    vals = g[iu]
    k = int(np.argmax(vals))  # first hit in row-major order = lexicographically smallest pair
    return float(vals[k]), (int(iu[0][k]), int(iu[1][k]))


def _max_offdiag_blocked(phi, block):
    n = phi.shape[1]
    best, pair = -1.0, (0, 1)
    for i0 in range(0, n, block):
        rows = phi[:, i0:i0 + block]
        g = np.abs(rows.T @ phi)
        ii = np.arange(i0, i0 + rows.shape[1])[:, None]
        g[np.arange(n)[None, :] <= ii] = -1.0
        k = int(np.argmax(g))
        v = float(g.flat[k])
        if v > best:
            best, pair = v, (i0 + k // n, k % n)
    return best, pair


def mutual_coherence(phi, *, block=512, gram_limit=GRAM_LIMIT):
    """Largest absolute inner product between two distinct columns of ``phi``.

    Ties resolve to the lexicographically smallest column pair. Columns must be unit
    norm to within 1e-8; use :func:`renormalize` first otherwise.
    """
    phi = _matrix_of(phi)
    m, n = phi.shape
    if n < 2:
        raise DimensionError("coherence needs at least two columns")
    check_unit_norm(phi)
    if n <= gram_limit:
        mu, pair = _max_offdiag_gram(phi)
    else:
        mu, pair = _max_offdiag_blocked(phi, block)
    return CoherenceReport(
        mu=mu,
        welch_lower_bound=welch_bound(min(m, n), n),
        argmax_pair=pair,
        gram_offdiag_max_abs=mu,
    )


def welch_bound(M, N):
    """Lower bound sqrt((N-M)/(M(N-1))) on the coherence of M x N unit-norm frames."""
    if M < 1 or N < 2:
        raise DomainError(f"need M >= 1 and N >= 2, got M={M}, N={N}")
    if N < M:
        raise DomainError(f"need N >= M, got M={M}, N={N}")
    return float(np.sqrt((N - M) / (M * (N - 1))))


def erc_constant(phi, support):
    """Max over columns outside ``support`` of the l1 norm of their least-squares
    coefficients on the support columns.

    One QR of the support submatrix is shared by all complement columns.
    """
    phi = _matrix_of(phi)
    support = np.asarray(sorted(set(int(i) for i in support)), dtype=int)
    n = phi.shape[1]
    if support.size == 0 or support.min() < 0 or support.max() >= n:
        raise DomainError(f"support must be a nonempty subset of 0..{n - 1}")
    try:
        q, r, _ = pivoted_qr(phi[:, support])
    except SingularityError as exc:
        raise SingularityError(int(support[min(exc.column, support.size - 1)])) from None
    comp = np.setdiff1d(np.arange(n), support)
    if comp.size == 0:
        return 0.0
    # pivoting permutes coefficient rows only; column l1 norms are unchanged
    coeffs = scipy.linalg.solve_triangular(r, q.T @ phi[:, comp])
    return float(np.max(np.sum(np.abs(coeffs), axis=0)))


def erc_upper_bound(mu, L):
    """L mu / (1 - (L-1) mu); valid only while (L-1) mu < 1."""
    if (L - 1) * mu >= 1:
        raise DomainError(f"(L-1)*mu = {(L - 1) * mu} >= 1, bound is vacuous")
    return L * mu / (1 - (L - 1) * mu)


def gram_min_eig_lower_bound(mu, L):
    # Gershgorin: unit diagonal, L-1 off-diagonal entries of magnitude <= mu per row.
    return 1 - (L - 1) * mu
