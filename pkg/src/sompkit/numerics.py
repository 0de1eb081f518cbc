"""Dense linear-algebra kernel used by the recovery algorithms and the bounds.

Every function is pure: inputs are never modified and no state is kept.
"""

import numpy as np
import scipy.linalg

from .errors import DimensionError, SingularityError

RANK_TOL = 1e-12


def as_matrix(a, name="matrix"):
    """Return ``a`` as a 2-D float64 array, rejecting empty or non-finite input."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.size == 0:
        raise DimensionError(f"{name} must be a nonempty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf")
    return a


def spectral_norm(a):
    """Largest singular value, via the eigenvalues of the smaller Gram matrix."""
    return _spectral_norm(as_matrix(a))


def _spectral_norm(a):
    # unchecked variant for inner loops; ``a`` must already be a finite 2-D float array
    gram = a.T @ a if a.shape[1] <= a.shape[0] else a @ a.T
    lam = np.linalg.eigvalsh(gram)[-1]
    return float(np.sqrt(max(lam, 0.0)))


def spectral_norms(batch):
    """Spectral norms of a stack of matrices with shape (k, m, n)."""
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 3 or batch.size == 0:
        raise DimensionError(f"expected a nonempty (k, m, n) stack, got shape {batch.shape}")
    if batch.shape[2] <= batch.shape[1]:
        gram = np.einsum("kij,kil->kjl", batch, batch)
    else:
        gram = np.einsum("kji,kli->kjl", batch, batch)
    lam = np.linalg.eigvalsh(gram)[:, -1]
    return np.sqrt(np.maximum(lam, 0.0))


def frobenius_norm(a):
    a = as_matrix(a)
    return float(np.sqrt(np.sum(a * a)))


def pivoted_qr(a):
    """Economic column-pivoted QR ``a[:, piv] = q @ r`` with a rank check.

    Raises SingularityError naming the first column whose diagonal factor falls
    below 1e-12 times its own norm.
    """
    if a.shape[1] > a.shape[0]:
        raise SingularityError(a.shape[0], f"{a.shape[1]} columns cannot be independent in R^{a.shape[0]}")
    q, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True, check_finite=False)
    col_norms = np.sqrt(np.einsum("ij,ij->j", a, a))[piv]
    diag = np.abs(np.diagonal(r))
    bad = np.flatnonzero(diag < RANK_TOL * np.maximum(col_norms, np.finfo(float).tiny))
    if bad.size:
        raise SingularityError(int(piv[bad[0]]))
    return q, r, piv


def least_squares_residual(a, y):
    """Residual ``Y - A A^+ Y`` of projecting the columns of ``y`` onto span(``a``).

    Uses a column-pivoted QR of ``a`` rather than the normal equations. A second
    projection pass keeps the residual orthogonal to span(``a``) to working precision.

    Raises SingularityError naming the offending column when ``a`` is rank deficient.
    """
    a = as_matrix(a, "A")
    y = as_matrix(y, "Y")
    if a.shape[0] != y.shape[0]:
        raise DimensionError(f"row mismatch: A is {a.shape}, Y is {y.shape}")
    return _residual(a, y)


def _residual(a, y):
    # unchecked variant of least_squares_residual
    q = pivoted_qr(a)[0]
    r = y - q @ (q.T @ y)
    return r - q @ (q.T @ r)


def min_eig_gram(a):
    """Smallest eigenvalue of ``A^T A``; tiny negative round-off is clamped to -1e-12."""
    a = as_matrix(a)
    lam = scipy.linalg.eigvalsh(a.T @ a)[0]
    return float(max(lam, -1e-12))
