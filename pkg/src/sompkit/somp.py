"""Simultaneous orthogonal matching pursuit with two stopping rules.

``somps`` runs a fixed number of iterations (the sparsity L is known);
``sompt`` keeps selecting atoms while the spectral norm of the residual is at
least a threshold tau. Each iteration picks the atom whose correlation with the
residual has the largest l2 norm across the d measurement vectors, then
recomputes the residual by a fresh least-squares projection onto all selected
atoms.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, SingularityError
from .numerics import _residual, _spectral_norm, as_matrix


class Termination(enum.Enum):
    SPARSITY_REACHED = "sparsity-reached"
    THRESHOLD_REACHED = "threshold-reached"
    MAX_ITERATIONS = "max-iterations"
    SINGULARITY = "singularity"


@dataclass(frozen=True)
class RecoveryTrace:
    selected: tuple
    residual_spectral_norms: tuple  # entry 0 is ||Y||_2
    termination: Termination

    @property
    def support_set(self):
        return tuple(sorted(self.selected))


def _phi(phi):
    return as_matrix(getattr(phi, "matrix", phi), "phi")


def selection_scores(phi, r):
    """Row l2 norms of ``phi.T @ r`` and their argmax (ties go to the smallest index)."""
    phi = _phi(phi)
    r = as_matrix(r, "R")
    if phi.shape[0] != r.shape[0]:
        raise DimensionError(f"phi has {phi.shape[0]} rows, R has {r.shape[0]}")
    scores = np.linalg.norm(phi.T @ r, axis=1)
    return scores, int(np.argmax(scores))


def _pick(phi, r, chosen):
    c = phi.T @ r
    scores = np.einsum("ij,ij->i", c, c)  # squared row norms; same argmax
    # already-selected atoms have (numerically) zero score; exclude them outright
    scores[chosen] = -np.inf
    return int(np.argmax(scores))


def _run(phi, y, keep_going, cap, done_reason):
    phi = _phi(phi)
    y = as_matrix(y, "Y")
    if phi.shape[0] != y.shape[0]:
        raise DimensionError(f"phi has {phi.shape[0]} rows, Y has {y.shape[0]}")
    selected = []
    r = y
    norms = [_spectral_norm(y)]
    while True:
        if not keep_going(len(selected), norms[-1]):
            return RecoveryTrace(tuple(selected), tuple(norms), done_reason)
        if len(selected) >= cap:
            return RecoveryTrace(tuple(selected), tuple(norms), Termination.MAX_ITERATIONS)
        selected.append(_pick(phi, r, selected))
        try:
            r = _residual(phi[:, selected], y)
        except SingularityError:
            return RecoveryTrace(tuple(selected), tuple(norms), Termination.SINGULARITY)
        norms.append(_spectral_norm(r))


def somps(phi, y, L):
    """SOMP stopped after exactly ``L`` iterations."""
    m = _phi(phi).shape[0]
    if not 0 <= L <= m:
        raise DomainError(f"need 0 <= L <= M = {m}, got {L}")
    return _run(phi, y, lambda k, _: k < L, m, Termination.SPARSITY_REACHED)


def sompt(phi, y, tau, max_iter=None):
    """SOMP iterating while ``||R||_2 >= tau``, at most ``max_iter`` (default M) times."""
    m = _phi(phi).shape[0]
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")
    cap = m if max_iter is None else int(max_iter)
    if not 1 <= cap <= m:
        raise DomainError(f"need 1 <= max_iter <= M = {m}, got {max_iter}")
    return _run(phi, y, lambda _, rn: rn >= tau, cap, Termination.THRESHOLD_REACHED)


def recovery_success(trace, truth):
    """Exact support-set equality. ``truth`` is a RowSparseSignal or an index collection."""
    support = getattr(truth, "support", truth)
    if trace.termination in (Termination.SINGULARITY, Termination.MAX_ITERATIONS):
        return False
    return set(trace.selected) == set(support)


def shared_path(phi, y, L, tau, max_iter=None):
    """One greedy run long enough to answer both SOMPS(L) and SOMPT(tau).

    Both algorithms make identical selections for as long as they both run, so the
    harness computes the path once and slices it with :func:`somps_from_path` and
    :func:`sompt_from_path`.
    """
    m = _phi(phi).shape[0]
    cap = m if max_iter is None else int(max_iter)
    return _run(phi, y, lambda k, rn: k < L or rn >= tau, cap, Termination.THRESHOLD_REACHED)


def somps_from_path(path, L):
    """The trace ``somps`` would return, cut from a :func:`shared_path` result."""
    if len(path.selected) < L or (path.termination is Termination.SINGULARITY and len(path.selected) <= L):
        # the path stopped early (singularity) before L atoms were in place
        return RecoveryTrace(path.selected, path.residual_spectral_norms, Termination.SINGULARITY)
    return RecoveryTrace(path.selected[:L], path.residual_spectral_norms[: L + 1], Termination.SPARSITY_REACHED)


def sompt_from_path(path, tau, max_iter):
    """The trace ``sompt`` would return, cut from a :func:`shared_path` result."""
    norms = path.residual_spectral_norms
    for k, rn in enumerate(norms):
        if rn < tau:
            return RecoveryTrace(path.selected[:k], norms[: k + 1], Termination.THRESHOLD_REACHED)
        if k == max_iter:
            return RecoveryTrace(path.selected[:k], norms[: k + 1], Termination.MAX_ITERATIONS)
    # every recorded norm is >= tau: the path ended by singularity or by its own cap
    return RecoveryTrace(path.selected, norms, path.termination)
