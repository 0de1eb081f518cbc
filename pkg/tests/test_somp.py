import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import unit_columns
from oracles import selection_scores_oracle, somp_oracle
from sompkit.dictionary import SpectralBoundedNoise, gen_signal, sample_noise
from sompkit.errors import DimensionError, DomainError
from sompkit.numerics import spectral_norm
from sompkit.somp import (
    RecoveryTrace,
    Termination,
    recovery_success,
    selection_scores,
    shared_path,
    somps,
    somps_from_path,
    sompt,
    sompt_from_path,
)


def _instance(phi, L, d, c_min, seed, eps=None):
    sig = gen_signal(phi.shape[1], L, d, c_min, seed=seed)
    y = phi @ sig.to_dense()
    if eps is not None:
        y = y + sample_noise(SpectralBoundedNoise(eps, (phi.shape[0], d)), seed=seed + 1)
    return sig, y


def test_selection_scores_examples(rng):
    scores, k = selection_scores(np.eye(5), np.zeros((5, 2)))
    assert k == 0 and not scores.any()
    r = np.zeros((5, 3))
    r[3] = 1.0
    assert selection_scores(np.eye(5), r)[1] == 3
    phi = unit_columns(rng.normal(size=(8, 20)))
    r = rng.normal(size=(8, 3))
    np.testing.assert_allclose(selection_scores(phi, r)[0], selection_scores_oracle(phi, r), atol=1e-12)


def test_selection_scores_dimension_check():
    with pytest.raises(DimensionError):
        selection_scores(np.eye(3), np.ones((4, 1)))


def test_identity_dictionary_noiseless():
    sig = gen_signal(12, 5, 3, 1.0, seed=2)
    y = sig.to_dense()
    trace = somps(np.eye(12), y, 5)
    assert trace.termination is Termination.SPARSITY_REACHED
    assert trace.support_set == sig.support
    assert recovery_success(trace, sig)


def test_somps_noiseless_designed(designed):
    phi = designed.matrix
    for s in range(50):
        sig, y = _instance(phi, 4, 4, 1.0, seed=s)
        assert recovery_success(somps(phi, y, 4), sig)


def test_guaranteed_regime_bounded_noise(designed):
    phi, mu = designed.matrix, designed.mu
    eps = 0.9 * 2 * (1 - 7 * mu) / 2  # 10% inside the bound for C_min = 2, L = 4
    for s in range(50):
        sig, y = _instance(phi, 4, 4, 2.0, seed=100 + 2 * s, eps=eps)
        assert recovery_success(somps(phi, y, 4), sig)
        t = sompt(phi, y, eps)
        assert recovery_success(t, sig) and len(t.selected) == 4


def test_sompt_small_signal_stops_immediately():
    y = np.full((4, 1), 0.1)
    t = sompt(np.eye(4), y, tau=1.0)
    assert t.selected == () and t.termination is Termination.THRESHOLD_REACHED
    assert t.residual_spectral_norms == (pytest.approx(0.2),)


def test_sompt_max_iterations():
    y = np.ones((6, 1))
    t = sompt(np.eye(6), y, tau=1e-3, max_iter=2)
    assert t.termination is Termination.MAX_ITERATIONS and len(t.selected) == 2
    assert not recovery_success(t, [0, 1])


def test_singular_selection_is_graceful():
    v = np.array([1.0, 0.0, 0.0])
    w = np.array([0.0, 1.0, 0.0])
    phi = np.column_stack([v, w, (v + w) / np.sqrt(2)])
    y = np.array([[1.0], [1.0], [0.0]])
    t = somps(phi, y, 3)
    assert t.termination is Termination.SINGULARITY
    assert not recovery_success(t, t.selected)


def test_argument_validation():
    with pytest.raises(DomainError):
        somps(np.eye(3), np.ones((3, 1)), 4)
    with pytest.raises(DomainError):
        sompt(np.eye(3), np.ones((3, 1)), 0.0)
    with pytest.raises(DomainError):
        sompt(np.eye(3), np.ones((3, 1)), 1.0, max_iter=5)


def test_recovery_success_examples():
    def tr(sel):
        return RecoveryTrace(tuple(sel), (1.0,), Termination.SPARSITY_REACHED)

    assert recovery_success(tr([3, 1, 2]), {1, 2, 3})
    assert not recovery_success(tr([1, 2, 3, 4]), {1, 2, 3})
    assert recovery_success(tr([]), set())


def test_matches_plain_somp_oracle(rng):
    phi = unit_columns(rng.normal(size=(15, 30)))
    y = rng.normal(size=(15, 3))
    assert list(somps(phi, y, 5).selected) == somp_oracle(phi, y, 5)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 4))
def test_trace_invariants(seed, L, d):
    g = np.random.default_rng(seed)
    phi = unit_columns(g.normal(size=(20, 40)))
    y = g.normal(size=(20, d))
    t = somps(phi, y, L)
    assert len(set(t.selected)) == len(t.selected) == L
    assert t.residual_spectral_norms[0] == pytest.approx(spectral_norm(y))
    r = y.copy()
    fro = [np.linalg.norm(y)]
    for k in range(1, L + 1):
        a = phi[:, list(t.selected[:k])]
        r = y - a @ np.linalg.lstsq(a, y, rcond=None)[0]
        assert np.abs(a.T @ r).max() <= 1e-8 * spectral_norm(y)
        assert t.residual_spectral_norms[k] == pytest.approx(spectral_norm(r), rel=1e-8, abs=1e-12)
        fro.append(np.linalg.norm(r))
    assert all(b <= a * (1 + 1e-12) for a, b in zip(fro, fro[1:]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 3.0))
def test_shared_path_slices_match_direct_runs(seed, tau):
    g = np.random.default_rng(seed)
    phi = unit_columns(g.normal(size=(25, 50)))
    y = g.normal(size=(25, 2))
    path = shared_path(phi, y, 3, tau, max_iter=10)
    assert somps_from_path(path, 3) == somps(phi, y, 3)
    assert sompt_from_path(path, tau, 10) == sompt(phi, y, tau, max_iter=10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_somps_and_sompt_with_oracle_tau_agree(designed, seed):
    phi = designed.matrix
    sig, y = _instance(phi, 4, 4, 2.0, seed=seed, eps=0.3)
    s = somps(phi, y, 4)
    if not recovery_success(s, sig):
        return
    norms = s.residual_spectral_norms
    lo, hi = norms[4], min(norms[:4])
    if not lo < hi:
        return
    t = sompt(phi, y, (lo + hi) / 2)
    assert t.support_set == s.support_set
