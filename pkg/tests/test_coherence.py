import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import unit_columns
from oracles import coherence_oracle, erc_oracle
from sompkit.coherence import (
    erc_constant,
    erc_upper_bound,
    gram_min_eig_lower_bound,
    mutual_coherence,
    renormalize,
    welch_bound,
)
from sompkit.errors import DomainError, NormalizationError, SingularityError
from sompkit.numerics import min_eig_gram


def test_identity_has_zero_coherence():
    assert mutual_coherence(np.eye(5)).mu == 0.0


def test_two_column_example():
    phi = np.array([[1.0, 1 / np.sqrt(2)], [0.0, 1 / np.sqrt(2)]])
    rep = mutual_coherence(phi)
    assert rep.mu == pytest.approx(1 / np.sqrt(2), rel=1e-15)
    assert rep.argmax_pair == (0, 1)


def test_designed_matrix_coherence(designed):
    assert designed.mu == pytest.approx(0.0782, abs=0.002)
    assert designed.mu >= welch_bound(100, 200)


def test_report_fields_consistent(rng):
    phi = unit_columns(rng.normal(size=(10, 30)))
    rep = mutual_coherence(phi)
    i, j = rep.argmax_pair
    assert rep.mu == pytest.approx(abs(phi[:, i] @ phi[:, j]), rel=1e-14)
    mu, pair = coherence_oracle(phi)
    assert rep.mu == pytest.approx(mu, rel=1e-13)
    assert rep.argmax_pair == pair
    assert rep.welch_lower_bound == welch_bound(10, 30)


def test_ties_go_to_smallest_pair():
    v = np.array([1.0, 0.0])
    w = np.array([np.cos(1.0), np.sin(1.0)])
    phi = np.column_stack([v, w, v, w])  # pairs (0,2) and (1,3) are both exact duplicates
    assert mutual_coherence(phi).argmax_pair == (0, 2)


def test_blocked_path_matches_gram_path(rng):
    phi = unit_columns(rng.normal(size=(12, 70)))
    a = mutual_coherence(phi)
    b = mutual_coherence(phi, block=16, gram_limit=10)
    assert a.mu == b.mu and a.argmax_pair == b.argmax_pair


def test_non_unit_column_rejected():
    phi = np.eye(3)
    phi[:, 2] *= 2
    with pytest.raises(NormalizationError) as info:
        mutual_coherence(phi)
    assert info.value.column == 2
    assert mutual_coherence(renormalize(phi)).mu == 0.0


def test_welch_examples():
    assert welch_bound(100, 100) == 0.0
    assert welch_bound(1, 2) == 1.0
    assert welch_bound(100, 200) == pytest.approx(0.0708881, abs=1e-7)
    with pytest.raises(DomainError):
        welch_bound(5, 3)


def test_erc_identity_is_zero():
    assert erc_constant(np.eye(6), [1, 4]) == 0.0


def test_erc_matches_oracle_and_coherence_bound(rng):
    phi = unit_columns(rng.normal(size=(50, 100)))
    omega = sorted(rng.choice(100, 4, replace=False))
    g = erc_constant(phi, omega)
    assert g == pytest.approx(erc_oracle(phi, omega), abs=1e-9)
    mu = mutual_coherence(phi).mu
    if 3 * mu < 1:
        assert g <= erc_upper_bound(mu, 4) + 1e-9


def test_erc_singular_support(rng):
    phi = unit_columns(rng.normal(size=(5, 8)))
    phi[:, 3] = phi[:, 1]
    with pytest.raises(SingularityError):
        erc_constant(phi, [1, 3])


def test_erc_bound_examples():
    assert erc_upper_bound(0.0, 7) == 0.0
    assert erc_upper_bound(0.5, 1) == 0.5
    assert erc_upper_bound(0.0782, 4) == pytest.approx(0.3128 / 0.7654, rel=1e-12)
    with pytest.raises(DomainError):
        erc_upper_bound(0.5, 3)


def test_gershgorin_examples():
    assert gram_min_eig_lower_bound(0.3, 1) == 1.0
    assert gram_min_eig_lower_bound(0.0, 9) == 1.0
    assert gram_min_eig_lower_bound(0.0782, 4) == pytest.approx(0.7654, abs=1e-12)


dims = st.integers(2, 12).flatmap(lambda m: st.tuples(st.just(m), st.integers(m, 3 * m + 2)))


@settings(max_examples=200, deadline=None)
@given(dims, st.integers(0, 2**32 - 1))
def test_welch_bound_holds(mn, seed):
    m, n = mn
    phi = unit_columns(np.random.default_rng(seed).normal(size=(m, n)))
    assert mutual_coherence(phi).mu >= welch_bound(m, n) - 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_erc_coherence_bound_and_gershgorin(seed, L):
    g = np.random.default_rng(seed)
    phi = unit_columns(g.normal(size=(60, 90)))
    omega = sorted(g.choice(90, L, replace=False))
    mu = mutual_coherence(phi).mu
    assert min_eig_gram(phi[:, omega]) >= gram_min_eig_lower_bound(mu, L) - 1e-9
    if (L - 1) * mu < 1:
        assert erc_constant(phi, omega) <= erc_upper_bound(mu, L) + 1e-9


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_coherence_invariant_to_permutation_and_signs(seed):
    g = np.random.default_rng(seed)
    phi = unit_columns(g.normal(size=(6, 15)))
    perm = g.permutation(15)
    signs = np.where(g.random(15) < 0.5, -1.0, 1.0)
    assert mutual_coherence(phi[:, perm] * signs).mu == pytest.approx(mutual_coherence(phi).mu, rel=1e-14)
