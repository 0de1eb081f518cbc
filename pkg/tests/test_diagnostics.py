import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sompkit.coherence import erc_constant, erc_upper_bound, gram_min_eig_lower_bound
from sompkit.diagnostics import (
    correct_selection_margin,
    iteration_diagnostics,
    q1_lower_bound,
    projected_min_eig,
)
from sompkit.dictionary import GaussianNoise, gen_signal, gen_signal_dynamic_range, sample_noise
from sompkit.errors import DomainError
from sompkit.numerics import _residual
from sompkit.somp import _pick

SLACK = 1e-9


def _partial(seed, L, dynamic=False, sigma=0.05):
    g = np.random.default_rng(seed)
    d = int(g.integers(1, 6))
    if dynamic:
        sig = gen_signal_dynamic_range(200, L, d, 0.5, 3.0, seed=seed)
    else:
        sig = gen_signal(200, L, d, float(g.uniform(0.2, 3.0)), seed=seed)
    k = int(g.integers(0, L))
    selected = list(g.choice(sig.support, k, replace=False))
    noise = sample_noise(GaussianNoise(sigma, (100, d)), seed=seed)
    return sig, noise, selected


def test_full_selection_noiseless_is_zero(designed):
    sig = gen_signal(200, 4, 3, 1.0, seed=1)
    diag = iteration_diagnostics(designed, sig, np.zeros((100, 3)), sig.support)
    assert diag.q1 <= 1e-12 and diag.q2 <= 1e-12 and diag.z == 0.0


def test_rejects_wrong_partial_selection(designed):
    sig = gen_signal(200, 3, 2, 1.0, seed=2)
    wrong = next(i for i in range(200) if i not in sig.support)
    with pytest.raises(DomainError):
        iteration_diagnostics(designed, sig, np.zeros((100, 2)), [wrong])


def test_margin_example():
    assert correct_selection_margin(1, 0.0) == 2.0
    assert correct_selection_margin(4, 0.0782) == pytest.approx(2 * 0.7654 / 0.4526, rel=1e-12)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.booleans())
def test_iteration_bound_chain(designed, seed, L, dynamic):
    phi, mu = designed.matrix, designed.mu
    sig, noise, selected = _partial(seed, L, dynamic)
    diag = iteration_diagnostics(phi, sig, noise, selected)
    assert min(diag.q1, diag.q2, diag.z) >= 0
    # ERC constant against its coherence bound
    assert diag.g == pytest.approx(erc_constant(phi, sig.support))
    assert diag.g <= erc_upper_bound(mu, L) + SLACK
    # Q2 <= G Q1
    assert diag.q2 <= diag.g * diag.q1 + SLACK
    # lower bound on Q1
    assert diag.q1 >= q1_lower_bound(sig, selected, mu) - SLACK
    # projecting out selected atoms cannot lower the smallest eigenvalue
    full, projected = projected_min_eig(phi, sig.support, selected)
    assert projected >= full - SLACK
    assert full >= gram_min_eig_lower_bound(mu, L) - SLACK


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.sampled_from([0.02, 0.1, 0.3]))
def test_correct_pick_when_signal_dominates(designed, seed, L, sigma):
    phi, mu = designed.matrix, designed.mu
    sig, noise, selected = _partial(seed, L, sigma=sigma)
    diag = iteration_diagnostics(phi, sig, noise, selected)
    y = phi @ sig.to_dense() + noise
    r = _residual(phi[:, selected], y) if selected else y
    nxt = _pick(phi, r, selected)
    if diag.q1 > correct_selection_margin(L, mu) * diag.z:
        assert nxt in sig.support
