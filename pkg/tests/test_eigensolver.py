import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinqpt.lattice import chain, enumerate_sector
from spinqpt.models import HamiltonianAction, hamiltonian_dense, xxz
from spinqpt.eigensolver import dense_spectrum, lanczos_lowest_k, ConvergenceError


def test_two_by_two_exchange_block():
    sol = dense_spectrum(np.array([[0.0, 0.5], [0.5, 0.0]]))
    assert np.allclose(sol.energies, [-0.5, 0.5])


def test_heisenberg_ring_ground_energy():
    # frozen from the independent Kronecker oracle: E0(N=4, Delta=1) = -2
    basis = enumerate_sector(chain(4), None)
    sol = dense_spectrum(hamiltonian_dense(xxz(1.0), basis))
    assert sol.energies[0] == pytest.approx(-2.0, abs=1e-12)
    distinct = np.unique(np.round(sol.energies, 9))
    assert distinct[0] == pytest.approx(-2.0) and distinct[1] == pytest.approx(-1.0)


def test_shift_invariance():
    rng = np.random.RandomState(0)
    m = rng.standard_normal((12, 12))
    m = m + m.T
    base = dense_spectrum(m)
    shifted = dense_spectrum(m + 2.5 * np.eye(12))
    assert np.allclose(shifted.energies, base.energies + 2.5, atol=1e-10)
    assert np.allclose(np.abs(shifted.vectors), np.abs(base.vectors), atol=1e-8)


def test_rejects_non_symmetric():
    with pytest.raises(ValueError):
        dense_spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_dense_reconstruction():
    basis = enumerate_sector(chain(6), 0)
    m = hamiltonian_dense(xxz(0.5), basis)
    sol = dense_spectrum(m)
    rebuilt = sol.vectors @ np.diag(sol.energies) @ sol.vectors.T
    assert np.max(np.abs(m - rebuilt)) <= 1e-9 * max(1.0, np.max(np.abs(m)))


def test_lanczos_matches_dense_sector():
    basis = enumerate_sector(chain(8), 0)   # dimension 70
    model = xxz(1.0)
    dense = dense_spectrum(hamiltonian_dense(model, basis))
    action = HamiltonianAction(model, basis)
    lanc = lanczos_lowest_k(action, basis.dimension, 6)
    assert np.allclose(lanc.energies, dense.energies[:6], atol=1e-10)
    assert np.max(lanc.residuals) <= 1e-9
    gram = lanc.vectors.T @ lanc.vectors
    assert np.max(np.abs(gram - np.eye(6))) <= 1e-10


def test_lanczos_resolves_degenerate_triplet():
    # Heisenberg N=4 full space: levels (E0, -1 x3) with an exact triplet
    basis = enumerate_sector(chain(4), None)
    action = HamiltonianAction(xxz(1.0), basis)
    sol = lanczos_lowest_k(action, 16, 4)
    assert sol.energies[0] == pytest.approx(-2.0, abs=1e-10)
    assert np.allclose(sol.energies[1:], -1.0, atol=1e-10)


def test_lanczos_full_spectrum_small_sector():
    basis = enumerate_sector(chain(4), 0)  # dimension 6
    model = xxz(0.7)
    dense = dense_spectrum(hamiltonian_dense(model, basis))
    action = HamiltonianAction(model, basis)
    lanc = lanczos_lowest_k(action, 6, 6)
    assert np.allclose(lanc.energies, dense.energies, atol=1e-10)


def test_lanczos_deterministic():
    basis = enumerate_sector(chain(8), 0)
    action = HamiltonianAction(xxz(0.5), basis)
    a = lanczos_lowest_k(action, basis.dimension, 3, seed=0x5EED)
    b = lanczos_lowest_k(action, basis.dimension, 3, seed=0x5EED)
    assert np.array_equal(a.energies, b.energies)
    assert np.array_equal(a.vectors, b.vectors)


def test_lanczos_ground_estimate_monotone():
    basis = enumerate_sector(chain(10), 0)
    action = HamiltonianAction(xxz(1.0), basis)
    sol = lanczos_lowest_k(action, basis.dimension, 2, check_every=1)
    hist = np.array(sol.meta["ritz_history"])
    assert len(hist) > 3
    assert np.all(np.diff(hist) <= 1e-12)


def test_lanczos_input_validation():
    action = lambda v: v
    with pytest.raises(ValueError):
        lanczos_lowest_k(action, 4, 0)
    with pytest.raises(ValueError):
        lanczos_lowest_k(action, 4, 5)


def test_lanczos_raises_on_impossible_budget():
    basis = enumerate_sector(chain(10), 0)
    action = HamiltonianAction(xxz(1.0), basis)
    with pytest.raises(ConvergenceError):
        lanczos_lowest_k(action, basis.dimension, 4, max_iter=3, max_restarts=1)


def test_phase_convention_largest_amplitude_positive():
    basis = enumerate_sector(chain(6), 0)
    sol = dense_spectrum(hamiltonian_dense(xxz(1.0), basis))
    for c in range(sol.k):
        v = sol.vectors[:, c]
        assert v[np.argmax(np.abs(v))] > 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_lanczos_oracle_equivalence_random_symmetric(seed):
    rng = np.random.RandomState(seed)
    dim = rng.randint(8, 40)
    m = rng.standard_normal((dim, dim))
    m = 0.5 * (m + m.T)
    dense = dense_spectrum(m)
    k = rng.randint(1, min(5, dim) + 1)
    lanc = lanczos_lowest_k(lambda v: m @ v, dim, k, seed=seed)
    assert np.allclose(lanc.energies, dense.energies[:k], atol=1e-9)
