import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_purity_oracle, random_state, random_unitary
from rmtlab import qcore
from rmtlab.errors import DimensionMismatch, IndexOutOfRange, NotUnitary

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_apply_identity():
    psi = random_state(2, 1)
    assert np.allclose(qcore.apply(np.eye(4), psi), psi)


def test_apply_bit_flip():
    ket0 = np.array([1, 0], dtype=complex)
    assert np.allclose(qcore.apply(SIGMA_X, ket0), [0, 1])


def test_apply_nnc_diagonal_eigenstate():
    from rmtlab.circuits import nn_coupling

    ket11 = np.zeros(4, dtype=complex)
    ket11[3] = 1.0
    out = qcore.apply(nn_coupling(2), ket11)
    # z1 z2 = (-1)(-1) = +1, so |11> picks up e^{i pi/4}
    assert np.allclose(out, np.exp(1j * np.pi / 4) * ket11)


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        qcore.apply(np.eye(4), np.zeros(8))


def test_iterate_single_step_and_involution():
    psi = random_state(1, 2)
    assert np.allclose(qcore.iterate(SIGMA_X, psi, 1), qcore.apply(SIGMA_X, psi))
    ket0 = np.array([1, 0], dtype=complex)
    assert np.allclose(qcore.iterate(SIGMA_X, ket0, 2), ket0)


def test_matrix_power_trivial_and_diagonal():
    U = random_unitary(8, 3)
    assert np.allclose(qcore.matrix_power(U, 1), U)
    thetas = np.array([0.3, 1.1, 2.9, 4.0])
    D = np.diag(np.exp(1j * thetas))
    assert np.allclose(qcore.matrix_power(D, 7), np.diag(np.exp(7j * thetas)))


def test_spectral_identity():
    spec = qcore.spectral_decomposition(np.eye(4))
    assert np.allclose(spec.phases, 0)


def test_spectral_sigma_x():
    spec = qcore.spectral_decomposition(SIGMA_X)
    assert np.allclose(spec.phases, [0, np.pi])
    # eigenvectors (1,1)/sqrt2 and (1,-1)/sqrt2 up to phase
    for col, expect in zip(spec.vectors.T, ([1, 1], [1, -1])):
        expect = np.array(expect) / np.sqrt(2)
        assert abs(abs(np.vdot(col, expect)) - 1) < 1e-12


def test_spectral_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        qcore.spectral_decomposition(np.ones((3, 3)))


def test_spectral_reconstruction_large():
    U = random_unitary(256, 4)
    spec = qcore.spectral_decomposition(U)
    assert np.max(np.abs(qcore.reconstruct(spec) - U)) < 1e-9
    assert np.max(np.abs(spec.vectors.conj().T @ spec.vectors - np.eye(256))) < 1e-10
    assert np.all(spec.phases >= 0) and np.all(spec.phases < 2 * np.pi)
    assert np.all(np.diff(spec.phases) >= 0)


def test_dft_trivial_and_hadamard():
    assert np.allclose(qcore.dft(1), [[1]])
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert np.allclose(qcore.dft(2), H)


@pytest.mark.parametrize("N", [2, 4, 8, 256])
@pytest.mark.parametrize("half_shift", [False, True])
def test_dft_unitary(N, half_shift):
    F = qcore.dft(N, half_shift)
    assert np.max(np.abs(F.conj().T @ F - np.eye(N))) < 1e-12


def test_qubit_purity_examples():
    ket00 = np.array([1, 0, 0, 0], dtype=complex)
    assert qcore.qubit_purity(ket00, 1) == pytest.approx(1.0)
    bell = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    assert qcore.qubit_purity(bell, 1) == pytest.approx(0.5)
    w = np.zeros(8, dtype=complex)
    w[[1, 2, 4]] = 1 / np.sqrt(3)
    for j in (1, 2, 3):
        # rho_j = diag(2/3, 1/3) by explicit partial trace
        assert qcore.qubit_purity(w, j) == pytest.approx(5 / 9)


def test_qubit_purity_index_range():
    with pytest.raises(IndexOutOfRange):
        qcore.qubit_purity(np.array([1, 0, 0, 0], dtype=complex), 3)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 4), st.integers(1, 4))
def test_purity_matches_dense_oracle(seed, n, j):
    if j > n:
        j = n
    psi = random_state(n, seed)
    assert qcore.qubit_purity(psi, j) == pytest.approx(
        dense_purity_oracle(psi, j), abs=1e-12
    )


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 4, 8, 16]))
def test_unitary_preserves_norm(seed, N):
    U = random_unitary(N, seed)
    psi = random_state(int(np.log2(N)), seed + 1)
    assert abs(np.linalg.norm(qcore.apply(U, psi)) - 1) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 4, 8, 16]))
def test_spectral_roundtrip_small(seed, N):
    U = random_unitary(N, seed)
    spec = qcore.spectral_decomposition(U)
    assert np.max(np.abs(qcore.reconstruct(spec) - U)) < 1e-9


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 20))
def test_matrix_power_matches_iterate(seed, t):
    U = random_unitary(16, seed)
    psi = random_state(4, seed + 7)
    assert np.allclose(
        qcore.apply(qcore.matrix_power(U, t), psi),
        qcore.iterate(U, psi, t),
        atol=1e-9,
    )


def test_matrix_power_matches_iterate_large():
    U = random_unitary(256, 11)
    psi = random_state(8, 12)
    assert np.allclose(
        qcore.apply(qcore.matrix_power(U, 100), psi),
        qcore.iterate(U, psi, 100),
        atol=1e-9,
    )
