import numpy as np
import pytest

from rmtlab.ensembles import RngStream, hurwitz_sample


def random_state(n_qubits: int, seed: int) -> np.ndarray:
    """Haar-random pure state on n qubits."""
    g = RngStream(seed, 0xABCDEF).generator()
    psi = g.standard_normal(2**n_qubits) + 1j * g.standard_normal(2**n_qubits)
    return psi / np.linalg.norm(psi)


def random_unitary(N: int, seed: int) -> np.ndarray:
    return hurwitz_sample(N, 1.0, RngStream(seed, 0x5EED))


def dense_purity_oracle(psi: np.ndarray, j: int) -> float:
    """Tr[rho_j^2] via the full 2^n x 2^n density matrix and an explicit
    partial trace (independent of the grouped-amplitude implementation)."""
    n = int(np.log2(psi.size))
    rho = np.outer(psi, psi.conj())
    rho = rho.reshape((2,) * (2 * n))
    # trace out every qubit except j (1-based, MSB first)
    keep = j - 1
    axes = [k for k in range(n) if k != keep]
    for k in reversed(axes):
        rho = np.trace(rho, axis1=k, axis2=k + rho.ndim // 2)
    return float(np.trace(rho @ rho).real)


@pytest.fixture(scope="session")
def base_rng():
    return RngStream(20240817)
