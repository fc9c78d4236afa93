"""Dense complex linear algebra: operators, states, spectra, DFTs, purities.

Operators are plain (N, N) complex128 ndarrays, states are length-2**n
complex128 ndarrays.  Qubit 1 is the most significant bit of the
basis-state index, so ``|b>`` with index ``b = 0b10`` on two qubits is
``|10>`` (qubit 1 in state 1).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    IndexOutOfRange,
    NotPowerOfTwo,
    NotUnitary,
)

# Per-dimension tolerance: N=256 double-precision round-off passes with margin.
UNITARITY_TOL = 1e-10


class SpectralData(NamedTuple):
    """Eigenphases in [0, 2pi) sorted ascending; column l of `vectors` is
    the eigenvector belonging to phases[l]."""

    phases: np.ndarray
    vectors: np.ndarray


def unitarity_residual(U: np.ndarray) -> float:
    """max |(U^dag U - I)_ij|."""
    U = np.asarray(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def is_unitary(U: np.ndarray, tol_per_dim: float = UNITARITY_TOL) -> bool:
    return unitarity_residual(U) <= tol_per_dim * U.shape[0]


def num_qubits(dim: int) -> int:
    """n such that dim == 2**n, or raise NotPowerOfTwo."""
    n = int(dim).bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise NotPowerOfTwo(f"dimension {dim} is not a power of two")
    return n


def apply(U: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """U @ psi with a dimension check."""
    U = np.asarray(U)
    psi = np.asarray(psi)
    if U.shape[1] != psi.shape[0]:
        raise DimensionMismatch(
            f"operator dim {U.shape[1]} != state dim {psi.shape[0]}"
        )
    return U @ psi


def iterate(U: np.ndarray, psi: np.ndarray, t: int) -> np.ndarray:
    """U^t psi by t repeated applications (no matrix powering)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    out = psi
    for _ in range(t):
        out = apply(U, out)
    return out


def matrix_power(U: np.ndarray, t: int) -> np.ndarray:
    """U^t as a dense matrix, for element statistics of iterated maps."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return np.linalg.matrix_power(np.asarray(U), t)


def spectral_decomposition(U: np.ndarray) -> SpectralData:
    """Eigenphases and an orthonormal eigenbasis of a unitary U.

    Uses a complex Schur decomposition; for a (normal) unitary matrix the
    Schur form is diagonal up to round-off, so the Schur basis is an
    orthonormal eigenbasis.
    """
    U = np.asarray(U, dtype=np.complex128)
    N = U.shape[0]
    res = unitarity_residual(U)
    if res > 1e-8 * N:
        raise NotUnitary(f"unitarity residual {res:.3e} exceeds {1e-8 * N:.3e}")
    try:
        T, Z = scipy.linalg.schur(U, output="complex")
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise ConvergenceFailure(str(exc)) from exc
    phases = np.mod(np.angle(np.diag(T)), 2 * np.pi)
    # angle() can return exactly pi -> 2pi after mod is impossible, but
    # guard the half-open interval anyway.
    phases[phases >= 2 * np.pi] = 0.0
    order = np.argsort(phases, kind="stable")
    return SpectralData(phases[order], Z[:, order])


def reconstruct(spectral: SpectralData) -> np.ndarray:
    """Inverse of spectral_decomposition: V diag(e^{i theta}) V^dag."""
    V = spectral.vectors
    return (V * np.exp(1j * spectral.phases)) @ V.conj().T


def dft(N: int, half_shift: bool = False) -> np.ndarray:
    """Discrete Fourier matrix F[k, j] = exp(-2pi i (k+s)(j+s)/N)/sqrt(N).

    s = 1/2 with half_shift (antiperiodic boundary conditions), else 0.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    idx = np.arange(N) + (0.5 if half_shift else 0.0)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / N) / np.sqrt(N)


def reduced_qubit_matrix(psi: np.ndarray, j: int) -> np.ndarray:
    """2x2 reduced density matrix of qubit j (1-based, MSB first)."""
    psi = np.asarray(psi)
    n = num_qubits(psi.shape[0])
    if not 1 <= j <= n:
        raise IndexOutOfRange(f"qubit index {j} outside 1..{n}")
    m = psi.reshape(2 ** (j - 1), 2, 2 ** (n - j))
    m = np.moveaxis(m, 1, 0).reshape(2, -1)
    return m @ m.conj().T


def qubit_purity(psi: np.ndarray, j: int) -> float:
    """Tr[rho_j^2] for the single-qubit reduced density matrix; in [1/2, 1]."""
    rho = reduced_qubit_matrix(psi, j)
    return float(np.sum(np.abs(rho) ** 2))
