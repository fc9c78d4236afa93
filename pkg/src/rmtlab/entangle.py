"""Meyer-Wallach entanglement Q and averages over computational basis states.

Q = 2 - (2/n) sum_j Tr[rho_j^2]: the mean linear entropy of each qubit
against the rest.  Q = 0 for product states, 1 when every qubit is
maximally mixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingleQubit
from .qcore import num_qubits, qubit_purity


def meyer_wallach_q(psi: np.ndarray) -> float:
    """Q of a pure state via the per-qubit reduced purities."""
    psi = np.asarray(psi)
    n = num_qubits(psi.shape[0])
    if n < 2:
        raise SingleQubit("Q needs at least two qubits")
    total = sum(qubit_purity(psi, j) for j in range(1, n + 1))
    return 2.0 - (2.0 / n) * total


def columns_q(S: np.ndarray) -> np.ndarray:
    """Q for every column of an (2**n, M) array of states, vectorized."""
    N, M = S.shape
    n = num_qubits(N)
    if n < 2:
        raise SingleQubit("Q needs at least two qubits")
    total = np.zeros(M)
    for j in range(1, n + 1):
        m = S.reshape(2 ** (j - 1), 2, 2 ** (n - j), M)
        rho = np.einsum("aqbm,apbm->mqp", m, m.conj())
        total += np.sum(np.abs(rho) ** 2, axis=(1, 2))
    return 2.0 - (2.0 / n) * total


def _evolved_basis(U: np.ndarray, t: int) -> np.ndarray:
    """Columns U^t |b> for all basis states, by repeated application."""
    S = np.eye(U.shape[0], dtype=np.complex128)
    for _ in range(t):
        S = U @ S
    return S


def average_q_over_basis(U: np.ndarray, t: int = 1) -> float:
    """Mean Q of all 2**n computational basis states after t iterations."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return float(np.mean(columns_q(_evolved_basis(U, t))))


def q_distribution(operators, t: int = 1) -> np.ndarray:
    """Pooled Q samples, one per (operator, basis state) pair, sorted."""
    samples = [columns_q(_evolved_basis(np.asarray(U), t)) for U in operators]
    return np.sort(np.concatenate(samples))


@dataclass
class QTimeSeries:
    times: np.ndarray
    mean_q: np.ndarray
    per_state: np.ndarray | None = field(default=None)  # (2**n, T) when kept

    def to_csv(self) -> str:
        lines = ["t,mean_q"]
        if self.per_state is not None:
            n_states = self.per_state.shape[0]
            lines[0] += "," + ",".join(f"q_state_{i}" for i in range(n_states))
        for idx, t in enumerate(self.times):
            row = f"{int(t)},{self.mean_q[idx]:.17g}"
            if self.per_state is not None:
                row += "," + ",".join(
                    f"{v:.17g}" for v in self.per_state[:, idx]
                )
            lines.append(row)
        return "\n".join(lines) + "\n"


def q_time_series(U: np.ndarray, t_max: int, keep_per_state: bool = False) -> QTimeSeries:
    """<Q(t)> for t = 1..t_max by incremental evolution of every basis state."""
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    U = np.asarray(U)
    S = np.eye(U.shape[0], dtype=np.complex128)
    times = np.arange(1, t_max + 1)
    mean_q = np.empty(t_max)
    per_state = np.empty((U.shape[0], t_max)) if keep_per_state else None
    for idx in range(t_max):
        S = U @ S
        q = columns_q(S)
        mean_q[idx] = np.mean(q)
        if per_state is not None:
            per_state[:, idx] = q
    return QTimeSeries(times, mean_q, per_state)
