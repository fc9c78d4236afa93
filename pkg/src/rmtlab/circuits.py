"""Pseudo-random n-qubit operators: Haar SU(2) layers + sigma_z coupling.

One iteration applies a fresh random SU(2) rotation to each qubit and then
the fixed nearest-neighbor coupling exp(i(pi/4) sum_j sigma_z^j sigma_z^{j+1})
(open chain, coupling pi/4 to maximize entanglement).  After m iterations a
final rotation layer closes the circuit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import RngStream, _su2
from .errors import TooFewQubits


@dataclass(frozen=True)
class PseudoRandomSpec:
    n_qubits: int
    iterations: int
    rng: RngStream


def nn_coupling(n: int) -> np.ndarray:
    """Diagonal coupling exp(i(pi/4) sum_{j=1}^{n-1} z_j z_{j+1}), where z_j
    is the sigma_z eigenvalue (+1 for bit 0) of qubit j (MSB first)."""
    if n < 2:
        raise TooFewQubits(f"need n >= 2, got {n}")
    b = np.arange(2**n)
    bits = (b[:, None] >> np.arange(n - 1, -1, -1)) & 1
    z = 1 - 2 * bits
    zz_sum = np.sum(z[:, :-1] * z[:, 1:], axis=1)
    return np.diag(np.exp(1j * (np.pi / 4) * zz_sum))


def rotation_layer(n: int, rng: RngStream) -> np.ndarray:
    """Tensor product of n independent Haar SU(2) rotations, qubit 1 leftmost."""
    g = rng.generator()
    return _rotation_layer(n, g)


def _rotation_layer(n: int, g: np.random.Generator) -> np.ndarray:
    out = _su2(g)
    for _ in range(n - 1):
        out = np.kron(out, _su2(g))
    return out


def pseudo_random_operator(spec: PseudoRandomSpec) -> np.ndarray:
    """(final layer) . prod_{k=m..1} [coupling . layer_k] as a dense matrix.

    Layers are drawn sequentially from the circuit spec's RNG stream, iteration 1 first
    and the closing layer last.  iterations = 0 returns just the final layer.
    """
    if spec.n_qubits < 2:
        raise TooFewQubits(f"need n >= 2, got {spec.n_qubits}")
    g = spec.rng.generator()
    C = nn_coupling(spec.n_qubits)
    U = np.eye(2**spec.n_qubits, dtype=np.complex128)
    for _ in range(spec.iterations):
        U = C @ (_rotation_layer(spec.n_qubits, g) @ U)
    return _rotation_layer(spec.n_qubits, g) @ U


def parse_circuit_spec(spec: str):
    """Parse "pseudo:n:m" into a (name, sampler) pair; sampler(rng) draws one
    operator."""
    from .errors import ValidationError

    parts = spec.split(":")
    if parts[0] != "pseudo" or len(parts) != 3:
        raise ValidationError(f"unknown circuit spec {spec!r}")
    try:
        n, m = int(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValidationError(f"bad circuit spec {spec!r}: {exc}") from exc
    return spec, lambda stream: pseudo_random_operator(PseudoRandomSpec(n, m, stream))
