import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmtlab.circuits import (
    PseudoRandomSpec,
    nn_coupling,
    parse_circuit_spec,
    pseudo_random_operator,
    rotation_layer,
)
from rmtlab.ensembles import RngStream, _su2
from rmtlab.entangle import columns_q, meyer_wallach_q
from rmtlab.errors import TooFewQubits, ValidationError
from rmtlab.qcore import is_unitary

RNG = RngStream(271828)


def test_nn_coupling_entries_two_qubits():
    C = nn_coupling(2)
    assert np.allclose(np.diag(C), np.exp(1j * np.pi / 4 * np.array([1, -1, -1, 1])))


def test_nn_coupling_three_qubits_example():
    C = nn_coupling(3)
    # |010>: z = (+1, -1, +1), zz sum = -2
    assert C[2, 2] == pytest.approx(np.exp(-1j * np.pi / 2))


def test_nn_coupling_open_chain():
    # |100> on 3 qubits: pairs (1,2) and (2,3) give -1 + 1 = 0; a ring would add z3 z1 = -1
    C = nn_coupling(3)
    assert C[4, 4] == pytest.approx(1.0)


def test_nn_coupling_too_few():
    with pytest.raises(TooFewQubits):
        nn_coupling(1)


def test_rotation_layer_single_qubit_is_su2():
    R = rotation_layer(1, RNG.substream("rl", 0))
    assert R.shape == (2, 2)
    assert is_unitary(R)


def test_rotation_layer_matches_kronecker_oracle():
    stream = RNG.substream("rl", 1)
    layer = rotation_layer(2, stream)
    g = stream.generator()
    r1, r2 = _su2(g), _su2(g)
    assert np.allclose(layer, np.kron(r1, r2), atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_rotation_layer_unitary(n):
    R = rotation_layer(n, RNG.substream("rl", n))
    assert is_unitary(R)


def test_pseudo_random_m0_is_product_of_rotations():
    spec = PseudoRandomSpec(2, 0, RNG.substream("pr0"))
    U = pseudo_random_operator(spec)
    assert is_unitary(U)
    # local unitaries generate no entanglement from basis states
    assert np.allclose(columns_q(U), 0, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(0, 6))
def test_pseudo_random_unitary(seed, n, m):
    U = pseudo_random_operator(PseudoRandomSpec(n, m, RngStream(seed, 77)))
    assert is_unitary(U)


def test_pseudo_random_composition_order():
    """Reconstruct the matrix from the recorded layer draws."""
    stream = RNG.substream("order")
    spec = PseudoRandomSpec(3, 2, stream)
    U = pseudo_random_operator(spec)
    g = stream.generator()
    layers = []
    for _ in range(3):  # two iterations plus the closing layer
        R = _su2(g)
        for _ in range(2):
            R = np.kron(R, _su2(g))
        layers.append(R)
    C = nn_coupling(3)
    expected = layers[2] @ C @ layers[1] @ C @ layers[0]
    assert np.allclose(U, expected, atol=1e-13)


def test_pseudo_random_entangles_more_with_m():
    rng = RNG.substream("growth")
    means = []
    for m in (0, 2, 8):
        q = [
            np.mean(columns_q(pseudo_random_operator(PseudoRandomSpec(4, m, rng.substream(f"m{m}", k)))))
            for k in range(20)
        ]
        means.append(np.mean(q))
    assert means[0] < 1e-9
    assert means[0] < means[1] < means[2]


def test_parse_circuit_spec():
    _, sampler = parse_circuit_spec("pseudo:3:2")
    U = sampler(RNG.substream("parse"))
    assert U.shape == (8, 8)
    with pytest.raises(ValidationError):
        parse_circuit_spec("pseudo:3")
    with pytest.raises(ValidationError):
        parse_circuit_spec("random:3:2")
