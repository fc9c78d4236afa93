"""On-disk formats for operators, states, and reference libraries.

JSON schema
    operator: {"kind": "operator", "dim": N, "entries": [[re, im], ...]}
              entries row-major, length N*N.
    state:    {"kind": "state", "n_qubits": n, "amplitudes": [[re, im], ...]}

Binary format (little endian)
    magic "RMTL", uint32 dim, then the payload as float64 re/im pairs:
    2*dim*dim values for an operator, 2*dim values for a state.
    Round-trips are bit-exact.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile

import numpy as np

from .errors import ValidationError
from .qcore import num_qubits

MAGIC = b"RMTL"


def atomic_write_bytes(path: str, data: bytes) -> None:
    """Write via a temp file and atomic rename; no partial files on interrupt."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _pairs(z: np.ndarray) -> list:
    return [[float(v.real), float(v.imag)] for v in z.ravel()]


def _from_pairs(pairs, count: int) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.shape != (count, 2):
        raise ValidationError(f"expected {count} [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def operator_to_json(U: np.ndarray) -> str:
    U = np.asarray(U, dtype=np.complex128)
    return json.dumps({"kind": "operator", "dim": U.shape[0], "entries": _pairs(U)})


def operator_from_json(text: str) -> np.ndarray:
    doc = json.loads(text)
    if doc.get("kind") != "operator":
        raise ValidationError("not an operator JSON document")
    N = int(doc["dim"])
    return _from_pairs(doc["entries"], N * N).reshape(N, N)


def state_to_json(psi: np.ndarray) -> str:
    psi = np.asarray(psi, dtype=np.complex128)
    n = num_qubits(psi.shape[0])
    return json.dumps({"kind": "state", "n_qubits": n, "amplitudes": _pairs(psi)})


def state_from_json(text: str) -> np.ndarray:
    doc = json.loads(text)
    if doc.get("kind") != "state":
        raise ValidationError("not a state JSON document")
    n = int(doc["n_qubits"])
    return _from_pairs(doc["amplitudes"], 2**n)


def operator_to_bytes(U: np.ndarray) -> bytes:
    U = np.ascontiguousarray(U, dtype=np.complex128)
    header = MAGIC + struct.pack("<I", U.shape[0])
    return header + U.astype("<c16", copy=False).tobytes()


def state_to_bytes(psi: np.ndarray) -> bytes:
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    header = MAGIC + struct.pack("<I", psi.shape[0])
    return header + psi.astype("<c16", copy=False).tobytes()


def _read_header(data: bytes) -> int:
    if data[:4] != MAGIC:
        raise ValidationError("bad magic; not an RMTL binary file")
    return struct.unpack("<I", data[4:8])[0]


def operator_from_bytes(data: bytes) -> np.ndarray:
    N = _read_header(data)
    payload = np.frombuffer(data, dtype="<c16", offset=8)
    if payload.size != N * N:
        raise ValidationError(f"expected {N * N} complex values, got {payload.size}")
    return payload.reshape(N, N).astype(np.complex128)


def state_from_bytes(data: bytes) -> np.ndarray:
    dim = _read_header(data)
    payload = np.frombuffer(data, dtype="<c16", offset=8)
    if payload.size != dim:
        raise ValidationError(f"expected {dim} complex values, got {payload.size}")
    return payload.astype(np.complex128)


def save_operator(path: str, U: np.ndarray) -> None:
    if str(path).endswith(".json"):
        atomic_write_text(path, operator_to_json(U))
    else:
        atomic_write_bytes(path, operator_to_bytes(U))


def load_operator(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] == MAGIC:
        return operator_from_bytes(data)
    return operator_from_json(data.decode("utf-8"))


def save_state(path: str, psi: np.ndarray) -> None:
    if str(path).endswith(".json"):
        atomic_write_text(path, state_to_json(psi))
    else:
        atomic_write_bytes(path, state_to_bytes(psi))


def load_state(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] == MAGIC:
        return state_from_bytes(data)
    return state_from_json(data.decode("utf-8"))
