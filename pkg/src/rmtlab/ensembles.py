"""Samplers: GUE, CUE (two constructions), CPE, interpolating ensembles, SU(2).

All sampling is driven by RngStream, a (seed, stream_id) pair mapped onto the
counter-based Philox generator, so identical streams reproduce bit-identical
matrices on every platform.  Distinct stream ids give independent streams.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import BadIndexOrder, IndexOutOfRange, ValidationError
from .qcore import dft  # noqa: F401  (re-exported for spec-string parsing users)

_MASK64 = (1 << 64) - 1

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


@dataclass(frozen=True)
class RngStream:
    """Seedable, forkable random stream (Philox counter-based generator)."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = ((self.seed & _MASK64) << 64) | (self.stream_id & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, tag: str, index: int = 0) -> "RngStream":
        """Derive an independent stream from a text tag and an item index."""
        h = hashlib.blake2b(digest_size=8)
        h.update(f"{self.stream_id & _MASK64}/{tag}/{index}".encode())
        return RngStream(self.seed, int.from_bytes(h.digest(), "little"))


def gue_sample(N: int, rng: RngStream) -> np.ndarray:
    """Hermitian GUE matrix: real N(0,1) diagonal, off-diagonal re/im each
    variance 1/2."""
    g = rng.generator()
    A = g.standard_normal((N, N)) + 1j * g.standard_normal((N, N))
    return (A + A.conj().T) / 2


def cue_from_gue(N: int, rng: RngStream) -> np.ndarray:
    """CUE matrix whose columns are GUE eigenvectors times random phases."""
    g = rng.generator()
    A = g.standard_normal((N, N)) + 1j * g.standard_normal((N, N))
    H = (A + A.conj().T) / 2
    _, vecs = np.linalg.eigh(H)
    phases = np.exp(2j * np.pi * g.random(N))
    return vecs * phases


def elementary_rotation(
    N: int, i: int, j: int, phi: float, psi: float, chi: float
) -> np.ndarray:
    """Two-level rotation acting on rows/columns i < j (1-based); det = 1."""
    if not (1 <= i <= N and 1 <= j <= N):
        raise IndexOutOfRange(f"indices ({i}, {j}) outside 1..{N}")
    if i >= j:
        raise BadIndexOrder(f"need i < j, got ({i}, {j})")
    E = np.eye(N, dtype=np.complex128)
    a, b = i - 1, j - 1
    E[a, a] = np.exp(1j * psi) * np.cos(phi)
    E[a, b] = np.exp(1j * chi) * np.sin(phi)
    E[b, a] = -np.exp(-1j * chi) * np.sin(phi)
    E[b, b] = np.exp(-1j * psi) * np.cos(phi)
    return E


def _su2(g: np.random.Generator) -> np.ndarray:
    psi = 2 * np.pi * g.random()
    chi = 2 * np.pi * g.random()
    phi = np.arcsin(np.sqrt(g.random()))
    c, s = np.cos(phi), np.sin(phi)
    return np.array(
        [
            [np.exp(1j * psi) * c, np.exp(1j * chi) * s],
            [-np.exp(-1j * chi) * s, np.exp(-1j * psi) * c],
        ]
    )


def su2_haar(rng: RngStream) -> np.ndarray:
    """Haar-random SU(2) rotation (the r = 0 two-level block)."""
    return _su2(rng.generator())


def _hurwitz_layout(N: int):
    """Static per-rotation layout, cached by dimension.

    Composite rotation s (s = 1..N-1) is a chain of s two-level rotations on
    column pairs (N-s-1, N-s), ..., (N-2, N-1) (0-based), with exponent index
    r running s-1 down to 0 along the chain; the last rotation of each chain
    carries the chi angle.  Rotations of chain s only touch rows >= N-1-s.
    """
    layout = _LAYOUT_CACHE.get(N)
    if layout is not None:
        return layout
    s = np.repeat(np.arange(1, N), np.arange(1, N))
    t = np.concatenate([np.arange(k) for k in range(1, N)])
    r = s - 1 - t
    cols = N - 1 - s + t
    row0 = N - 1 - s
    chain_end = t == s - 1
    layout = (cols, row0, r, chain_end)
    _LAYOUT_CACHE[N] = layout
    return layout


_LAYOUT_CACHE: dict = {}


def _hurwitz_angles(N: int, delta: float, g: np.random.Generator):
    """Draw the rotation coefficients (vectorized, fixed draw order: all xi,
    then all psi, then the per-chain chi, then alpha)."""
    cols, row0, r, chain_end = _hurwitz_layout(N)
    n_rot = cols.size
    xi = delta * g.random(n_rot) if delta < 1.0 else g.random(n_rot)
    psi = 2 * np.pi * delta * g.random(n_rot)
    chi = np.zeros(n_rot)
    chi[chain_end] = 2 * np.pi * delta * g.random(N - 1)
    base = xi ** (1.0 / (2 * r + 2))
    sin_phi = np.minimum(delta * base, 1.0) if delta < 1.0 else base
    cos_phi = np.sqrt(1.0 - sin_phi**2)
    eii = np.exp(1j * psi) * cos_phi
    eij = np.exp(1j * chi) * sin_phi
    eji = -np.exp(-1j * chi) * sin_phi
    ejj = np.exp(-1j * psi) * cos_phi
    alpha = 2 * np.pi * delta * g.random()
    return cols, row0, eii, eij, eji, ejj, alpha


def _apply_rotations_numpy(P, cols, row0, eii, eij, eji, ejj):
    for k in range(cols.size):
        a = cols[k]
        r = row0[k]
        ci = P[r:, a].copy()
        cj = P[r:, a + 1]
        P[r:, a] = eii[k] * ci + eji[k] * cj
        P[r:, a + 1] = eij[k] * ci + ejj[k] * cj


if _HAVE_NUMBA:

    @njit(cache=True)
    def _apply_rotations_numba(P, cols, row0, eii, eij, eji, ejj):  # pragma: no cover
        for k in range(cols.size):
            a = cols[k]
            r = row0[k]
            for m in range(r, P.shape[0]):
                ci = P[m, a]
                cj = P[m, a + 1]
                P[m, a] = eii[k] * ci + eji[k] * cj
                P[m, a + 1] = eij[k] * ci + ejj[k] * cj

    _apply_rotations = _apply_rotations_numba
else:  # pragma: no cover
    _apply_rotations = _apply_rotations_numpy


def hurwitz_sample(N: int, delta: float, rng: RngStream) -> np.ndarray:
    """Interpolating-ensemble unitary with parameter delta in [0, 1].

    delta = 1 is the exact Hurwitz CUE construction (no extra diagonal);
    delta < 1 constricts every angle interval by delta and left-multiplies by
    a diagonal of uniform random phases, so delta = 0 is the diagonal CPE.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValidationError(f"delta must be in [0, 1], got {delta}")
    g = rng.generator()
    P = np.eye(N, dtype=np.complex128)
    if N > 1:
        cols, row0, eii, eij, eji, ejj, alpha = _hurwitz_angles(N, delta, g)
        _apply_rotations(P, cols, row0, eii, eij, eji, ejj)
        P *= np.exp(1j * alpha)
    else:
        P *= np.exp(1j * 2 * np.pi * delta * g.random())
    if delta < 1.0:
        d = np.exp(2j * np.pi * g.random(N))
        P *= d[:, None]
    return P


def cpe_sample(N: int, rng: RngStream) -> np.ndarray:
    """Diagonal circular Poisson ensemble (interpolating ensemble at delta=0)."""
    return hurwitz_sample(N, 0.0, rng)


def parse_ensemble_spec(spec: str):
    """Parse "gue:N", "cue-gue:N", "cue-hurwitz:N", "interp:N:delta", "cpe:N"
    into a (name, sampler) pair where sampler(rng) draws one matrix."""
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "gue" and len(parts) == 2:
            N = int(parts[1])
            return spec, lambda rng: gue_sample(N, rng)
        if kind == "cue-gue" and len(parts) == 2:
            N = int(parts[1])
            return spec, lambda rng: cue_from_gue(N, rng)
        if kind == "cue-hurwitz" and len(parts) == 2:
            N = int(parts[1])
            return spec, lambda rng: hurwitz_sample(N, 1.0, rng)
        if kind == "interp" and len(parts) == 3:
            N, delta = int(parts[1]), float(parts[2])
            return spec, lambda rng: hurwitz_sample(N, delta, rng)
        if kind == "cpe" and len(parts) == 2:
            N = int(parts[1])
            return spec, lambda rng: cpe_sample(N, rng)
    except ValueError as exc:
        raise ValidationError(f"bad ensemble spec {spec!r}: {exc}") from exc
    raise ValidationError(f"unknown ensemble spec {spec!r}")
