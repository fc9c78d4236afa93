"""Empirical distributions, reference CDFs, KS distances, and delta fitting.

The randomness of a distribution is quantified by the interpolating-ensemble
parameter delta of its best-fitting reference distribution (two-sample KS
objective).  Matrix-element distributions are fitted against eigenvector
references; eigenphase-spacing fits are exposed for the eigenvalue fits.
"""

from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .ensembles import RngStream, hurwitz_sample
from .errors import EmptySample, MissingReferenceKind, ValidationError
from .qcore import SpectralData, spectral_decomposition
from .serialize import atomic_write_bytes

EIGENVECTOR_AMPLITUDE = "eigenvector_amplitude"
EIGENPHASE_SPACING = "eigenphase_spacing"

# Histogram defaults matching the figures' visible ranges; output only,
# never used in fits.
AMPLITUDE_RANGE = (0.0, 8.0)
SPACING_RANGE = (0.0, 4.0)
DEFAULT_BINS = 50

_REF_MAGIC = b"RMTREF1"


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample set with an ECDF and an optional histogram view."""

    samples: np.ndarray

    @classmethod
    def from_samples(cls, values) -> "EmpiricalDistribution":
        return cls(np.sort(np.asarray(values, dtype=np.float64).ravel()))

    @property
    def size(self) -> int:
        return self.samples.size

    def mean(self) -> float:
        return float(np.mean(self.samples))

    def cdf(self, x) -> np.ndarray:
        """(# samples <= x) / M, vectorized."""
        return np.searchsorted(self.samples, x, side="right") / self.size

    def thinned(self, max_samples: int) -> "EmpiricalDistribution":
        """Deterministic stride subsample of the order statistics; the ECDF
        moves by at most 1/max_samples."""
        if self.size <= max_samples:
            return self
        idx = np.linspace(0, self.size - 1, max_samples).round().astype(np.int64)
        return EmpiricalDistribution(self.samples[idx])

    def histogram(self, bins: int = DEFAULT_BINS, range_=AMPLITUDE_RANGE):
        """(edges, density); density integrates to 1 over the in-range samples."""
        counts, edges = np.histogram(self.samples, bins=bins, range=range_)
        total = counts.sum()
        widths = np.diff(edges)
        density = counts / (total * widths) if total else np.zeros(bins)
        return edges, density


def pooled(dists) -> EmpiricalDistribution:
    return EmpiricalDistribution(
        np.sort(np.concatenate([d.samples for d in dists]))
    )


def element_amplitudes(U: np.ndarray) -> EmpiricalDistribution:
    """All N^2 rescaled element amplitudes x = N |U_ij|^2, sorted."""
    U = np.asarray(U)
    if U.shape[0] != U.shape[1]:
        raise ValidationError("operator must be square")
    return EmpiricalDistribution.from_samples(U.shape[0] * np.abs(U) ** 2)


def eigenvector_amplitudes(spectral: SpectralData) -> EmpiricalDistribution:
    """All N^2 rescaled eigenvector amplitudes y = N |c^l_k|^2, sorted."""
    V = spectral.vectors
    return EmpiricalDistribution.from_samples(V.shape[0] * np.abs(V) ** 2)


def eigenphase_spacings(spectral: SpectralData) -> EmpiricalDistribution:
    """N consecutive eigenphase gaps on the circle (wrap-around included),
    rescaled by N/(2 pi) so the sample mean is exactly 1."""
    phases = np.sort(spectral.phases)
    N = phases.size
    if N < 2:
        raise ValidationError("need at least two eigenphases")
    gaps = np.empty(N)
    gaps[:-1] = np.diff(phases)
    gaps[-1] = phases[0] + 2 * np.pi - phases[-1]
    return EmpiricalDistribution.from_samples(gaps * N / (2 * np.pi))


def exponential_cdf(x):
    """CUE limit for rescaled element and eigenvector amplitudes: 1 - e^{-x}."""
    return 1.0 - np.exp(-np.asarray(x, dtype=np.float64))


poisson_spacing_cdf = exponential_cdf


def wigner_surmise_cdf(s):
    """beta = 2 Wigner surmise CDF: erf(2s/sqrt(pi)) - (4s/pi) e^{-4 s^2/pi}."""
    s = np.asarray(s, dtype=np.float64)
    return erf(2 * s / np.sqrt(np.pi)) - (4 * s / np.pi) * np.exp(-4 * s**2 / np.pi)


def ks_distance(A: EmpiricalDistribution, B) -> float:
    """Sup-norm CDF distance; B is an EmpiricalDistribution or a CDF callable.

    Both forms evaluate the CDFs at all sample points (pooled, for the
    two-sample form), so point masses compare exactly; against a continuous
    CDF this is within 1/M of the full supremum.
    """
    if A.size == 0:
        raise EmptySample("empty sample set")
    a = A.samples
    if isinstance(B, EmpiricalDistribution):
        if B.size == 0:
            raise EmptySample("empty sample set")
        pts = np.concatenate([a, B.samples])
        pts.sort(kind="stable")
        return float(np.max(np.abs(A.cdf(pts) - B.cdf(pts))))
    cdf = np.asarray(B(a), dtype=np.float64)
    return float(np.max(np.abs(A.cdf(a) - cdf)))


@dataclass(frozen=True)
class DeltaFitResult:
    best_delta: float
    distance: float
    reference_kind: str


@dataclass
class ReferenceLibrary:
    """Per-delta pooled reference distributions from the interpolating
    ensembles, for both eigenvector amplitudes and eigenphase spacings."""

    delta_grid: np.ndarray
    eigenvector_refs: list
    spacing_refs: list
    metadata: dict = field(default_factory=dict)

    def references(self, kind: str) -> list:
        if kind == EIGENVECTOR_AMPLITUDE:
            return self.eigenvector_refs
        if kind == EIGENPHASE_SPACING:
            return self.spacing_refs
        raise MissingReferenceKind(f"unknown reference kind {kind!r}")

    # --- persistence: magic, u32 header length, JSON metadata, then the
    # sample blocks as little-endian float64 in grid order (eigenvector
    # block then spacing block per delta).

    def to_bytes(self) -> bytes:
        meta = dict(self.metadata)
        meta["delta_grid"] = [float(d) for d in self.delta_grid]
        meta["eigenvector_counts"] = [d.size for d in self.eigenvector_refs]
        meta["spacing_counts"] = [d.size for d in self.spacing_refs]
        header = json.dumps(meta, sort_keys=True).encode("utf-8")
        buf = io.BytesIO()
        buf.write(_REF_MAGIC)
        buf.write(struct.pack("<I", len(header)))
        buf.write(header)
        for ev, sp in zip(self.eigenvector_refs, self.spacing_refs):
            buf.write(ev.samples.astype("<f8").tobytes())
            buf.write(sp.samples.astype("<f8").tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "ReferenceLibrary":
        if data[: len(_REF_MAGIC)] != _REF_MAGIC:
            raise ValidationError("bad magic; not a reference library file")
        off = len(_REF_MAGIC)
        (hlen,) = struct.unpack_from("<I", data, off)
        off += 4
        meta = json.loads(data[off : off + hlen].decode("utf-8"))
        off += hlen
        grid = np.asarray(meta.pop("delta_grid"), dtype=np.float64)
        ev_counts = meta.pop("eigenvector_counts")
        sp_counts = meta.pop("spacing_counts")
        ev_refs, sp_refs = [], []
        for ne, ns in zip(ev_counts, sp_counts):
            ev = np.frombuffer(data, dtype="<f8", count=ne, offset=off)
            off += 8 * ne
            sp = np.frombuffer(data, dtype="<f8", count=ns, offset=off)
            off += 8 * ns
            ev_refs.append(EmpiricalDistribution(ev.astype(np.float64)))
            sp_refs.append(EmpiricalDistribution(sp.astype(np.float64)))
        return cls(grid, ev_refs, sp_refs, meta)

    def save(self, path: str) -> None:
        atomic_write_bytes(path, self.to_bytes())
        manifest = dict(self.metadata)
        manifest["delta_grid"] = [float(d) for d in self.delta_grid]
        atomic_write_bytes(
            str(path) + ".json",
            json.dumps(manifest, sort_keys=True, indent=2).encode("utf-8"),
        )

    @classmethod
    def load(cls, path: str) -> "ReferenceLibrary":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def default_delta_grid(step: float = 0.02) -> np.ndarray:
    """0 to 1 inclusive; step below the reported delta precision."""
    n = int(round(1.0 / step))
    return np.round(np.linspace(0.0, 1.0, n + 1), 10)


def build_reference_library(
    N: int,
    grid,
    samples_per_delta: int,
    rng: RngStream,
    max_pool: int | None = 500_000,
) -> ReferenceLibrary:
    """Pool eigenvector-amplitude and spacing samples of hurwitz draws per
    delta.  Pools larger than max_pool are thinned (order-statistic stride)
    to bound memory; fits are insensitive at the 1/max_pool level."""
    grid = np.asarray(grid, dtype=np.float64)
    if np.any(grid < 0) or np.any(grid > 1):
        raise ValidationError("delta grid must lie in [0, 1]")
    if samples_per_delta < 1:
        raise ValidationError("samples_per_delta must be >= 1")
    ev_refs, sp_refs = [], []
    for gi, delta in enumerate(grid):
        ev_parts, sp_parts = [], []
        for k in range(samples_per_delta):
            stream = rng.substream(f"reflib/delta={delta:.10g}", k)
            U = hurwitz_sample(N, float(delta), stream)
            spec = spectral_decomposition(U)
            ev_parts.append(eigenvector_amplitudes(spec))
            sp_parts.append(eigenphase_spacings(spec))
        ev = pooled(ev_parts)
        sp = pooled(sp_parts)
        if max_pool is not None:
            ev = ev.thinned(max_pool)
            sp = sp.thinned(max_pool)
        ev_refs.append(ev)
        sp_refs.append(sp)
    metadata = {
        "dim": N,
        "samples_per_delta": samples_per_delta,
        "seed": rng.seed,
        "stream_id": rng.stream_id,
        "max_pool": max_pool,
        "format": 1,
    }
    return ReferenceLibrary(grid, ev_refs, sp_refs, metadata)


def delta_fit(
    target: EmpiricalDistribution,
    lib: ReferenceLibrary,
    kind: str = EIGENVECTOR_AMPLITUDE,
) -> DeltaFitResult:
    """Grid delta minimizing the two-sample KS distance to the reference of
    the requested kind; ties break toward larger delta."""
    if target.size == 0:
        raise EmptySample("empty target distribution")
    refs = lib.references(kind)
    best_delta, best_dist = None, None
    for delta, ref in zip(lib.delta_grid, refs):
        dist = ks_distance(target, ref)
        if best_dist is None or dist <= best_dist:
            best_delta, best_dist = float(delta), dist
    return DeltaFitResult(best_delta, best_dist, kind)
