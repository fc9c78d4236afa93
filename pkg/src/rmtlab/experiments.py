"""Experiment runners: figure reproductions, tables, and file-level tooling.

Every run resolves its configuration, fans independent matrix draws out to a
worker pool (deterministically: one substream per matrix index, aggregation
in index order), writes CSV/JSON artifacts atomically, and records a
manifest sufficient to replay the run bit-exactly.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, stats
from .chaosmaps import build_map, parse_map_spec
from .circuits import parse_circuit_spec
from .ensembles import RngStream, parse_ensemble_spec
from .entangle import columns_q, q_time_series
from .errors import ValidationError
from .qcore import matrix_power, spectral_decomposition
from .serialize import atomic_write_text, load_operator, save_operator

CUE_Q_MEAN = 0.9883  # random matrix average printed alongside the figures

FIG1_DELTAS = (0.1, 0.5, 0.9, 0.98)
FIG1_Q_DELTAS = (0.9, 0.98)
FIG2_M_VALUES = (2, 4, 8, 16)


@dataclass
class ExperimentConfig:
    experiment: str
    out_dir: str = "."
    seed: int = 20240817
    samples: int = 100
    t_max: int = 50
    dim: int = 256
    spec: str | None = None
    inputs: list = field(default_factory=list)
    ref_library: str | None = None
    threads: int = 1
    grid_step: float = 0.02
    lib_samples: int = 50
    fmt: str = "bin"  # operator output format for `gen`: "bin" | "json"

    def validate(self) -> None:
        if self.samples < 1:
            raise ValidationError("samples must be >= 1")
        if self.t_max < 1:
            raise ValidationError("t_max must be >= 1")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")


@dataclass
class RunReport:
    files: list
    scalars: dict
    timings: dict


def draw_operator(spec: str, rng: RngStream) -> np.ndarray:
    """One draw for any ensemble/circuit/map spec string.  Map specs are
    deterministic and ignore the stream."""
    kind = spec.split(":", 1)[0]
    if kind == "pseudo":
        _, sampler = parse_circuit_spec(spec)
        return sampler(rng)
    if kind in ("sawtooth", "harper", "baker"):
        return build_map(parse_map_spec(spec))
    _, sampler = parse_ensemble_spec(spec)
    return sampler(rng)


def _draw_task(args):
    spec, seed, stream_id = args
    return draw_operator(spec, RngStream(seed, stream_id))


def sample_operators(spec: str, rng: RngStream, count: int, threads: int = 1) -> list:
    """count independent draws, one substream per index; results are in index
    order regardless of scheduling."""
    streams = [rng.substream(spec, k) for k in range(count)]
    if threads > 1:
        tasks = [(spec, s.seed, s.stream_id) for s in streams]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_draw_task, tasks, chunksize=1))
    return [draw_operator(spec, s) for s in streams]


# --- output helpers -------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_csv(path: str, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_hist_csv(path: str, dist: stats.EmpiricalDistribution, range_) -> None:
    edges, density = dist.histogram(range_=range_)
    rows = zip(edges[:-1], edges[1:], density)
    write_csv(path, "bin_left,bin_right,density", rows)


def write_values_csv(path: str, dist: stats.EmpiricalDistribution) -> None:
    write_csv(path, "value", ((v,) for v in dist.samples))


def write_curve_csv(path: str, xs, ys, names=("x", "density")) -> None:
    write_csv(path, ",".join(names), zip(xs, ys))


def write_json(path: str, doc: dict) -> None:
    atomic_write_text(path, json.dumps(doc, sort_keys=True, indent=2) + "\n")


class _Run:
    """Collects output files/scalars/timings and writes manifest + report."""

    def __init__(self, config: ExperimentConfig):
        config.validate()
        self.config = config
        self.files: list = []
        self.scalars: dict = {}
        self.timings: dict = {}
        self._t0 = time.perf_counter()
        os.makedirs(config.out_dir, exist_ok=True)

    def path(self, name: str) -> str:
        full = os.path.join(self.config.out_dir, name)
        self.files.append(name)
        return full

    def mark(self, label: str) -> None:
        now = time.perf_counter()
        self.timings[label] = round(now - self._t0, 3)
        self._t0 = now

    def finish(self) -> RunReport:
        manifest = {
            "experiment": self.config.experiment,
            "config": asdict(self.config),
            "code_version": __version__,
            "outputs": sorted(self.files),
        }
        write_json(os.path.join(self.config.out_dir, "manifest.json"), manifest)
        report = RunReport(sorted(self.files), self.scalars, self.timings)
        write_json(
            os.path.join(self.config.out_dir, "report.json"),
            {"files": report.files, "scalars": report.scalars, "timings": report.timings},
        )
        return report


def _distribution_families(ops, with_spectral=True):
    """Pooled element/eigenvector/spacing/Q distributions for a matrix batch."""
    els = stats.pooled([stats.element_amplitudes(U) for U in ops])
    evs = sps = None
    if with_spectral:
        specs = [spectral_decomposition(U) for U in ops]
        evs = stats.pooled([stats.eigenvector_amplitudes(s) for s in specs])
        sps = stats.pooled([stats.eigenphase_spacings(s) for s in specs])
    qs = stats.EmpiricalDistribution.from_samples(
        np.concatenate([columns_q(np.asarray(U)) for U in ops])
    )
    return els, evs, sps, qs


def _write_reference_curves(run: _Run) -> None:
    xs = np.linspace(0.0, 8.0, 401)
    write_curve_csv(run.path("reference_exponential.csv"), xs, np.exp(-xs))
    ss = np.linspace(0.0, 4.0, 401)
    write_curve_csv(run.path("reference_poisson_spacing.csv"), ss, np.exp(-ss))
    surmise = (32 / np.pi**2) * ss**2 * np.exp(-4 * ss**2 / np.pi)
    write_curve_csv(run.path("reference_cue_surmise.csv"), ss, surmise)


def run_fig1(config: ExperimentConfig) -> RunReport:
    """Interpolating-ensemble distribution panels plus Q histograms."""
    run = _Run(config)
    rng = RngStream(config.seed)
    for delta in FIG1_DELTAS:
        tag = f"delta{delta:g}"
        ops = sample_operators(
            f"interp:{config.dim}:{delta:g}", rng, config.samples, config.threads
        )
        els, evs, sps, qs = _distribution_families(ops)
        write_hist_csv(run.path(f"fig1_spacing_{tag}.csv"), sps, stats.SPACING_RANGE)
        write_hist_csv(run.path(f"fig1_eigvec_{tag}.csv"), evs, stats.AMPLITUDE_RANGE)
        write_hist_csv(run.path(f"fig1_element_{tag}.csv"), els, stats.AMPLITUDE_RANGE)
        run.scalars[f"ks_element_{tag}"] = stats.ks_distance(els, stats.exponential_cdf)
        run.scalars[f"ks_eigvec_{tag}"] = stats.ks_distance(evs, stats.exponential_cdf)
        run.scalars[f"ks_spacing_{tag}"] = stats.ks_distance(sps, stats.wigner_surmise_cdf)
        if delta in FIG1_Q_DELTAS:
            write_hist_csv(run.path(f"fig1_q_{tag}.csv"), qs, (0.0, 1.0))
            run.scalars[f"q_mean_{tag}"] = qs.mean()
        run.mark(tag)
    _write_reference_curves(run)
    run.scalars["cue_q_mean"] = CUE_Q_MEAN
    return run.finish()


def _load_library(config: ExperimentConfig) -> stats.ReferenceLibrary:
    if not config.ref_library:
        raise ValidationError(
            "a reference library is required; build one with `rmtlab build-ref`"
        )
    if not os.path.exists(config.ref_library):
        raise ValidationError(f"reference library not found: {config.ref_library}")
    return stats.ReferenceLibrary.load(config.ref_library)


def run_fig2(config: ExperimentConfig) -> RunReport:
    """Pseudo-random map distribution panels, delta fits, and <Q> per m."""
    run = _Run(config)
    lib = _load_library(config)
    rng = RngStream(config.seed)
    for m in FIG2_M_VALUES:
        tag = f"m{m}"
        ops = sample_operators(f"pseudo:8:{m}", rng, config.samples, config.threads)
        els, evs, sps, qs = _distribution_families(ops)
        write_hist_csv(run.path(f"fig2_spacing_{tag}.csv"), sps, stats.SPACING_RANGE)
        write_hist_csv(run.path(f"fig2_eigvec_{tag}.csv"), evs, stats.AMPLITUDE_RANGE)
        write_hist_csv(run.path(f"fig2_element_{tag}.csv"), els, stats.AMPLITUDE_RANGE)
        write_hist_csv(run.path(f"fig2_q_{tag}.csv"), qs, (0.0, 1.0))
        run.scalars[f"q_mean_{tag}"] = qs.mean()
        element_fit = stats.delta_fit(
            els.thinned(500_000), lib, stats.EIGENVECTOR_AMPLITUDE
        )
        spacing_fit = stats.delta_fit(sps, lib, stats.EIGENPHASE_SPACING)
        run.scalars[f"element_delta_fit_{tag}"] = element_fit.best_delta
        run.scalars[f"spacing_delta_fit_{tag}"] = spacing_fit.best_delta
        run.mark(tag)
    _write_reference_curves(run)
    run.scalars["cue_q_mean"] = CUE_Q_MEAN
    return run.finish()


FIG3_MAPS = (
    ("sawtooth_k1.5", "sawtooth:{N}:1.5", 50),
    ("sawtooth_k-1.5", "sawtooth:{N}:-1.5", 50),
    ("harper_g1", "harper:{N}:1", 50),
    ("harper_g0.1", "harper:{N}:0.1", 50),
    ("baker", "baker:{N}", 100),
)

FIG3_INSET_TIMES = {
    "sawtooth_k1.5": (50,),
    "sawtooth_k-1.5": (50,),
    "harper_g1": (50,),
    "harper_g0.1": (50,),
    "baker": (1, 100),
}


def run_fig3(config: ExperimentConfig) -> RunReport:
    """<Q(t)> series for the quantized maps plus inset element distributions."""
    run = _Run(config)
    for name, spec_tpl, t_default in FIG3_MAPS:
        spec = spec_tpl.format(N=config.dim)
        U = build_map(parse_map_spec(spec))
        t_max = max(t_default, config.t_max) if name == "baker" else config.t_max
        series = q_time_series(U, max(t_max, max(FIG3_INSET_TIMES[name])))
        atomic_write_text(run.path(f"fig3_q_{name}.csv"), series.to_csv())
        run.scalars[f"q_final_{name}"] = float(series.mean_q[-1])
        for t in FIG3_INSET_TIMES[name]:
            els = stats.element_amplitudes(matrix_power(U, t))
            write_hist_csv(
                run.path(f"fig3_element_{name}_t{t}.csv"), els, stats.AMPLITUDE_RANGE
            )
            run.scalars[f"ks_element_{name}_t{t}"] = stats.ks_distance(
                els, stats.exponential_cdf
            )
        run.mark(name)
    run.scalars["cue_q_mean"] = CUE_Q_MEAN
    return run.finish()


def run_q_table(config: ExperimentConfig) -> RunReport:
    """<Q> table: CUE, the pseudo-random ladder, and the quantized maps."""
    run = _Run(config)
    rng = RngStream(config.seed)
    rows = []

    cue = sample_operators(f"cue-gue:{config.dim}", rng, config.samples, config.threads)
    qs = np.concatenate([columns_q(U) for U in cue])
    rows.append(("cue", 1, float(np.mean(qs))))
    run.mark("cue")

    for m in FIG2_M_VALUES:
        ops = sample_operators(f"pseudo:8:{m}", rng, config.samples, config.threads)
        qs = np.concatenate([columns_q(U) for U in ops])
        rows.append((f"pseudo_m{m}", 1, float(np.mean(qs))))
    run.mark("pseudo")

    for name, spec_tpl, t_final in FIG3_MAPS:
        U = build_map(parse_map_spec(spec_tpl.format(N=config.dim)))
        series = q_time_series(U, t_final)
        rows.append((name, 1, float(series.mean_q[0])))
        rows.append((name, t_final, float(series.mean_q[-1])))
    run.mark("maps")

    lines = ["operator,t,mean_q"]
    for name, t, q in rows:
        lines.append(f"{name},{t},{_fmt(q)}")
        run.scalars[f"q_{name}_t{t}"] = q
    atomic_write_text(run.path("q_table.csv"), "\n".join(lines) + "\n")
    return run.finish()


def run_build_ref(config: ExperimentConfig) -> RunReport:
    """Build and persist the delta reference library."""
    run = _Run(config)
    grid = stats.default_delta_grid(config.grid_step)
    lib = stats.build_reference_library(
        config.dim, grid, config.lib_samples, RngStream(config.seed)
    )
    path = config.ref_library or os.path.join(config.out_dir, "reference_library.rmtref")
    lib.save(path)
    run.files.append(os.path.basename(path))
    run.files.append(os.path.basename(path) + ".json")
    run.scalars["deltas"] = len(grid)
    run.scalars["samples_per_delta"] = config.lib_samples
    run.mark("build")
    return run.finish()


def run_gen(config: ExperimentConfig) -> RunReport:
    """Sample operators from a spec string into files."""
    if not config.spec:
        raise ValidationError("gen requires an operator spec string")
    run = _Run(config)
    rng = RngStream(config.seed)
    ops = sample_operators(config.spec, rng, config.samples, config.threads)
    ext = "json" if config.fmt == "json" else "rmtl"
    safe = config.spec.replace(":", "_")
    for k, U in enumerate(ops):
        save_operator(run.path(f"{safe}_{k:04d}.{ext}"), U)
    run.scalars["count"] = len(ops)
    run.mark("gen")
    return run.finish()


def run_stats(config: ExperimentConfig) -> RunReport:
    """Distribution files + KS scalars for operator files on disk."""
    if not config.inputs:
        raise ValidationError("stats requires at least one operator file")
    run = _Run(config)
    ops = [load_operator(p) for p in config.inputs]
    els, evs, sps, qs = _distribution_families(ops)
    write_values_csv(run.path("element_amplitudes.csv"), els)
    write_values_csv(run.path("eigenvector_amplitudes.csv"), evs)
    write_values_csv(run.path("eigenphase_spacings.csv"), sps)
    write_hist_csv(run.path("element_hist.csv"), els, stats.AMPLITUDE_RANGE)
    write_hist_csv(run.path("eigvec_hist.csv"), evs, stats.AMPLITUDE_RANGE)
    write_hist_csv(run.path("spacing_hist.csv"), sps, stats.SPACING_RANGE)
    run.scalars["ks_element_exponential"] = stats.ks_distance(els, stats.exponential_cdf)
    run.scalars["ks_eigvec_exponential"] = stats.ks_distance(evs, stats.exponential_cdf)
    run.scalars["ks_spacing_poisson"] = stats.ks_distance(sps, stats.poisson_spacing_cdf)
    run.scalars["ks_spacing_surmise"] = stats.ks_distance(sps, stats.wigner_surmise_cdf)
    run.scalars["q_mean"] = qs.mean()
    run.mark("stats")
    return run.finish()


def run_fit_delta(config: ExperimentConfig) -> RunReport:
    """Delta fits for operator files: elements and eigenvectors against the
    eigenvector references, spacings against the spacing references."""
    if not config.inputs:
        raise ValidationError("fit-delta requires at least one operator file")
    run = _Run(config)
    lib = _load_library(config)
    results = {}
    for path in config.inputs:
        U = load_operator(path)
        spec = spectral_decomposition(U)
        fits = {
            "elements_vs_eigenvector_refs": stats.delta_fit(
                stats.element_amplitudes(U), lib, stats.EIGENVECTOR_AMPLITUDE
            ),
            "eigenvectors_vs_eigenvector_refs": stats.delta_fit(
                stats.eigenvector_amplitudes(spec), lib, stats.EIGENVECTOR_AMPLITUDE
            ),
            "spacings_vs_spacing_refs": stats.delta_fit(
                stats.eigenphase_spacings(spec), lib, stats.EIGENPHASE_SPACING
            ),
        }
        results[os.path.basename(path)] = {
            name: {"best_delta": f.best_delta, "distance": f.distance, "kind": f.reference_kind}
            for name, f in fits.items()
        }
    write_json(run.path("delta_fits.json"), results)
    for name, fits in results.items():
        run.scalars[f"element_delta_{name}"] = fits["elements_vs_eigenvector_refs"]["best_delta"]
    run.mark("fit")
    return run.finish()


RUNNERS = {
    "fig1": run_fig1,
    "fig2": run_fig2,
    "fig3": run_fig3,
    "q-table": run_q_table,
    "gen": run_gen,
    "stats": run_stats,
    "fit-delta": run_fit_delta,
    "build-ref": run_build_ref,
}
