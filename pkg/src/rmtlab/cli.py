"""Command-line experiment runner.

Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 acceptance-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .checks import CheckContext, run_all
from .errors import ConvergenceFailure, NotUnitary, RmtlabError, ValidationError
from .experiments import RUNNERS, ExperimentConfig
from .stats import ReferenceLibrary

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=20240817, help="master RNG seed")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--samples", type=int, default=100, help="matrices per batch")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--dim", type=int, default=256, help="Hilbert-space dimension")
    p.add_argument("--config", help="JSON config file; overrides other flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmtlab",
        description="Random-matrix / quantum-chaos laboratory: generate unitary "
        "operators, measure spectral and entanglement statistics, and fit "
        "distributions to the delta reference library.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample operators from a spec string into files")
    p.add_argument("spec", help='e.g. "cue-gue:256", "interp:256:0.9", "pseudo:8:4", "sawtooth:256:1.5"')
    p.add_argument("--format", choices=("bin", "json"), default="bin")
    _add_common(p)

    p = sub.add_parser("stats", help="distribution files + KS scalars for operator files")
    p.add_argument("inputs", nargs="+", help="operator files (.rmtl or .json)")
    _add_common(p)

    p = sub.add_parser("fit-delta", help="delta fits for operator files")
    p.add_argument("inputs", nargs="+", help="operator files")
    p.add_argument("--ref", required=True, help="reference library file")
    _add_common(p)

    p = sub.add_parser("build-ref", help="build the delta reference library")
    p.add_argument("--grid-step", type=float, default=0.02)
    p.add_argument("--lib-samples", type=int, default=50, help="draws per delta")
    p.add_argument("--ref", help="output library path (default <out>/reference_library.rmtref)")
    _add_common(p)

    for name, help_text in (
        ("fig1", "interpolating-ensemble distribution panels"),
        ("fig3", "map <Q(t)> series and inset element distributions"),
        ("q-table", "mean-Q table for all operator families"),
    ):
        p = sub.add_parser(name, help=help_text)
        if name != "q-table":
            p.add_argument("--t-max", type=int, default=50)
        _add_common(p)

    p = sub.add_parser("fig2", help="pseudo-random map panels and delta fits")
    p.add_argument("--ref", required=True, help="reference library file")
    _add_common(p)

    p = sub.add_parser("paper-check", help="run every quantitative claim check")
    p.add_argument("--ref", help="reference library file (built on the fly if omitted)")
    p.add_argument("--lib-samples", type=int, default=20, help="draws per delta when building")
    _add_common(p)

    return parser


def _config_from_args(args) -> ExperimentConfig:
    cfg = ExperimentConfig(
        experiment=args.command,
        out_dir=args.out,
        seed=args.seed,
        samples=args.samples,
        threads=args.threads,
        dim=args.dim,
    )
    if getattr(args, "t_max", None):
        cfg.t_max = args.t_max
    if getattr(args, "spec", None):
        cfg.spec = args.spec
    if getattr(args, "inputs", None):
        cfg.inputs = list(args.inputs)
    if getattr(args, "ref", None):
        cfg.ref_library = args.ref
    if getattr(args, "grid_step", None):
        cfg.grid_step = args.grid_step
    if getattr(args, "lib_samples", None):
        cfg.lib_samples = args.lib_samples
    if getattr(args, "format", None):
        cfg.fmt = args.format
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        doc = doc.get("config", doc)  # accept a run manifest directly
        for key, value in doc.items():
            # out_dir stays under --out control so replays can target a
            # fresh directory
            if hasattr(cfg, key) and key not in ("experiment", "out_dir"):
                setattr(cfg, key, value)
    return cfg


def _run_paper_check(args) -> int:
    library = None
    if args.ref:
        library = ReferenceLibrary.load(args.ref)
    ctx = CheckContext(
        seed=args.seed,
        n_matrices=args.samples,
        lib_samples=args.lib_samples,
        library=library,
        dim=args.dim,
    )
    results = run_all(ctx)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_ACCEPTANCE if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "paper-check":
            return _run_paper_check(args)
        config = _config_from_args(args)
        report = RUNNERS[args.command](config)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NotUnitary, ConvergenceFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except RmtlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    for name, value in sorted(report.scalars.items()):
        print(f"{name} = {value}")
    print(f"wrote {len(report.files)} files to {config.out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
