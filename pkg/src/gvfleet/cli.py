"""Command-line front end.

Subcommands::

    gvfleet run   --scenario PATH|NAME [--dt F] [--duration F] [--seed N]
                  [--enable-safety true|false] [--out DIR] [--backend B]
    gvfleet check [--backend B]
    gvfleet plot  TELEMETRY_CSV [--out DIR]

Exit codes: 0 success, 2 config error, 3 acceptance failure, 4 runtime
abort (infeasible safety QP or divergence guard), 5 topology rejected (no
directed spanning tree).  ``--scenario`` accepts a file path or the name of
a bundled scenario (``circular_6``, ``lissajous_10``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, plotting, sim
from .errors import ConfigError, ConnectivityError, SimulationAbort
from .kernels import resolve_backend
from .scenario import bundled_scenario_path, load_scenario
from .telemetry import Telemetry

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ACCEPTANCE = 3
EXIT_ABORT = 4
EXIT_CONNECTIVITY = 5


def _str2bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gvfleet",
        description="Guiding-vector-field coordinated navigation simulator",
    )
    parser.add_argument("--version", action="version", version=f"gvfleet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario and write telemetry + metrics")
    run.add_argument("--scenario", required=True,
                     help="scenario JSON path or bundled scenario name")
    run.add_argument("--dt", type=float, default=None, help="override the time step [s]")
    run.add_argument("--duration", type=float, default=None,
                     help="override the run length [s]")
    run.add_argument("--seed", type=int, default=None, help="override the RNG seed")
    run.add_argument("--enable-safety", type=_str2bool, default=None,
                     metavar="BOOL", help="force the barrier filter on or off")
    run.add_argument("--out", default=".", help="output directory")
    run.add_argument("--backend", default=None, choices=("numba", "numpy"),
                     help="execution backend (default: GVFLEET_BACKEND or auto)")

    check = sub.add_parser("check", help="run the acceptance suite")
    check.add_argument("--backend", default=None, choices=("numba", "numpy"))

    plot = sub.add_parser("plot", help="render SVG figures from a telemetry CSV")
    plot.add_argument("telemetry", help="telemetry CSV produced by `gvfleet run`")
    plot.add_argument("--out", default=".", help="output directory")
    return parser


def _load_with_overrides(args) -> tuple:
    source = Path(args.scenario)
    if not source.exists() and not source.suffix:
        source = bundled_scenario_path(args.scenario)
    if not source.exists():
        raise ConfigError(f"scenario file not found: {args.scenario}")
    try:
        doc = json.loads(source.read_text())
    except json.JSONDecodeError as err:
        raise ConfigError(f"scenario file {source} is not valid JSON: {err}") from err
    overrides = {}
    if args.dt is not None:
        doc["dt"] = overrides["dt"] = args.dt
    if args.duration is not None:
        doc["duration"] = overrides["duration"] = args.duration
    if args.seed is not None:
        doc["seed"] = overrides["seed"] = args.seed
    if args.enable_safety is not None:
        doc.setdefault("safety", {})["enabled"] = args.enable_safety
        overrides["enable_safety"] = args.enable_safety
    return load_scenario(doc), overrides, source


def _cmd_run(args) -> int:
    try:
        cfg, overrides, source = _load_with_overrides(args)
    except ConnectivityError as err:
        print(f"gvfleet: topology rejected: {err}", file=sys.stderr)
        return EXIT_CONNECTIVITY
    except ConfigError as err:
        print(f"gvfleet: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    backend = resolve_backend(args.backend)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    telemetry_name = cfg.outputs.get("telemetry", f"{cfg.name}_telemetry.csv")
    metrics_name = cfg.outputs.get("metrics", f"{cfg.name}_metrics.json")

    aborted = None
    try:
        tel = sim.run_scenario(cfg, backend=backend)
    except SimulationAbort as err:
        aborted = err
        tel = err.telemetry
        print(f"gvfleet: {err}", file=sys.stderr)

    if tel is not None and tel.n_ticks > 0:
        tel.write_csv(out_dir / telemetry_name)
        payload = {
            "provenance": {
                "scenario": str(source),
                "name": cfg.name,
                "dt": cfg.dt,
                "duration": cfg.duration,
                "seed": cfg.seed,
                "backend": backend,
                "overrides": overrides,
                "package_version": __version__,
                "aborted": aborted is not None,
            },
            "metrics": sim.compute_metrics(tel).to_dict(),
        }
        (out_dir / metrics_name).write_text(json.dumps(payload, indent=2) + "\n")
    if aborted is not None:
        return EXIT_ABORT
    print(f"gvfleet: wrote {out_dir / telemetry_name} and {out_dir / metrics_name}")
    return EXIT_OK


def _cmd_check(args) -> int:
    from . import acceptance

    try:
        backend = resolve_backend(args.backend)
    except (RuntimeError, ValueError) as err:
        print(f"gvfleet: {err}", file=sys.stderr)
        return EXIT_CONFIG
    results = acceptance.run_all(backend=backend)
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_OK if not failed else EXIT_ACCEPTANCE


def _cmd_plot(args) -> int:
    path = Path(args.telemetry)
    if not path.exists():
        print(f"gvfleet: telemetry file not found: {path}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        tel = Telemetry.read_csv(path)
    except ValueError as err:
        print(f"gvfleet: {err}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = path.stem
    (out_dir / f"{stem}_trajectories.svg").write_text(plotting.trajectory_svg(tel))
    (out_dir / f"{stem}_traces.svg").write_text(plotting.traces_svg(tel))
    print(f"gvfleet: wrote {stem}_trajectories.svg and {stem}_traces.svg in {out_dir}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "check":
        return _cmd_check(args)
    return _cmd_plot(args)


if __name__ == "__main__":
    sys.exit(main())
