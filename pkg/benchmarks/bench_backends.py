#!/usr/bin/env python3
"""Throughput comparison of the numba and numpy execution backends.

Runs one bundled scenario on each backend and reports wall time, the tick
rate, and the speedup.  The numba path is warmed first so JIT compilation
(cached on disk after the first ever run) is excluded from the timing.

    python benchmarks/bench_backends.py --scenario circular_6 --duration 20
"""

import argparse
import time

from gvfleet import load_scenario, run_scenario
from gvfleet.kernels import numba_available
from gvfleet.scenario import bundled_scenario_path
import json


def load(args):
    path = bundled_scenario_path(args.scenario) if not args.scenario.endswith(".json") \
        else args.scenario
    doc = json.loads(open(path).read())
    if args.duration is not None:
        doc["duration"] = args.duration
    return doc


def time_backend(doc, backend, repeat):
    best = float("inf")
    for _ in range(repeat):
        cfg = load_scenario(doc)
        t0 = time.perf_counter()
        tel = run_scenario(cfg, backend=backend)
        best = min(best, time.perf_counter() - t0)
    ticks = tel.n_ticks * tel.n_vehicles
    return best, ticks


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scenario", default="circular_6")
    parser.add_argument("--duration", type=float, default=20.0,
                        help="simulated seconds (default 20; the numpy path is slow)")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    doc = load(args)
    results = {}
    if numba_available():
        run_scenario(load_scenario(doc), backend="numba")  # warm the JIT cache
        results["numba"] = time_backend(doc, "numba", args.repeat)
    else:
        print("numba not importable; benchmarking the numpy backend only")
    results["numpy"] = time_backend(doc, "numpy", max(1, args.repeat // 3))

    print(f"scenario={args.scenario} duration={args.duration}s "
          f"(discrete steps x vehicles = {results['numpy'][1]})")
    for backend, (secs, ticks) in results.items():
        print(f"  {backend:6s}: {secs:8.3f} s   {ticks / secs / 1e3:9.1f} k vehicle-ticks/s")
    if "numba" in results:
        print(f"  speedup: {results['numpy'][0] / results['numba'][0]:.1f}x")


if __name__ == "__main__":
    main()
