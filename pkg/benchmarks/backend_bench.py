"""Compare the compiled kernels against the numpy fallback on a
canonical-sized workload.

Usage:
    python benchmarks/backend_bench.py [--rps 374] [--features 11] [--samples 100] [--repeats 5]

Times one tracking step's worth of log-likelihood evaluation per family on
each backend and reports the speedup. The compiled extension must have been
built (`python setup.py build_ext --inplace`) for the comparison column to
appear.
"""

import argparse
import statistics
import time

import numpy as np

from ssploc.backend import get_kernels
from ssploc.fingerprints import FeatureVector, Location, ScanSet
from ssploc.likelihood import EPS_FLOOR, build_radio_map

FAMILIES = ["single_gaussian", "double_gaussian", "lognormal", "histogram", "kernel"]


def make_workload(rps, features, samples, rng):
    training = []
    side = int(np.ceil(np.sqrt(rps)))
    for i in range(rps):
        base = rng.uniform(-80, -40, size=features)
        scans = [FeatureVector(list(base + rng.normal(0, 2, features))) for _ in range(samples)]
        training.append(ScanSet(scans, location=Location(float(i % side), float(i // side))))
    query = np.ascontiguousarray(rng.uniform(-80, -40, size=(2, features)))
    return training, query


def dispatch(kern, packed, x):
    kind = packed["family"]
    if kind == "gaussian":
        return kern.gaussian_loglik(x, packed["mean"], packed["std"], EPS_FLOOR)
    if kind == "mixture2":
        return kern.mixture2_loglik(x, packed["w"], packed["mu"], packed["sg"], EPS_FLOOR)
    if kind == "lognormal":
        return kern.lognormal_loglik(x, packed["shift"], packed["mu"], packed["sg"], EPS_FLOOR)
    if kind == "histogram":
        return kern.histogram_loglik(
            x, packed["first_edge"], packed["width"], packed["nbins"],
            packed["offsets"], packed["dens"], EPS_FLOOR,
        )
    return kern.kde_loglik(
        x, packed["samples"], packed["offsets"], packed["counts"], packed["bw"], EPS_FLOOR
    )


def time_backend(kern, packed, x, repeats):
    dispatch(kern, packed, x)  # warm up
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        dispatch(kern, packed, x)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rps", type=int, default=374)
    parser.add_argument("--features", type=int, default=11)
    parser.add_argument("--samples", type=int, default=100)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    python = get_kernels("python")
    try:
        compiled = get_kernels("compiled")
    except ImportError:
        compiled = None
        print("compiled kernels not built; timing the numpy fallback only")

    rng = np.random.default_rng(0)
    training, query = make_workload(args.rps, args.features, args.samples, rng)

    print(f"workload: {args.rps} RPs x {args.features} features, "
          f"{args.samples} training scans, 2-scan query, median of {args.repeats}")
    header = f"{'family':<18}{'numpy (ms)':>12}"
    if compiled:
        header += f"{'compiled (ms)':>15}{'speedup':>10}{'max |diff|':>12}"
    print(header)
    for family in FAMILIES:
        packed = build_radio_map(training, family).packed()
        t_py = time_backend(python, packed, query, args.repeats)
        line = f"{family:<18}{t_py * 1e3:>12.3f}"
        if compiled:
            t_c = time_backend(compiled, packed, query, args.repeats)
            diff = float(np.max(np.abs(
                dispatch(python, packed, query) - dispatch(compiled, packed, query)
            )))
            line += f"{t_c * 1e3:>15.3f}{t_py / t_c:>10.2f}{diff:>12.2e}"
        print(line)


if __name__ == "__main__":
    main()
