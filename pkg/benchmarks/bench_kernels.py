"""Compare the compiled and NumPy kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints per-call timings for both kernels on representative inputs, then the
wall time of a full analytic sweep point and a 1e5-sample Monte Carlo point
under each backend.
"""

import argparse
import math
import os
import subprocess
import sys
import timeit

import numpy as np

from cverasure import _kernels_py, kernels

try:
    from cverasure import _ckernels
except ImportError:
    _ckernels = None


def _inputs(n_nodes, n_samples, seed=0):
    rng = np.random.default_rng(seed)
    t, w = np.polynomial.legendre.leggauss(n_nodes)
    mu = np.array([0.1, -0.2])
    cov = np.array([[0.8, 0.1], [0.1, 0.6]])
    base = rng.normal(size=(2, 2))
    K = rng.normal(size=(2, 2, 2))
    M = np.array([np.eye(2) * 0.4, np.eye(2) * 0.5])
    pref = np.array([1.0, 0.9])
    samples = mu + rng.standard_normal((n_samples, 2)) @ np.linalg.cholesky(cov).T
    quad = (t, w, t, w, mu, np.linalg.inv(cov), 0.2, base, K, M, pref)
    mc = (samples, 1.0, 1.0, mu, base, K, M, pref)
    return quad, mc


def bench_kernels(repeat):
    quad, mc = _inputs(128, 100_000)
    impls = [("python", _kernels_py)] + ([("cython", _ckernels)] if _ckernels else [])
    for name, impl in impls:
        tq = min(timeit.repeat(lambda: kernels.window_integrate(*quad, impl=impl), number=10, repeat=repeat)) / 10
        tm = min(timeit.repeat(lambda: kernels.mc_accumulate(*mc, impl=impl), number=3, repeat=repeat)) / 3
        print(f"{name:>7}  window_integrate(128x128 nodes) {tq * 1e3:8.3f} ms   mc_accumulate(1e5) {tm * 1e3:8.3f} ms", flush=True)


SWEEP_POINT = """
import math, time
from cverasure import *
from cverasure.postselect import filter_analytic, filter_monte_carlo
a = 2 * math.sqrt(2); r = db_to_r(3.0)
cfg = CodecConfig(r, 0.9, 0.0); w = ThresholdWindow.auto(r)
t = time.perf_counter(); filter_analytic(coherent(a, a), vacuum(1), 0.1, cfg, w, 64); ta = time.perf_counter() - t
t = time.perf_counter(); filter_monte_carlo(coherent(a, a), vacuum(1), 0.1, cfg, w, 100000, 1); tm = time.perf_counter() - t
print(f"{BACKEND:>7}  filter_analytic(order 64) {ta * 1e3:8.1f} ms   filter_monte_carlo(1e5) {tm * 1e3:8.1f} ms")
"""


def bench_pipeline():
    for pure in ("", "1"):
        env = dict(os.environ, CVERASURE_PURE_PYTHON=pure)
        subprocess.run([sys.executable, "-c", SWEEP_POINT], env=env, check=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; timing the NumPy backend only", flush=True)
    bench_kernels(args.repeat)
    bench_pipeline()


if __name__ == "__main__":
    main()
