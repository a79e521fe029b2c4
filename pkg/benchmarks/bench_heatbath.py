"""Compare the compiled and pure-Python heat-bath sweeps.

    python3 benchmarks/bench_heatbath.py --box 20 30 30 --sweeps 50

Both backends get identical starting heights and uniforms; the script checks
the final arrays agree before reporting timings.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from fivevertex import kernels
from fivevertex.sampler import HEIGHT_DTYPE


def run(kern, H0: np.ndarray, Us: list[np.ndarray], x: float, c: int) -> tuple[np.ndarray, float]:
    H = H0.copy()
    t0 = time.perf_counter()
    for U in Us:
        kern.sweep(H, U, x, c)
    return H, time.perf_counter() - t0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--box", type=int, nargs=3, default=(20, 30, 30), metavar=("A", "B", "C"),
                    help="rows, columns and height bound of the plane partition")
    ap.add_argument("--sweeps", type=int, default=50)
    ap.add_argument("--x", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    a, b, c = args.box
    rng = np.random.default_rng(args.seed)
    H0 = np.zeros((a, b), dtype=HEIGHT_DTYPE)
    Us = [rng.random((a, b)) for _ in range(args.sweeps)]
    sites = a * b * args.sweeps

    results = {}
    for name in ("python", "cython"):
        try:
            kern = kernels.get_backend(name)
        except ImportError:
            print(f"{name:>7}: unavailable")
            continue
        H, dt = run(kern, H0, Us, args.x, c)
        results[name] = H
        print(f"{name:>7}: {dt:9.4f} s  {sites / dt / 1e6:8.3f} M site-updates/s")
    if len(results) == 2:
        same = np.array_equal(results["python"], results["cython"])
        print("final states identical:", same)
        return 0 if same else 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
