"""Time the compiled and pure-Python kernels on identical inputs.

    python3 benchmarks/bench_kernels.py [--n 2000] [--repeat 3]

Outputs are compared between backends before timings are printed.
"""
import argparse
import time

import numpy as np

from linfot import kernels


def _inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.random(n))
    y = np.sort(rng.random(n) + 0.05)
    lam = float(np.max(np.abs(x - y)))
    return rng, x, y, lam


def case_matching(mod, n):
    rng, x, y, lam = _inputs(n)
    lo, hi = mod.band_ranges(x, y, lam)
    ml = np.full(n, -1, dtype=np.int64)
    mr = np.full(n, -1, dtype=np.int64)
    mod.greedy_random_start(lo, hi, rng.permutation(n), rng.random(n), ml, mr)
    size = mod.augment_matching(lo, hi, ml, mr)
    return size, ml.tolist()


def case_band_max(mod, n):
    rng, x, y, lam = _inputs(4 * n)
    return mod.band_max(x, np.sin(7 * x), y, np.cos(5 * y), 0.1)


def case_infcm(mod, n):
    m = min(n, 150)
    t = (np.arange(m) + 0.5) / m
    return mod.infcm_violation(t, t + 0.25 * t * t, 4, 1e-12)


CASES = {"matching": case_matching, "band_max": case_band_max, "infcm": case_infcm}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled kernels not built; timing the Python backend only")
    print(f"{'case':<10} " + " ".join(f"{name:>12}" for name in backends) + "     speedup")
    for name, fn in CASES.items():
        results, timings = {}, {}
        for bname, mod in backends.items():
            best = np.inf
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                results[bname] = fn(mod, args.n)
                best = min(best, time.perf_counter() - t0)
            timings[bname] = best
        outs = list(results.values())
        if any(o != outs[0] for o in outs[1:]):
            raise SystemExit(f"{name}: backends disagree")
        speed = timings["python"] / timings["cython"] if "cython" in timings else float("nan")
        row = " ".join(f"{timings[b] * 1e3:>10.2f}ms" for b in backends)
        print(f"{name:<10} {row} {speed:>10.1f}x")


if __name__ == "__main__":
    main()
