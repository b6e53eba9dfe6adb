"""Benchmark the compiled contraction kernels against the pure NumPy
fallback, plus the end-to-end independence test under each backend.

Run:  python benchmarks/bench_backends.py [--quick]

The backend for the end-to-end rows is switched per subprocess via the
FTSINDEP_PURE environment variable, since selection happens at import.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from ftsindep.backend import get_backend, have_compiled


def _time(fn, repeats=7):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _sym(rng, n):
    a = rng.standard_normal((n, n))
    return np.ascontiguousarray((a + a.T) / 2.0)


def bench_kernels(sizes, repeats):
    rng = np.random.default_rng(0)
    impls = [("pure", get_backend("pure"))]
    if have_compiled():
        impls.append(("compiled", get_backend("compiled")))
    rows = []
    for n in sizes:
        a, b = _sym(rng, n), _sym(rng, n)
        gx, gy = _sym(rng, 2 * n - 1), _sym(rng, 2 * n - 1)
        hs = np.array([-2, -1, 0, 1, 2])
        h_max = max(2, int(round(n ** 0.5)))
        for name, impl in impls:
            rows.append((
                f"xi_lag_sums(n={n}, H={h_max})",
                name,
                _time(lambda: impl.xi_lag_sums(a, b, h_max), repeats),
            ))
            rows.append((
                f"tau_raw_sums(n={n}, 5 shifts)",
                name,
                _time(lambda: impl.tau_raw_sums(gx, gy, n, hs), repeats),
            ))
            rows.append((
                f"diag_band_sums(n={n})",
                name,
                _time(lambda: impl.diag_band_sums(a, n - 1), repeats),
            ))
    return rows


def bench_end_to_end(n, m, h_max, repeats):
    code = (
        "import time, numpy as np\n"
        "import ftsindep as f\n"
        f"grid = f.make_uniform_grid({m})\n"
        f"spec = f.DgpSpec('iid_bm', n={n}, grid=grid, seed=5)\n"
        "x = f.simulate_sample(spec, 0, 0); y = f.simulate_sample(spec, 0, 1)\n"
        f"cfg = f.TestConfig(H={h_max})\n"
        "f.independence_test(x, y, cfg)\n"
        "best = float('inf')\n"
        f"for _ in range({repeats}):\n"
        "    t0 = time.perf_counter(); f.independence_test(x, y, cfg)\n"
        "    best = min(best, time.perf_counter() - t0)\n"
        "print(best)\n"
    )
    rows = []
    for name, env_val in [("pure", "1"), ("compiled", "")]:
        if name == "compiled" and not have_compiled():
            continue
        env = dict(os.environ)
        if env_val:
            env["FTSINDEP_PURE"] = env_val
        else:
            env.pop("FTSINDEP_PURE", None)
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env
        )
        rows.append((f"independence_test(n={n}, m={m}, H={h_max})", name,
                     float(out.stdout.strip())))
    return rows


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller sizes, fewer repeats")
    args = parser.parse_args()
    sizes = (100, 300) if args.quick else (100, 300, 800)
    repeats = 3 if args.quick else 7

    rows = bench_kernels(sizes, repeats)
    rows += bench_end_to_end(300, 100, 17, repeats)

    if not have_compiled():
        print("note: compiled extension not installed; pure backend only\n")
    width = max(len(r[0]) for r in rows) + 2
    print(f"{'kernel':<{width}}{'backend':<10}{'best time':>12}")
    by_case = {}
    for case, backend, t in rows:
        print(f"{case:<{width}}{backend:<10}{t * 1e3:>10.3f}ms")
        by_case.setdefault(case, {})[backend] = t
    print()
    for case, d in by_case.items():
        if "pure" in d and "compiled" in d:
            print(f"speedup {case}: {d['pure'] / d['compiled']:.2f}x")


if __name__ == "__main__":
    main()
