"""Time the numpy and compiled kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--degrees 16 32 64 128] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from slicereg.kernels import available_backends


def inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    damp = (0.7 ** np.arange(n + 1))[:, None]
    a = rng.uniform(-1, 1, (n + 1, 4)) * damp
    b = rng.uniform(-1, 1, (n + 1, 4)) * damp
    w = b.copy()
    w[0] = 0.0
    g = w.copy()
    g[1] = [1.0, 0.2, -0.1, 0.3]
    inv = a.copy()
    inv[0] = [1.0, 0.5, 0.0, -0.5]
    pts = rng.uniform(-0.5, 0.5, (4096, 4))
    return {
        "star_mul": (a, b, n),
        "star_inverse": (inv, n),
        "bullet_compose": (a, w, n),
        "bullet_inverse_right": (g, n),
        "evaluate": (a, pts),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degrees", type=int, nargs="+", default=[16, 32, 64, 128])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = available_backends()
    names = sorted(backends)
    print(f"{'kernel':<22}{'N':>5}" + "".join(f"{n + ' [ms]':>16}" for n in names) + f"{'speedup':>10}")
    for n in args.degrees:
        for kernel, call_args in inputs(n).items():
            times = {}
            for name in names:
                fn = getattr(backends[name], kernel)
                number = max(1, int(0.05 / max(timeit.timeit(lambda: fn(*call_args), number=1), 1e-7)))
                best = min(timeit.repeat(lambda: fn(*call_args), number=number, repeat=args.repeat)) / number
                times[name] = best * 1e3
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{kernel:<22}{n:>5}" + "".join(f"{times[m]:>16.4f}" for m in names) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
