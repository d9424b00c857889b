"""Compare the compiled and pure-numpy kernels on representative batch sizes.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from riemkit import _kernels_py

try:
    from riemkit import _kernels as _compiled
except ImportError:
    _compiled = None

TAYLOR = 1e-6


def _cases(rng):
    n = 100_000
    p = rng.standard_normal((n, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    v = rng.standard_normal((n, 3))
    v -= np.sum(v * p, axis=1, keepdims=True) * p
    q = rng.standard_normal((n, 3))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    x = rng.standard_normal((n, 3))
    h = np.c_[np.sqrt(1 + np.sum(x**2, axis=1)), x]
    w = rng.standard_normal((n, 3))
    small = rng.standard_normal((400, 3, 3))
    small = small @ np.swapaxes(small, 1, 2) + 3 * np.eye(3)
    mats = rng.standard_normal((200, 8, 8))
    mats = mats @ np.swapaxes(mats, 1, 2) + 8 * np.eye(8)
    return {
        "sphere_exp (1e5)": ("sphere_exp", (p, v, TAYLOR)),
        "sphere_log (1e5)": ("sphere_log", (p, q, TAYLOR)),
        "hyperbolic_dist (1e5)": ("hyperbolic_dist", (h, h[::-1].copy())),
        "rodrigues (1e5)": ("rodrigues", (w, TAYLOR)),
        "pairwise_spd_riemannian (400 x 3x3)": ("pairwise_spd_riemannian", (small,)),
        "pairwise_spd_riemannian (200 x 8x8)": ("pairwise_spd_riemannian", (mats,)),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    cases = _cases(np.random.default_rng(0))
    print(f"{'kernel':40s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for label, (name, call_args) in cases.items():
        t_py = min(timeit.repeat(lambda: getattr(_kernels_py, name)(*call_args), number=1, repeat=args.repeat))
        if _compiled is None:
            print(f"{label:40s} {1e3 * t_py:12.2f} {'n/a':>12s} {'':>8s}")
            continue
        t_c = min(timeit.repeat(lambda: getattr(_compiled, name)(*call_args), number=1, repeat=args.repeat))
        print(f"{label:40s} {1e3 * t_py:12.2f} {1e3 * t_c:12.2f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
