"""Timing comparison of the numba kernels against the numpy fallback.

Both kernel modules are imported directly, so the KACLATTICE_DISABLE_NUMBA
switch is irrelevant here; jit compilation is triggered before timing.

Usage: python benchmarks/bench_kernels.py [--dim 48] [--repeat 20]
"""

import argparse
import time

import numpy as np

from kaclattice import _kernels_numpy
from kaclattice.algebra import matrix_algebra, multimatrix_algebra

try:
    from kaclattice import _kernels_numba
except ImportError:
    _kernels_numba = None


def median_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def build_cases(dim, rng):
    n = int(round(np.sqrt(dim)))
    alg = matrix_algebra(n)
    mult = np.ascontiguousarray(alg.mult)
    d = mult.shape[0]
    x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    y = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    xs = rng.standard_normal((64, d)) + 1j * rng.standard_normal((64, d))
    ys = rng.standard_normal((64, d)) + 1j * rng.standard_normal((64, d))
    small = multimatrix_algebra((2, 2)).mult
    wide = matrix_algebra(4).mult
    wx = rng.standard_normal((d, 8)) + 1j * rng.standard_normal((d, 8))
    wy = rng.standard_normal((d, 8)) + 1j * rng.standard_normal((d, 8))
    return [
        ("product", lambda k: k.product(mult, x, y)),
        ("batch_product", lambda k: k.batch_product(mult, xs, ys)),
        ("left_matrix", lambda k: k.left_matrix(mult, x)),
        ("right_matrix", lambda k: k.right_matrix(mult, y)),
        ("tensor_mult", lambda k: k.tensor_mult(small, wide)),
        ("assoc_residual", lambda k: k.assoc_residual(mult)),
        ("twisted_image", lambda k: k.twisted_image(mult, small, wx, wy, True)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=48,
                    help="target algebra dimension (rounded to a square)")
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    cases = build_cases(args.dim, rng)

    if _kernels_numba is None:
        print("numba backend unavailable; timing numpy kernels only")

    header = f"{'kernel':<16}{'numpy (ms)':>12}"
    if _kernels_numba is not None:
        header += f"{'numba (ms)':>12}{'speedup':>10}"
    print(header)
    for name, run in cases:
        if _kernels_numba is not None:
            run(_kernels_numba)  # compile outside the timed region
        t_np = median_time(lambda: run(_kernels_numpy), args.repeat)
        line = f"{name:<16}{1e3 * t_np:>12.3f}"
        if _kernels_numba is not None:
            t_nb = median_time(lambda: run(_kernels_numba), args.repeat)
            line += f"{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.2f}x"
        print(line)


if __name__ == "__main__":
    main()
