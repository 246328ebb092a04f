"""Compare the numba-jitted kernels against the pure-numpy fallback.

Run twice, once per backend:

    python3 bench/compare_backends.py
    STEPBIAS_NO_NUMBA=1 python3 bench/compare_backends.py

Prints one timing line per kernel; the first call of each jitted kernel
is excluded so compilation time does not pollute the numbers.
"""

import time

import numpy as np

from stepbias import accel


def bench(label, fn, repeats=5):
    fn()  # warm up (numba compilation on the jitted backend)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    print(f"{label:24s} backend={accel.BACKEND:6s} best={min(times) * 1e3:9.3f} ms")


def main():
    rng = np.random.default_rng(0)

    A = rng.normal(size=(120, 120))
    A = (A + A.T) / 2.0
    bench("jacobi_eigh 120x120", lambda: accel.jacobi_eigh(A, 1e-12))

    sigma = np.sort(rng.uniform(0.1, 1.0, size=400))[::-1].copy()
    mu0 = rng.normal(size=400)
    bench(
        "level_set_run 400-dim",
        lambda: accel.level_set_run(sigma, mu0, 1.0 / sigma[0], 1e-10, 200_000, 1e12),
    )

    X = rng.normal(size=(600, 4))
    bench("pairwise_sq_dists 600", lambda: accel.pairwise_sq_dists(X))


if __name__ == "__main__":
    main()
