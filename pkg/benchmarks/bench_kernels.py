"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both variants are reachable in one process (the env flag only changes which
one the library dispatches to), so each kernel is timed side by side and the
outputs are compared before anything is reported.
"""
import argparse
import timeit

import numpy as np

from hestonlaw import kernels
from hestonlaw._accel import HAVE_NUMBA


def cases():
    rng = np.random.default_rng(0)
    z = rng.standard_normal((256, 2, 8192))
    euler = (0.0, 0.0225, 2.0, 0.0225, 0.8, -0.9, 1 / 256, z)
    lo = np.linspace(30.0, 9000.0, 2000)
    hi = lo + 4.0
    f_lo = kernels.f_scaled_numpy(lo, 2.0, 0.8, -0.9, 1.0)
    f_hi = kernels.f_scaled_numpy(hi, 2.0, 0.8, -0.9, 1.0)
    keep = f_lo * f_hi < 0
    bis = (lo[keep], hi[keep], 2.0, 0.8, -0.9, 1.0)
    conv = (rng.random(20_000), rng.random(3_000))
    return [
        ("euler_block  8192 paths x 256 steps", kernels.euler_block_numba, kernels.euler_block_numpy, euler),
        (f"bisect_f     {keep.sum()} brackets", kernels.bisect_f_numba, kernels.bisect_f_numpy, bis),
        ("convolve     20000 x 3000", kernels.direct_convolve_numba, kernels.direct_convolve_numpy, conv),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':40s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for name, fast, slow, a in cases():
        ra, rb = fast(*a), slow(*a)
        ra = ra if isinstance(ra, tuple) else (ra,)
        rb = rb if isinstance(rb, tuple) else (rb,)
        for x, y in zip(ra, rb):
            np.testing.assert_allclose(x, y, rtol=1e-11, atol=1e-13)
        tf = min(timeit.repeat(lambda: fast(*a), number=1, repeat=args.repeat))
        ts = min(timeit.repeat(lambda: slow(*a), number=1, repeat=args.repeat))
        print(f"{name:40s} {tf:10.4f} {ts:10.4f} {ts / tf:7.1f}x")


if __name__ == "__main__":
    main()
