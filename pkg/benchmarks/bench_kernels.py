"""Compare the numba and numpy row-reduction kernels over F_p.

Usage: python3 benchmarks/bench_kernels.py [--sizes 8 32 128] [--prime 5] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from opseq.linalg.kernels import rref_modp_numba, rref_modp_numpy


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 32, 128])
    ap.add_argument("--prime", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if rref_modp_numba is None:
        raise SystemExit("numba is not importable")
    rng = np.random.default_rng(args.seed)
    rref_modp_numba(np.eye(2, dtype=np.int64), args.prime)  # compile outside the timing
    print(f"{'size':>6} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for n in args.sizes:
        a = rng.integers(0, args.prime, size=(n, n + n // 2)).astype(np.int64)
        fast = rref_modp_numba(a, args.prime)
        slow = rref_modp_numpy(a, args.prime)
        assert all(np.array_equal(x, y) for x, y in zip(fast, slow)), "kernels disagree"
        t_nb = min(timeit.repeat(lambda: rref_modp_numba(a, args.prime), number=1, repeat=args.repeat))
        t_np = min(timeit.repeat(lambda: rref_modp_numpy(a, args.prime), number=1, repeat=args.repeat))
        print(f"{n:>6} {1e3 * t_nb:>10.3f} {1e3 * t_np:>10.3f} {t_np / t_nb:>8.1f}")


if __name__ == "__main__":
    main()
