"""
Compare the numba kernels with their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each row times one kernel call on the same inputs for both variants and
checks that they agree.
"""

import argparse
import timeit

import numpy as np

from exlab import kernels
from exlab._jit import HAVE_NUMBA
from exlab.bounds import subset_masks
from exlab.kernels import complement, subset_offsets, zeta_matrix
from exlab.protocols import pjo_state_table, restriction_codes


def cases():
    rng = np.random.default_rng(0)
    for n, m in [(8, 4), (10, 5), (12, 6)]:
        y = tuple(range(1, m + 1))
        yoff, eoff = subset_offsets(n, y), subset_offsets(n, complement(n, y))
        psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        psi /= np.linalg.norm(psi)
        yield f"zeta_probabilities n={n} m={m}", "zeta_probabilities", (psi, yoff, eoff)
    for n, m in [(8, 3), (10, 5)]:
        y = tuple(range(2, m + 2))
        states = pjo_state_table(n, m, 3)
        zrows = zeta_matrix(m)[restriction_codes(np.arange(1 << n), y, n)]
        args = (states, subset_offsets(n, y), subset_offsets(n, complement(n, y)), zrows)
        yield f"target_probabilities n={n} m={m} (2^n states)", "target_probabilities", args
    for n, m in [(12, 4), (14, 5)]:
        xs = np.arange(1 << n, dtype=np.int64)
        ones = np.bitwise_count(xs) * 2 <= n
        yield f"count_answer_hits n={n} m={m}", "count_answer_hits", (xs, ones, subset_masks(n, m))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not HAVE_NUMBA:
        print("numba not installed; only the numpy variants exist")
    print(f"{'case':48s} {'numba':>11s} {'numpy':>11s} {'speedup':>8s}")
    for label, name, call_args in cases():
        jit = getattr(kernels, f"{name}_jit")
        ref = getattr(kernels, f"{name}_numpy")
        a, b = jit(*call_args), ref(*call_args)  # warm-up and compile
        assert np.allclose(a, b, atol=1e-12), label
        number = 3
        tj = min(timeit.repeat(lambda: jit(*call_args), number=number, repeat=args.repeat)) / number
        tn = min(timeit.repeat(lambda: ref(*call_args), number=number, repeat=args.repeat)) / number
        print(f"{label:48s} {tj * 1e3:9.3f}ms {tn * 1e3:9.3f}ms {tn / tj:7.1f}x")


if __name__ == "__main__":
    main()
