"""Time the compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Each row reports the best
of several repeats and checks that both backends agree.
"""

import argparse
import timeit

import numpy as np

from qdequant import kernels


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_fwht(bits, repeat, rng):
    rows = []
    for n in bits:
        values = rng.standard_normal(1 << n)
        ref = kernels.fwht(values, backend="python")
        assert np.allclose(kernels.fwht(values, backend="cython"), ref)
        py = _best(lambda: kernels.fwht(values, backend="python"), repeat)
        cy = _best(lambda: kernels.fwht(values, backend="cython"), repeat)
        rows.append((f"fwht n={n}", py, cy))
    return rows


def bench_pairs(sizes, n, repeat, rng):
    rows = []
    for d in sizes:
        masks = rng.integers(0, 1 << n, size=d)
        gram = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        a, ta = kernels.xor_bin_pairs(masks, gram, n, backend="python")
        b, tb = kernels.xor_bin_pairs(masks, gram, n, backend="cython")
        assert np.allclose(a, b) and np.isclose(ta, tb)
        py = _best(lambda: kernels.xor_bin_pairs(masks, gram, n, backend="python"), repeat)
        cy = _best(lambda: kernels.xor_bin_pairs(masks, gram, n, backend="cython"), repeat)
        rows.append((f"xor_bin_pairs d={d} n={n}", py, cy))
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--quick", action="store_true", help="smaller sizes")
    args = parser.parse_args(argv)

    try:
        from qdequant import _kernels  # noqa: F401
    except ImportError:
        parser.exit(1, "compiled extension not built; run pip install -e . first\n")

    rng = np.random.default_rng(args.seed)
    bits = range(10, 15) if args.quick else range(10, 21, 2)
    sizes = (64, 256) if args.quick else (64, 256, 1024, 2048)
    rows = bench_fwht(bits, args.repeat, rng) + bench_pairs(sizes, 8, args.repeat, rng)

    print(f"{'kernel':<28}{'python [ms]':>14}{'cython [ms]':>14}{'ratio':>9}")
    for name, py, cy in rows:
        print(f"{name:<28}{py * 1e3:>14.3f}{cy * 1e3:>14.3f}{py / cy:>9.2f}")


if __name__ == "__main__":
    main()
