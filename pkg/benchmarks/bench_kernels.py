"""Compiled kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on identical inputs through both backends; outputs are
checked for agreement before anything is timed.
"""

import argparse
import timeit

import numpy as np

from rankare import _pycore

try:
    from rankare import _core
except ImportError:  # extension not built
    _core = None


def cases(rng):
    n, rows = 500, 5000
    perms = np.array([rng.permutation(n) for _ in range(rows)])
    scores = rng.standard_normal(n)
    a, b = rng.permutation(100_000) + 1, rng.permutation(100_000) + 1
    return [
        ("count_discordances n=1e5", "count_discordances", (a, b)),
        (f"batch_discordances {rows}x{n}", "batch_discordances", (perms[:, 1:] + 1, perms[:, :-1] + 1)),
        (f"batch_lagged_products {rows}x{n}", "batch_lagged_products", (scores, scores, perms, 1)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _core is None:
        raise SystemExit("compiled extension not available; reinstall without RANKARE_NO_EXT")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<34}{'python s':>10}{'cython s':>10}{'speedup':>9}")
    for label, name, argv in cases(rng):
        py, cy = getattr(_pycore, name), getattr(_core, name)
        np.testing.assert_allclose(py(*argv), cy(*argv), rtol=1e-12)
        t_py = min(timeit.repeat(lambda: py(*argv), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: cy(*argv), number=1, repeat=args.repeat))
        print(f"{label:<34}{t_py:>10.4f}{t_cy:>10.4f}{t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
