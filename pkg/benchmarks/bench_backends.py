#!/usr/bin/env python3
"""Compare the numba and pure-numpy kernel backends.

Times tree growth and prediction at several problem sizes, then one full
selection run per backend, and checks that both produce identical output.
The selected backend for library use is controlled by the PPFS_BACKEND
environment variable; this script imports both implementations directly.

Run: python benchmarks/bench_backends.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ppfs import Dataset, FeatureKind, PpfsConfig, PpiConfig, TaskKind, select
from ppfs import _kernels_nb as nb
from ppfs import _kernels_np as npk

UNLIMITED = 2**31


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(repeats: int) -> None:
    rng = np.random.default_rng(0)
    print(f"{'case':<28}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for n, d in ((200, 5), (1000, 10), (4000, 10)):
        X = np.ascontiguousarray(rng.standard_normal((n, d)))
        yc = (X[:, 0] + 0.3 * rng.standard_normal(n) > 0).astype(np.int64)
        yr = X[:, 0] * 2.0 + rng.standard_normal(n)

        out_np = npk.grow_classifier(X, yc, 2, UNLIMITED, 2, 1)
        out_nb = nb.grow_classifier(X, yc, 2, UNLIMITED, 2, 1)
        assert all(
            np.array_equal(a, b) if isinstance(a, np.ndarray) else a == b
            for a, b in zip(out_np, out_nb)
        ), "backends disagree on the classifier tree"

        t_np = _time(lambda: npk.grow_classifier(X, yc, 2, UNLIMITED, 2, 1), repeats)
        t_nb = _time(lambda: nb.grow_classifier(X, yc, 2, UNLIMITED, 2, 1), repeats)
        print(f"{f'grow cls {n}x{d}':<28}{t_np:>11.4f}s{t_nb:>11.4f}s{t_np / t_nb:>9.1f}x")

        t_np = _time(lambda: npk.grow_regressor(X, yr, UNLIMITED, 2, 1), repeats)
        t_nb = _time(lambda: nb.grow_regressor(X, yr, UNLIMITED, 2, 1), repeats)
        print(f"{f'grow reg {n}x{d}':<28}{t_np:>11.4f}s{t_nb:>11.4f}s{t_np / t_nb:>9.1f}x")

        tree = nb.grow_regressor(X, yr, UNLIMITED, 2, 1)
        args = (tree[0], tree[1], tree[2], tree[3], X)
        assert np.array_equal(npk.apply_tree(*args), nb.apply_tree(*args))
        t_np = _time(lambda: npk.apply_tree(*args), repeats)
        t_nb = _time(lambda: nb.apply_tree(*args), repeats)
        print(f"{f'apply {n}x{d}':<28}{t_np:>11.4f}s{t_nb:>11.4f}s{t_np / t_nb:>9.1f}x")


def bench_selection(repeats: int) -> None:
    import ppfs.tree as tree_mod

    rng = np.random.default_rng(1)
    n, d = 800, 8
    X = rng.standard_normal((n, d))
    y = X[:, 0] * 1.5 + X[:, 1] - X[:, 2] + rng.standard_normal(n)
    ds = Dataset(
        names=tuple(f"x{i}" for i in range(d)),
        kinds=tuple(FeatureKind.continuous() for _ in range(d)),
        values=X,
        target=y,
        task=TaskKind.REGRESSION,
    )
    cfg = PpfsConfig(ppi=PpiConfig(b=10, seed=0), k=0, seed=3)

    results = {}
    times = {}
    for label, impl in (("numpy", npk), ("numba", nb)):
        tree_mod.grow_classifier = impl.grow_classifier
        tree_mod.grow_regressor = impl.grow_regressor
        tree_mod.apply_tree = impl.apply_tree
        times[label] = _time(lambda: select(ds, cfg), repeats)
        results[label] = select(ds, cfg).selected
    assert results["numpy"] == results["numba"], "backends selected different features"
    print(
        f"{f'select {n}x{d} b=10':<28}{times['numpy']:>11.4f}s{times['numba']:>11.4f}s"
        f"{times['numpy'] / times['numba']:>9.1f}x"
    )
    print(f"selected: {results['numba']}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    # compile outside the timers
    X = np.ascontiguousarray(np.linspace(0, 1, 16).reshape(8, 2))
    nb.grow_classifier(X, np.array([0, 1] * 4, dtype=np.int64), 2, 4, 2, 1)
    out = nb.grow_regressor(X, X[:, 0], 4, 2, 1)
    nb.apply_tree(out[0], out[1], out[2], out[3], X)

    bench_kernels(args.repeats)
    bench_selection(args.repeats)


if __name__ == "__main__":
    main()
