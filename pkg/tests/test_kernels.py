"""Backend equivalence: the jit kernels and the numpy fallbacks must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

from ppfs import _kernels_np as knp

nb = pytest.importorskip("ppfs._kernels_nb")

UNLIMITED = 2**31


def _trees_equal(a, b):
    return all(
        np.array_equal(u, v) if isinstance(u, np.ndarray) else u == v
        for u, v in zip(a, b)
    )


@pytest.mark.parametrize("seed", range(8))
def test_classifier_trees_bit_identical(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 300))
    d = int(rng.integers(1, 5))
    X = np.ascontiguousarray(rng.standard_normal((n, d)))
    if seed % 2:
        X[:, 0] = np.round(X[:, 0] * 2)  # force tied values
    n_classes = int(rng.integers(2, 5))
    y = rng.integers(0, n_classes, n).astype(np.int64)
    depth = [UNLIMITED, 3][seed % 2]
    a = knp.grow_classifier(X, y, n_classes, depth, 2, 1)
    b = nb.grow_classifier(X, y, n_classes, depth, 2, 1)
    assert _trees_equal(a, b)
    leaves_np = knp.apply_tree(a[0], a[1], a[2], a[3], X)
    leaves_nb = nb.apply_tree(b[0], b[1], b[2], b[3], X)
    assert np.array_equal(leaves_np, leaves_nb)


@pytest.mark.parametrize("seed", range(8))
def test_regressor_trees_bit_identical(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(5, 300))
    d = int(rng.integers(1, 5))
    X = np.ascontiguousarray(rng.standard_normal((n, d)))
    if seed % 2:
        X[:, -1] = np.round(X[:, -1])
    y = X[:, 0] + 0.5 * rng.standard_normal(n)
    depth = [UNLIMITED, 4][seed % 2]
    a = knp.grow_regressor(X, y, depth, 2, 1)
    b = nb.grow_regressor(X, y, depth, 2, 1)
    assert _trees_equal(a, b)


def test_min_leaf_respected_in_both_backends():
    rng = np.random.default_rng(5)
    X = np.ascontiguousarray(rng.standard_normal((80, 2)))
    y = (X[:, 0] > 0).astype(np.int64)
    for impl in (knp, nb):
        left, right, feat, thr, counts, node_n, n_nodes = impl.grow_classifier(
            X, y, 2, UNLIMITED, 2, 10
        )
        leaf_sizes = node_n[feat == -1]
        assert leaf_sizes.min() >= 10


def test_duplicate_columns_prefer_lowest_index():
    rng = np.random.default_rng(6)
    x = rng.standard_normal(50)
    X = np.ascontiguousarray(np.column_stack([x, x]))
    y = (x > 0).astype(np.int64)
    for impl in (knp, nb):
        left, right, feat, thr, counts, node_n, n_nodes = impl.grow_classifier(
            X, y, 2, UNLIMITED, 2, 1
        )
        used = feat[feat >= 0]
        assert np.all(used == 0)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, PPFS_BACKEND="numpy")
    out = subprocess.run(
        [sys.executable, "-c", "import ppfs; print(ppfs.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_default_backend_is_numba_when_available():
    env = {k: v for k, v in os.environ.items() if k != "PPFS_BACKEND"}
    out = subprocess.run(
        [sys.executable, "-c", "import ppfs; print(ppfs.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "numba"


def test_bad_env_flag_rejected():
    env = dict(os.environ, PPFS_BACKEND="cuda")
    out = subprocess.run(
        [sys.executable, "-c", "import ppfs"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert out.returncode != 0
    assert "PPFS_BACKEND" in out.stderr


def test_full_selection_identical_across_backends(tmp_path):
    # end-to-end: the selected feature set must not depend on the backend
    script = (
        "import numpy as np\n"
        "from ppfs import Dataset, FeatureKind, TaskKind, PpfsConfig, PpiConfig, select\n"
        "rng = np.random.default_rng(3)\n"
        "X = rng.standard_normal((150, 5))\n"
        "y = X[:, 1] * 2 + rng.standard_normal(150)\n"
        "ds = Dataset(names=tuple(f'x{i}' for i in range(5)),\n"
        "             kinds=tuple(FeatureKind.continuous() for _ in range(5)),\n"
        "             values=X, target=y, task=TaskKind.REGRESSION)\n"
        "rep = select(ds, PpfsConfig(ppi=PpiConfig(b=8, seed=0), seed=5))\n"
        "print(rep.selected)\n"
    )
    results = {}
    for backend in ("numpy", "numba"):
        env = dict(os.environ, PPFS_BACKEND=backend)
        out = subprocess.run(
            [sys.executable, "-c", script], capture_output=True, text=True, env=env, check=True
        )
        results[backend] = out.stdout
    assert results["numpy"] == results["numba"]


def test_aggregated_selection_identical_across_backends(tmp_path):
    # same check through the CLI with fold aggregation on a bundled dataset
    import json
    from pathlib import Path

    csv_path = Path(__file__).resolve().parent.parent / "data" / "statlog_like.csv"
    payloads = {}
    for backend in ("numpy", "numba"):
        out_path = tmp_path / f"{backend}.json"
        env = dict(os.environ, PPFS_BACKEND=backend)
        subprocess.run(
            [
                sys.executable, "-m", "ppfs.cli", "select",
                "--input", str(csv_path), "--target", "target",
                "--task", "classification", "--b", "10", "--k", "5",
                "--seed", "7", "--output", str(out_path),
            ],
            capture_output=True,
            text=True,
            env=env,
            check=True,
        )
        payload = json.loads(out_path.read_text())
        payload.pop("timings_ms")
        payloads[backend] = payload
    assert payloads["numpy"] == payloads["numba"]
