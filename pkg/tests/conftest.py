import numpy as np
import pytest

from ppfs import Dataset, FeatureKind, TaskKind
from ppfs._kernels import warmup


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # trigger jit compilation once, outside any timed test
    warmup()


def make_regression(n=100, d=3, seed=0, signal=True, name="reg"):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal((n, d))
    y = values[:, 0] * 2.0 + 0.5 * rng.standard_normal(n) if signal else rng.standard_normal(n)
    return Dataset(
        names=tuple(f"x{i}" for i in range(d)),
        kinds=tuple(FeatureKind.continuous() for _ in range(d)),
        values=values,
        target=y,
        task=TaskKind.REGRESSION,
        name=name,
    )


def make_classification(n=100, d=3, seed=0, signal=True, name="cls"):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal((n, d))
    if signal:
        y = (values[:, 0] + 0.3 * rng.standard_normal(n) > 0).astype(np.int64)
    else:
        y = rng.integers(0, 2, n).astype(np.int64)
    return Dataset(
        names=tuple(f"x{i}" for i in range(d)),
        kinds=tuple(FeatureKind.continuous() for _ in range(d)),
        values=values,
        target=y,
        task=TaskKind.CLASSIFICATION,
        name=name,
    )


@pytest.fixture
def regression_ds():
    return make_regression()


@pytest.fixture
def classification_ds():
    return make_classification()
