"""Predictive permutation independence test.

Measures whether feature i carries information about the target beyond a
conditioning set U. The model is trained on the columns {U, i} over B
independent train/test resamples; on each test partition the feature's
column is shuffled (its knockoff) and the paired empirical risks are
compared with a one-tailed Wilcoxon test. A small p-value means the
knockoff is significantly worse, i.e. the feature matters given U.

The tested feature sits in the last design-matrix column; the conditioning
columns come first in ascending original index. With deterministic
lowest-column tie-breaking in the learner this makes a feature that is
redundant given U (an exact duplicate, say) invisible to the model, so its
knockoff changes nothing and the test correctly reports independence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from ._parallel import pmap
from .dataset import Dataset, TaskKind, permute_column, project_columns, train_test_split
from .seeding import ROLE_PERMUTE, ROLE_SPLIT, derive_seed
from .stats import wilcoxon_one_sided
from .tree import LearnerSpec, empirical_risk, fit, per_sample_loss, predict

_MAX_SPLIT_RETRIES = 10


class ConfigError(ValueError):
    """Raised when a configuration violates its invariants."""


class PpiError(RuntimeError):
    """Raised when the test cannot be carried out on the given data."""


def min_copies(test_fraction: float) -> int:
    """Smallest admissible B: enough test partitions to cover the sample."""
    return max(5, math.ceil(1.0 / test_fraction))


@dataclass(frozen=True)
class PpiConfig:
    b: int = 10
    learner: LearnerSpec = LearnerSpec()
    test_fraction: float = 0.2
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must lie in (0, 1)")
        if self.b < min_copies(self.test_fraction):
            raise ConfigError(
                f"b must be >= {min_copies(self.test_fraction)} for "
                f"test_fraction={self.test_fraction}, got {self.b}"
            )
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")


@dataclass(frozen=True)
class RiskPair:
    """Paired per-copy risks on the original and knockoff test partitions."""

    original: np.ndarray
    knockoff: np.ndarray
    degenerate: bool


@dataclass(frozen=True)
class PpiCopy:
    """Instrumentation record for one train/permute/score copy."""

    index: int
    split_seed: int
    perm_seed: int
    train: Dataset
    test: Dataset
    test_knockoff: Dataset
    risk: float
    knockoff_risk: float
    feature_position: int


def _run_copy(design: Dataset, position: int, cfg: PpiConfig, j: int) -> PpiCopy:
    split = None
    split_seed = -1
    for attempt in range(_MAX_SPLIT_RETRIES):
        split_seed = derive_seed(cfg.seed, ROLE_SPLIT, j, attempt)
        candidate = train_test_split(design, cfg.test_fraction, split_seed)
        if design.task is TaskKind.CLASSIFICATION and np.unique(candidate.test.target).size < 2:
            continue
        split = candidate
        break
    if split is None:
        raise PpiError(
            f"copy {j}: test partition was single-class after {_MAX_SPLIT_RETRIES} redraws"
        )
    model = fit(cfg.learner, split.train)
    risk = empirical_risk(
        per_sample_loss(design.task, predict(model, split.test), split.test.target)
    )
    perm_seed = derive_seed(cfg.seed, ROLE_PERMUTE, j)
    knockoff = permute_column(split.test, position, perm_seed)
    knockoff_risk = empirical_risk(
        per_sample_loss(design.task, predict(model, knockoff), knockoff.target)
    )
    return PpiCopy(
        index=j,
        split_seed=split_seed,
        perm_seed=perm_seed,
        train=split.train,
        test=split.test,
        test_knockoff=knockoff,
        risk=risk,
        knockoff_risk=knockoff_risk,
        feature_position=position,
    )


def ppi_test(
    ds: Dataset,
    feature: int,
    conditioning: Iterable[int] = (),
    cfg: PpiConfig = PpiConfig(),
    jobs: int = 1,
    hook: Callable[[PpiCopy], None] | None = None,
) -> tuple[float, RiskPair]:
    """P-value for H0: feature is independent of the target given ``conditioning``.

    Returns the raw p-value together with the paired risk vectors; comparing
    against a significance level is the caller's business. Results are
    bit-identical for any ``jobs`` because every copy works from seeds
    derived up front from ``cfg.seed``.
    """
    cond = list(conditioning)
    if len(set(cond)) != len(cond):
        raise ConfigError(f"conditioning set has duplicates: {cond}")
    if feature in cond:
        raise ConfigError(f"feature {feature} cannot appear in its own conditioning set")
    for c in [feature, *cond]:
        if not 0 <= c < ds.d:
            raise ConfigError(f"column index {c} out of range [0, {ds.d})")
    if ds.n < 5:
        raise PpiError(f"need at least 5 rows, got {ds.n}")
    if cfg.b > ds.n:
        raise ConfigError(f"b={cfg.b} exceeds the sample size n={ds.n}")

    cols = sorted(cond) + [feature]
    design = project_columns(ds, cols)
    position = len(cols) - 1

    copies = pmap(lambda j: _run_copy(design, position, cfg, j), list(range(cfg.b)), jobs)
    if hook is not None:
        for copy in copies:
            hook(copy)

    original = np.array([c.risk for c in copies], dtype=np.float64)
    knockoff = np.array([c.knockoff_risk for c in copies], dtype=np.float64)
    result = wilcoxon_one_sided(original, knockoff)
    pair = RiskPair(original=original, knockoff=knockoff, degenerate=result.degenerate)
    return result.p_value, pair
