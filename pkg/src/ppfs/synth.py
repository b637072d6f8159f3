"""Ground-truth validation: synthetic Bayesian networks and a CV benchmark harness.

The generator samples a linear-Gaussian structural model in topological
order (parents -> target -> children), where each spouse co-parents a child
with the target and also carries a deliberately weak direct edge into the
target. That weak edge gives spouses the signature that makes them
recoverable by marginal screening followed by conditional re-testing: faint
association on their own, strong association once the shared child is in
the conditioning set. Noise features are independent of everything.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .dataset import Dataset, FeatureKind, TaskKind, k_fold_indices, project_columns, take_rows
from .ppi import ConfigError
from .seeding import ROLE_BENCH, ROLE_REPLICATE, derive_seed
from .selection import PpfsConfig, _echo_config, select
from .tree import LearnerSpec, fit, predict

LINEAR_GAUSSIAN = "linear-gaussian"
THRESHOLD_BINARY = "threshold-binary"

# Spouse -> target edges are scaled down by this default factor relative to
# the sampled coefficient range, keeping spouses weak marginally but strong
# once the shared child is conditioned on.
DEFAULT_SPOUSE_TARGET_SCALE = 0.5


class SynthError(ValueError):
    """Raised for invalid generator specifications."""


@dataclass(frozen=True)
class BnSpec:
    """Shape and strength of the generated network."""

    n_samples: int
    n_parents: int = 2
    n_children: int = 1
    n_spouses: int = 1
    n_noise: int = 6
    coef_range: tuple[float, float] = (0.8, 1.2)
    spouse_target_scale: float = DEFAULT_SPOUSE_TARGET_SCALE
    noise_std: float = 1.0
    target_link: str = LINEAR_GAUSSIAN
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_samples < 50:
            raise SynthError("need at least 50 samples")
        for name in ("n_parents", "n_children", "n_spouses", "n_noise"):
            if getattr(self, name) < 0:
                raise SynthError(f"{name} must be >= 0")
        if self.n_parents + self.n_children + self.n_spouses + self.n_noise < 1:
            raise SynthError("the network needs at least one feature")
        if self.n_spouses > 0 and self.n_children == 0:
            raise SynthError("spouses require at least one child")
        lo, hi = self.coef_range
        if not 0.0 < lo <= hi:
            raise SynthError("coef_range must satisfy 0 < low <= high")
        if self.spouse_target_scale < 0.0:
            raise SynthError("spouse_target_scale must be >= 0")
        if self.noise_std <= 0.0:
            raise SynthError("noise_std must be positive")
        if self.target_link not in (LINEAR_GAUSSIAN, THRESHOLD_BINARY):
            raise SynthError(f"unknown target_link {self.target_link!r}")
        if self.seed < 0:
            raise SynthError("seed must be non-negative")

    @property
    def task(self) -> TaskKind:
        return TaskKind.REGRESSION if self.target_link == LINEAR_GAUSSIAN else TaskKind.CLASSIFICATION


def _coefs(rng: np.random.Generator, size: int, lo: float, hi: float) -> np.ndarray:
    return rng.choice([-1.0, 1.0], size) * rng.uniform(lo, hi, size)


def generate_bn(spec: BnSpec) -> tuple[Dataset, frozenset[str]]:
    """Sample one dataset; the true blanket is parents + children + spouses."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n_samples
    lo, hi = spec.coef_range

    parents = rng.standard_normal((n, spec.n_parents))
    spouses = rng.standard_normal((n, spec.n_spouses))
    c_parent = _coefs(rng, spec.n_parents, lo, hi)
    w_spouse = spec.spouse_target_scale * _coefs(rng, spec.n_spouses, lo, hi)
    a_child = _coefs(rng, spec.n_children, lo, hi)
    b_spouse = _coefs(rng, spec.n_spouses, lo, hi)

    y_cont = rng.normal(0.0, spec.noise_std, n)
    if spec.n_parents:
        y_cont = y_cont + parents @ c_parent
    if spec.n_spouses:
        y_cont = y_cont + spouses @ w_spouse

    if spec.target_link == THRESHOLD_BINARY:
        target = (y_cont > np.median(y_cont)).astype(np.int64)
        y_signal = 2.0 * target - 1.0
        target_labels: tuple[str, ...] | None = ("0", "1")
    else:
        target = y_cont
        y_signal = y_cont
        target_labels = None

    children = np.empty((n, spec.n_children))
    for j in range(spec.n_children):
        child = a_child[j] * y_signal + rng.normal(0.0, spec.noise_std, n)
        for s in range(spec.n_spouses):
            if s % spec.n_children == j:
                child = child + b_spouse[s] * spouses[:, s]
        children[:, j] = child

    noise = rng.standard_normal((n, spec.n_noise))

    blocks, names = [], []
    for mat, tag in ((parents, "parent"), (children, "child"), (spouses, "spouse"), (noise, "noise")):
        if mat.shape[1]:
            blocks.append(mat)
            names.extend(f"{tag}_{i}" for i in range(mat.shape[1]))
    values = np.hstack(blocks)

    ds = Dataset(
        names=tuple(names),
        kinds=tuple(FeatureKind.continuous() for _ in names),
        values=values,
        target=target,
        task=spec.task,
        name="synthetic_bn",
        target_labels=target_labels,
    )
    truth = frozenset(nm for nm in names if not nm.startswith("noise_"))
    return ds, truth


@dataclass(frozen=True)
class RecoveryScore:
    precision: float
    recall: float
    f1: float
    selected: frozenset[str]
    truth: frozenset[str]


def score_recovery(selected: Iterable[str], truth: Iterable[str]) -> RecoveryScore:
    """Set precision/recall/F1 of a selection against the known blanket."""
    sel = frozenset(selected)
    tru = frozenset(truth)
    hit = len(sel & tru)
    precision = hit / len(sel) if sel else 0.0
    recall = hit / len(tru) if tru else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return RecoveryScore(precision=precision, recall=recall, f1=f1, selected=sel, truth=tru)


def recovery_trials(
    spec: BnSpec, cfg: PpfsConfig, replicates: int, jobs: int = 1
) -> list[tuple[int, RecoveryScore]]:
    """Independent generate/select/score runs with per-replicate derived seeds."""
    if replicates < 1:
        raise ConfigError("replicates must be >= 1")
    out = []
    for r in range(replicates):
        ds, truth = generate_bn(replace(spec, seed=derive_seed(spec.seed, ROLE_REPLICATE, r)))
        rep = select(ds, replace(cfg, seed=derive_seed(cfg.seed, ROLE_REPLICATE, r)), jobs=jobs)
        out.append((r, score_recovery(rep.selected, truth)))
    return out


@dataclass(frozen=True)
class BenchReport:
    """All-features baseline vs selected features under outer k-fold CV."""

    dataset: str
    task: str
    metric: str
    baseline: float
    ppfs: float
    total_features: int
    selected_counts: tuple[int, ...]
    selected_mode: int
    folds: tuple[dict, ...]
    config: dict
    timings_ms: dict

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "task": self.task,
            "metric": self.metric,
            "baseline": self.baseline,
            "ppfs": self.ppfs,
            "total_features": self.total_features,
            "selected_counts": list(self.selected_counts),
            "selected_mode": self.selected_mode,
            "folds": [dict(f) for f in self.folds],
            "config": self.config,
            "timings_ms": self.timings_ms,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_csv(self) -> str:
        lines = [
            "dataset,all,ppfs,b,k",
            f"{self.dataset},{self.baseline:.6g},{self.ppfs:.6g},{self.config['b']},{self.config['k']}",
            "",
            "dataset,total,ppfs",
            f"{self.dataset},{self.total_features},{self.selected_mode}",
        ]
        return "\n".join(lines)


def _evaluate(learner: LearnerSpec, train: Dataset, test: Dataset) -> float:
    model = fit(learner, train)
    pred = predict(model, test)
    if train.task is TaskKind.CLASSIFICATION:
        return float(np.mean(np.argmax(pred, axis=1) == test.target))
    return float(np.mean((pred - test.target) ** 2))


def _constant_metric(train: Dataset, test: Dataset) -> float:
    # fallback when the selector returns nothing: majority class / mean response
    if train.task is TaskKind.CLASSIFICATION:
        counts = np.bincount(train.target, minlength=train.n_classes)
        return float(np.mean(test.target == int(np.argmax(counts))))
    return float(np.mean((test.target - float(np.mean(train.target))) ** 2))


def benchmark(ds: Dataset, cfg: PpfsConfig, cv_folds: int = 5, jobs: int = 1) -> BenchReport:
    """Outer CV: select on the training portion only, evaluate on the held-out fold."""
    if cv_folds < 2:
        raise ConfigError("cv_folds must be >= 2")
    t_start = time.perf_counter()
    folds = k_fold_indices(ds, cv_folds, derive_seed(cfg.seed, ROLE_BENCH))
    learner = cfg.ppi.learner

    fold_rows = []
    base_scores = []
    sel_scores = []
    counts = []
    for f, fold in enumerate(folds):
        mask = np.ones(ds.n, dtype=bool)
        mask[fold] = False
        train = take_rows(ds, np.flatnonzero(mask))
        test = take_rows(ds, fold)

        base = _evaluate(learner, train, test)
        report = select(train, cfg, jobs=jobs)
        picked = sorted(ds.names.index(nm) for nm in report.selected)
        if picked:
            score = _evaluate(learner, project_columns(train, picked), project_columns(test, picked))
        else:
            score = _constant_metric(train, test)

        base_scores.append(base)
        sel_scores.append(score)
        counts.append(len(picked))
        fold_rows.append(
            {
                "fold": f,
                "baseline": base,
                "ppfs": score,
                "selected": [ds.names[i] for i in picked],
            }
        )

    vals, freqs = np.unique(np.asarray(counts), return_counts=True)
    mode = int(vals[np.argmax(freqs)])
    metric = "accuracy" if ds.task is TaskKind.CLASSIFICATION else "mse"
    return BenchReport(
        dataset=ds.name,
        task=ds.task.value,
        metric=metric,
        baseline=float(np.mean(base_scores)),
        ppfs=float(np.mean(sel_scores)),
        total_features=ds.d,
        selected_counts=tuple(counts),
        selected_mode=mode,
        folds=tuple(fold_rows),
        config={**_echo_config(ds, cfg), "cv_folds": cv_folds},
        timings_ms={"total": (time.perf_counter() - t_start) * 1e3},
    )
