"""Markov-blanket feature selection: growth, importance-ordered shrink, K-fold aggregation.

Growth admits every feature whose marginal permutation test is significant.
Shrink walks the candidates from least to most important, re-testing each
against the rest of the current blanket and dropping false positives in a
single pass (a restarting variant is available behind ``shrink_mode``).
With K >= 2, both phases run per fold and the blanket whose members recur
most across folds, normalised by blanket size, wins.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ._parallel import pmap
from .dataset import Dataset, take_rows, k_fold_indices
from .ppi import ConfigError, PpiConfig, ppi_test
from .seeding import ROLE_FOLDS, ROLE_PPI_CALL, derive_seed

# p-values are floored before taking log(1/p) so an underflowing
# approximation cannot produce an infinite importance
P_FLOOR = 1e-300

_PHASE_GROWTH = 0
_PHASE_SHRINK = 1


def importance_score(p_value: float) -> float:
    """log(1/p): strictly decreasing in p, so sorting by either is equivalent."""
    return math.log(1.0 / max(p_value, P_FLOOR))


@dataclass(frozen=True)
class BlanketEntry:
    feature: int
    p_value: float
    importance: float


@dataclass(frozen=True)
class CandidateBlanket:
    entries: tuple[BlanketEntry, ...] = ()
    source_fold: int | None = None

    def __post_init__(self) -> None:
        feats = [e.feature for e in self.entries]
        if len(set(feats)) != len(feats):
            raise ConfigError(f"duplicate features in blanket: {feats}")
        object.__setattr__(self, "entries", tuple(self.entries))

    @property
    def features(self) -> tuple[int, ...]:
        return tuple(e.feature for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class BlanketEnsemble:
    blankets: tuple[CandidateBlanket, ...]
    union: tuple[int, ...]
    freq: dict[int, int]
    z: tuple[float, ...]
    winner: int


@dataclass(frozen=True)
class PpfsConfig:
    ppi: PpiConfig = field(default_factory=PpiConfig)
    k: int = 0
    alpha: float | None = None
    fold_mode: str = "subset"
    shrink_mode: str = "improved"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.alpha is None:
            object.__setattr__(self, "alpha", self.ppi.alpha)
        elif self.alpha != self.ppi.alpha:
            raise ConfigError(
                f"alpha={self.alpha} disagrees with ppi.alpha={self.ppi.alpha}"
            )
        if self.k != 0 and self.k < 2:
            raise ConfigError("k must be 0 (aggregation off) or >= 2")
        if self.fold_mode not in ("subset", "complement"):
            raise ConfigError(f"unknown fold_mode {self.fold_mode!r}")
        if self.shrink_mode not in ("improved", "restart"):
            raise ConfigError(f"unknown shrink_mode {self.shrink_mode!r}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")


def _call_cfg(cfg: PpfsConfig, fold_part: int, phase: int, feature: int, pass_no: int) -> PpiConfig:
    # fold_part 0 is the whole-data run, fold k maps to k + 1
    seed = derive_seed(cfg.seed, ROLE_PPI_CALL, fold_part, phase, feature, pass_no)
    return replace(cfg.ppi, seed=seed)


def _growth(ds: Dataset, cfg: PpfsConfig, fold_part: int, jobs: int) -> CandidateBlanket:
    def one(i: int) -> tuple[int, float]:
        p, _ = ppi_test(ds, i, (), _call_cfg(cfg, fold_part, _PHASE_GROWTH, i, 0))
        return i, p

    results = pmap(one, list(range(ds.d)), jobs)
    entries = tuple(
        BlanketEntry(feature=i, p_value=p, importance=importance_score(p))
        for i, p in results
        if p <= cfg.alpha
    )
    return CandidateBlanket(entries=entries)


def growth_phase(ds: Dataset, cfg: PpfsConfig, jobs: int = 1) -> CandidateBlanket:
    """Marginal screening: keep every feature with p <= alpha against U = {}."""
    return _growth(ds, cfg, 0, jobs)


def sort_by_importance(cb: CandidateBlanket) -> CandidateBlanket:
    """Ascending importance (descending p), ties by ascending feature index."""
    entries = tuple(sorted(cb.entries, key=lambda e: (-e.p_value, e.feature)))
    return CandidateBlanket(entries=entries, source_fold=cb.source_fold)


def _shrink(ds: Dataset, cb: CandidateBlanket, cfg: PpfsConfig, fold_part: int, jobs: int) -> CandidateBlanket:
    current = [e.feature for e in cb.entries]

    def test(feature: int, rest: Sequence[int], pass_no: int) -> float:
        p, _ = ppi_test(
            ds, feature, rest, _call_cfg(cfg, fold_part, _PHASE_SHRINK, feature, pass_no), jobs=jobs
        )
        return p

    if cfg.shrink_mode == "improved":
        for e in cb.entries:
            rest = [f for f in current if f != e.feature]
            if not rest:
                # a lone candidate reduces to the marginal test it already passed
                continue
            if test(e.feature, rest, 0) > cfg.alpha:
                current.remove(e.feature)
    else:
        pass_no = 0
        removed_one = True
        while removed_one:
            removed_one = False
            for e in cb.entries:
                if e.feature not in current:
                    continue
                rest = [f for f in current if f != e.feature]
                if not rest:
                    continue
                if test(e.feature, rest, pass_no) > cfg.alpha:
                    current.remove(e.feature)
                    removed_one = True
                    break
            pass_no += 1

    survivors = tuple(e for e in cb.entries if e.feature in current)
    return CandidateBlanket(entries=survivors, source_fold=cb.source_fold)


def shrink_phase(ds: Dataset, cb: CandidateBlanket, cfg: PpfsConfig, jobs: int = 1) -> CandidateBlanket:
    """Drop candidates that are independent of the target given the rest.

    Expects ``cb`` in ascending-importance order (see :func:`sort_by_importance`)
    so the least important candidates are re-tested first.
    """
    return _shrink(ds, cb, cfg, 0, jobs)


def _grow_sort_shrink(ds: Dataset, cfg: PpfsConfig, fold_part: int, jobs: int) -> CandidateBlanket:
    cb = sort_by_importance(_growth(ds, cfg, fold_part, jobs))
    return _shrink(ds, cb, cfg, fold_part, jobs)


def score_blankets(blankets: Sequence[CandidateBlanket]) -> BlanketEnsemble:
    """Frequency-normalised blanket scores; ties go to the lowest fold index."""
    if not blankets:
        raise ConfigError("cannot score an empty blanket list")
    union = sorted({f for bl in blankets for f in bl.features})
    freq = {f: sum(1 for bl in blankets if f in bl.features) for f in union}
    z = tuple(
        (sum(freq[f] for f in bl.features) / len(bl)) if len(bl) else 0.0 for bl in blankets
    )
    winner = int(np.argmax(z))
    return BlanketEnsemble(blankets=tuple(blankets), union=tuple(union), freq=freq, z=z, winner=winner)


def aggregate(ds: Dataset, cfg: PpfsConfig, jobs: int = 1) -> tuple[BlanketEnsemble, CandidateBlanket]:
    """Run growth and shrink per fold, then pick the best-recurring blanket."""
    if cfg.k < 2:
        raise ConfigError("aggregation needs k >= 2")
    if cfg.k > ds.n:
        raise ConfigError(f"k={cfg.k} exceeds the sample size n={ds.n}")
    folds = k_fold_indices(ds, cfg.k, derive_seed(cfg.seed, ROLE_FOLDS))
    blankets = []
    for k, fold in enumerate(folds):
        if cfg.fold_mode == "subset":
            part = take_rows(ds, fold)
        else:
            mask = np.ones(ds.n, dtype=bool)
            mask[fold] = False
            part = take_rows(ds, np.flatnonzero(mask))
        bl = _grow_sort_shrink(part, cfg, fold_part=k + 1, jobs=jobs)
        blankets.append(CandidateBlanket(entries=bl.entries, source_fold=k))
    ensemble = score_blankets(blankets)
    return ensemble, ensemble.blankets[ensemble.winner]


@dataclass(frozen=True)
class SelectionReport:
    """Selected features plus the diagnostics needed to audit and replay a run."""

    selected: tuple[str, ...]
    details: tuple[dict, ...]
    ensemble: dict | None
    diagnostics: dict
    config: dict
    encodings: dict
    timings_ms: dict

    def to_dict(self) -> dict:
        return {
            "selected": list(self.selected),
            "details": [dict(d) for d in self.details],
            "ensemble": self.ensemble,
            "diagnostics": self.diagnostics,
            "config": self.config,
            "encodings": self.encodings,
            "timings_ms": self.timings_ms,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _echo_config(ds: Dataset, cfg: PpfsConfig) -> dict:
    return {
        "dataset": ds.name,
        "task": ds.task.value,
        "b": cfg.ppi.b,
        "test_fraction": cfg.ppi.test_fraction,
        "alpha": cfg.alpha,
        "k": cfg.k,
        "fold_mode": cfg.fold_mode,
        "shrink_mode": cfg.shrink_mode,
        "seed": cfg.seed,
        "learner": {
            "kind": cfg.ppi.learner.kind,
            "max_depth": cfg.ppi.learner.max_depth,
            "min_samples_split": cfg.ppi.learner.min_samples_split,
            "min_samples_leaf": cfg.ppi.learner.min_samples_leaf,
            "seed": cfg.ppi.learner.seed,
        },
    }


def _encodings(ds: Dataset) -> dict:
    return {
        "columns": {name: list(table) for name, table in ds.categories.items()},
        "target": list(ds.target_labels) if ds.target_labels is not None else None,
    }


def _ensemble_dict(ds: Dataset, ensemble: BlanketEnsemble) -> dict:
    return {
        "folds": [
            {
                "fold": bl.source_fold,
                "features": [ds.names[e.feature] for e in bl.entries],
                "p_values": [e.p_value for e in bl.entries],
                "importances": [e.importance for e in bl.entries],
            }
            for bl in ensemble.blankets
        ],
        "union": [ds.names[f] for f in ensemble.union],
        "freq": {ds.names[f]: c for f, c in ensemble.freq.items()},
        "z": list(ensemble.z),
        "winner": ensemble.winner,
    }


def select(ds: Dataset, cfg: PpfsConfig, jobs: int = 1) -> SelectionReport:
    """Full selection run: growth/sort/shrink, aggregated over folds when k >= 2."""
    t_start = time.perf_counter()
    timings: dict[str, float] = {}
    ensemble_dict = None
    all_folds_empty = None
    if cfg.k == 0:
        t0 = time.perf_counter()
        cb = sort_by_importance(_growth(ds, cfg, 0, jobs))
        timings["growth"] = (time.perf_counter() - t0) * 1e3
        t0 = time.perf_counter()
        blanket = _shrink(ds, cb, cfg, 0, jobs)
        timings["shrink"] = (time.perf_counter() - t0) * 1e3
    else:
        ensemble, blanket = aggregate(ds, cfg, jobs)
        ensemble_dict = _ensemble_dict(ds, ensemble)
        all_folds_empty = all(len(bl) == 0 for bl in ensemble.blankets)

    detail_order = sorted(blanket.entries, key=lambda e: (-e.importance, e.feature))
    details = tuple(
        {
            "name": ds.names[e.feature],
            "index": e.feature,
            "p_value": e.p_value,
            "importance": e.importance,
        }
        for e in detail_order
    )
    timings["total"] = (time.perf_counter() - t_start) * 1e3
    return SelectionReport(
        selected=tuple(d["name"] for d in details),
        details=details,
        ensemble=ensemble_dict,
        diagnostics={
            "empty_selection": len(details) == 0,
            "all_folds_empty": all_folds_empty,
        },
        config=_echo_config(ds, cfg),
        encodings=_encodings(ds),
        timings_ms=timings,
    )
