"""Column-typed datasets: CSV ingestion, encoding, splitting, knockoff permutation.

Every operation here is a pure function of its inputs and an integer seed.
Datasets are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np


class DatasetError(ValueError):
    """Raised for ingestion problems and invalid dataset operations."""


class TaskKind(str, Enum):
    CLASSIFICATION = "classification"
    REGRESSION = "regression"


@dataclass(frozen=True)
class FeatureKind:
    """Column type tag: continuous, or categorical with a known cardinality."""

    kind: str
    cardinality: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("continuous", "categorical"):
            raise DatasetError(f"unknown feature kind {self.kind!r}")
        if self.kind == "categorical":
            if self.cardinality is None or self.cardinality < 2:
                raise DatasetError("categorical features need cardinality >= 2")
        elif self.cardinality is not None:
            raise DatasetError("continuous features carry no cardinality")

    @classmethod
    def continuous(cls) -> "FeatureKind":
        return cls("continuous")

    @classmethod
    def categorical(cls, cardinality: int) -> "FeatureKind":
        return cls("categorical", cardinality)

    @property
    def is_categorical(self) -> bool:
        return self.kind == "categorical"


@dataclass(frozen=True)
class Dataset:
    """An n x d feature matrix with a target vector and per-column typing.

    Categorical columns are integer-encoded; the ``categories`` table maps
    each encoded column back to its raw string values, and ``target_labels``
    does the same for classification targets. Value arrays are read-only.
    """

    names: tuple[str, ...]
    kinds: tuple[FeatureKind, ...]
    values: np.ndarray
    target: np.ndarray
    task: TaskKind
    name: str = "dataset"
    categories: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    target_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if values.ndim != 2:
            raise DatasetError("values must be a 2-d matrix")
        n, d = values.shape
        if n == 0 or d == 0:
            raise DatasetError("dataset needs at least one row and one column")
        if len(self.names) != d or len(self.kinds) != d:
            raise DatasetError("names/kinds length must match the column count")
        if len(set(self.names)) != d:
            raise DatasetError("column names must be unique")
        if not np.all(np.isfinite(values)):
            raise DatasetError("feature values must be finite (missing data is rejected)")

        if self.task is TaskKind.CLASSIFICATION:
            target = np.asarray(self.target, dtype=np.int64)
            if target.shape != (n,):
                raise DatasetError("target length must match the row count")
            if target.min(initial=0) < 0:
                raise DatasetError("class labels must be non-negative integers")
            n_classes = (
                len(self.target_labels)
                if self.target_labels is not None
                else int(target.max()) + 1
            )
            if n_classes < 2:
                raise DatasetError("classification needs at least two classes")
            if target.size and int(target.max()) >= n_classes:
                raise DatasetError("class label outside [0, n_classes)")
        else:
            target = np.asarray(self.target, dtype=np.float64)
            if target.shape != (n,):
                raise DatasetError("target length must match the row count")
            if not np.all(np.isfinite(target)):
                raise DatasetError("regression target must be finite")

        values.setflags(write=False)
        target.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "kinds", tuple(self.kinds))
        object.__setattr__(self, "categories", dict(self.categories))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def n_classes(self) -> int:
        if self.task is not TaskKind.CLASSIFICATION:
            return 0
        if self.target_labels is not None:
            return len(self.target_labels)
        return int(self.target.max()) + 1


@dataclass(frozen=True)
class SplitPair:
    """Disjoint train/test row partition of one source dataset."""

    train: Dataset
    test: Dataset
    seed: int


def _parse_float(cell: str) -> float | None:
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def _resolve_kind(value) -> str:
    if isinstance(value, FeatureKind):
        return value.kind
    if value in ("continuous", "categorical"):
        return value
    raise DatasetError(f"bad kind override {value!r}")


def load_csv(
    path: str | Path,
    target_name: str,
    task: TaskKind,
    kind_overrides: Mapping[str, object] | None = None,
) -> Dataset:
    """Read an RFC-4180 CSV with a header row into a typed Dataset.

    Columns whose cells are all numeric become continuous; any other column
    is categorical and integer-encoded in first-appearance order, as is a
    classification target. Empty cells are missing data and are an error.
    ``kind_overrides`` forces a per-column kind by name (a numeric column may
    be declared categorical, but a non-numeric one cannot become continuous).
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"no such file: {path}")
    task = TaskKind(task)
    overrides = {k: _resolve_kind(v) for k, v in (kind_overrides or {}).items()}

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file, header row required") from None
        rows = list(reader)

    if len(set(header)) != len(header):
        raise DatasetError(f"{path}: duplicate column names in header")
    if target_name not in header:
        raise DatasetError(f"{path}: unknown target column {target_name!r}")
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise DatasetError(f"{path}: row {r + 2} has {len(row)} cells, expected {len(header)}")
        for c, cell in enumerate(row):
            if cell == "":
                raise DatasetError(f"{path}: missing value at row {r + 2}, column {header[c]!r}")

    unknown = set(overrides) - set(header)
    if unknown:
        raise DatasetError(f"{path}: kind override for unknown column(s) {sorted(unknown)}")

    target_pos = header.index(target_name)
    feat_names = [h for i, h in enumerate(header) if i != target_pos]
    columns = {h: [row[i] for row in rows] for i, h in enumerate(header)}

    n = len(rows)
    values = np.empty((n, len(feat_names)), dtype=np.float64)
    kinds: list[FeatureKind] = []
    categories: dict[str, tuple[str, ...]] = {}

    for j, name in enumerate(feat_names):
        cells = columns[name]
        parsed = [_parse_float(c) for c in cells]
        numeric = all(v is not None for v in parsed)
        wanted = overrides.get(name)
        if wanted == "continuous" and not numeric:
            raise DatasetError(f"{path}: column {name!r} has non-numeric cells, cannot be continuous")
        if numeric and wanted != "categorical":
            values[:, j] = parsed
            kinds.append(FeatureKind.continuous())
            continue
        table: dict[str, int] = {}
        for i, cell in enumerate(cells):
            code = table.setdefault(cell, len(table))
            values[i, j] = code
        if len(table) < 2:
            raise DatasetError(f"{path}: categorical column {name!r} has a single category")
        kinds.append(FeatureKind.categorical(len(table)))
        categories[name] = tuple(table)

    target_cells = columns[target_name]
    target_labels: tuple[str, ...] | None = None
    if task is TaskKind.CLASSIFICATION:
        table = {}
        target = np.empty(n, dtype=np.int64)
        for i, cell in enumerate(target_cells):
            target[i] = table.setdefault(cell, len(table))
        if len(table) < 2:
            raise DatasetError(f"{path}: classification target {target_name!r} has a single class")
        target_labels = tuple(table)
    else:
        parsed = [_parse_float(c) for c in target_cells]
        if any(v is None for v in parsed):
            raise DatasetError(f"{path}: regression target {target_name!r} has non-numeric cells")
        target = np.asarray(parsed, dtype=np.float64)

    return Dataset(
        names=tuple(feat_names),
        kinds=tuple(kinds),
        values=values,
        target=target,
        task=task,
        name=path.stem,
        categories=categories,
        target_labels=target_labels,
    )


def take_rows(ds: Dataset, rows: Sequence[int] | np.ndarray) -> Dataset:
    """Dataset restricted to the given row indices, in the given order."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise DatasetError("row subset must be non-empty")
    if rows.min() < 0 or rows.max() >= ds.n:
        raise DatasetError("row index out of range")
    return Dataset(
        names=ds.names,
        kinds=ds.kinds,
        values=ds.values[rows],
        target=ds.target[rows],
        task=ds.task,
        name=ds.name,
        categories=ds.categories,
        target_labels=ds.target_labels,
    )


def project_columns(ds: Dataset, cols: Sequence[int]) -> Dataset:
    """Dataset restricted to the named columns, order preserved as given."""
    cols = list(cols)
    if not cols:
        raise DatasetError("column projection must be non-empty")
    if len(set(cols)) != len(cols):
        raise DatasetError(f"duplicate column indices in projection: {cols}")
    for c in cols:
        if not 0 <= c < ds.d:
            raise DatasetError(f"column index {c} out of range [0, {ds.d})")
    names = tuple(ds.names[c] for c in cols)
    return Dataset(
        names=names,
        kinds=tuple(ds.kinds[c] for c in cols),
        values=ds.values[:, cols],
        target=ds.target,
        task=ds.task,
        name=ds.name,
        categories={k: v for k, v in ds.categories.items() if k in names},
        target_labels=ds.target_labels,
    )


def permute_column(ds: Dataset, col: int, seed: int = 0) -> Dataset:
    """Copy of the dataset with one column's rows uniformly shuffled.

    All other columns and the target are untouched, so the permuted copy is
    a knockoff of feature ``col``: same marginal, broken joint with the rest.
    """
    if not 0 <= col < ds.d:
        raise DatasetError(f"column index {col} out of range [0, {ds.d})")
    rng = np.random.default_rng(seed)
    values = ds.values.copy()
    values[:, col] = values[rng.permutation(ds.n), col]
    return Dataset(
        names=ds.names,
        kinds=ds.kinds,
        values=values,
        target=ds.target,
        task=ds.task,
        name=ds.name,
        categories=ds.categories,
        target_labels=ds.target_labels,
    )


def _stratified_test_indices(y: np.ndarray, n_test: int, rng: np.random.Generator) -> np.ndarray | None:
    """Largest-remainder per-class allocation of ``n_test`` rows, or None if infeasible."""
    classes, counts = np.unique(y, return_counts=True)
    if counts.min() < 2 or n_test > y.size - len(classes):
        return None
    quota = n_test * counts / y.size
    base = np.minimum(np.floor(quota).astype(np.int64), counts - 1)
    short = n_test - int(base.sum())
    # hand out the shortfall by descending fractional part, lowest class first on ties
    order = sorted(range(len(classes)), key=lambda i: (-(quota[i] - np.floor(quota[i])), i))
    k = 0
    while short > 0:
        i = order[k % len(order)]
        if base[i] < counts[i] - 1:
            base[i] += 1
            short -= 1
        k += 1
        if k > 4 * len(order) and short > 0:
            return None
    picks = []
    for cls, take in zip(classes, base):
        members = np.flatnonzero(y == cls)
        picks.append(rng.permutation(members)[:take])
    return np.sort(np.concatenate(picks))


def train_test_split(ds: Dataset, test_fraction: float = 0.2, seed: int = 0) -> SplitPair:
    """Random disjoint train/test partition with |test| = round(fraction * n).

    Classification splits are stratified by class whenever every class has at
    least two members; otherwise the partition is plain uniform. Deterministic
    for a given seed.
    """
    if ds.n < 5:
        raise DatasetError(f"need at least 5 rows to split, got {ds.n}")
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError("test_fraction must lie in (0, 1)")
    n_test = max(1, int(round(test_fraction * ds.n)))
    rng = np.random.default_rng(seed)
    test_idx = None
    if ds.task is TaskKind.CLASSIFICATION:
        test_idx = _stratified_test_indices(ds.target, n_test, rng)
    if test_idx is None:
        test_idx = np.sort(rng.permutation(ds.n)[:n_test])
    mask = np.ones(ds.n, dtype=bool)
    mask[test_idx] = False
    train_idx = np.flatnonzero(mask)
    return SplitPair(train=take_rows(ds, train_idx), test=take_rows(ds, test_idx), seed=seed)


def k_fold_indices(ds: Dataset, k: int, seed: int = 0) -> list[np.ndarray]:
    """Row indices of K disjoint folds covering all rows, sizes differing by <= 1.

    Classification folds are stratified by dealing shuffled per-class index
    lists round-robin; a fold that still ends up single-class is an error.
    """
    if not 2 <= k <= ds.n:
        raise DatasetError(f"K must lie in [2, {ds.n}], got {k}")
    rng = np.random.default_rng(seed)
    if ds.task is TaskKind.CLASSIFICATION:
        parts = []
        for cls in np.unique(ds.target):
            members = np.flatnonzero(ds.target == cls)
            parts.append(rng.permutation(members))
        order = np.concatenate(parts)
    else:
        order = rng.permutation(ds.n)
    folds = [np.sort(order[f::k]) for f in range(k)]
    if ds.task is TaskKind.CLASSIFICATION:
        for f, fold in enumerate(folds):
            if np.unique(ds.target[fold]).size < 2:
                raise DatasetError(f"fold {f} contains a single class; use fewer folds")
    return folds


def k_fold_partition(ds: Dataset, k: int, seed: int = 0) -> list[Dataset]:
    """The K fold subsets as datasets; see :func:`k_fold_indices`."""
    return [take_rows(ds, fold) for fold in k_fold_indices(ds, k, seed)]


def decode_column(ds: Dataset, col: int) -> list[str]:
    """Recover the raw string cells of a categorical column from its codes."""
    name = ds.names[col]
    if name not in ds.categories:
        raise DatasetError(f"column {name!r} is not categorical")
    table = ds.categories[name]
    return [table[int(code)] for code in ds.values[:, col]]


def decode_target(ds: Dataset) -> list[str]:
    """Recover the raw class labels of a classification target."""
    if ds.target_labels is None:
        raise DatasetError("dataset carries no target label table")
    return [ds.target_labels[int(t)] for t in ds.target]
