#!/usr/bin/env python3
"""Regenerate the bundled CSV datasets under data/.

The four *_like datasets are synthetic stand-ins shaped after well-known
small UCI benchmark tables (rows x columns, binary targets). Each is a
sampled linear-Gaussian network whose target is binarised at its median, so
the informative subset (parents, children, spouses) is known by
construction and noise columns dominate the width. statlog_like carries two
categorical columns and toy.csv carries one, to keep the mixed-type
ingestion path exercised end to end.

Deterministic: a fixed seed per dataset, values written via repr so the
CSVs round-trip exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ppfs import BnSpec, generate_bn

OUT = Path(__file__).resolve().parent.parent / "data"

# Spouse-free networks: the informative columns all carry marginal signal,
# which is what a benchmark of selection quality needs (conditional-only
# spouse recovery is validated separately on larger generated data).
SHAPES = [
    # name, rows, parents, children, spouses, noise, seed
    ("statlog_like", 270, 3, 1, 0, 9, 101),
    ("iono_like", 351, 4, 1, 0, 28, 102),
    ("sonar_like", 208, 4, 1, 0, 55, 103),
    ("wdbc_like", 569, 4, 2, 0, 24, 104),
]

COEF_RANGE = (1.0, 1.6)
NOISE_STD = 0.8
TARGET_LABELS = ("absent", "present")


def _bin_to_strings(col: np.ndarray, labels: tuple[str, ...]) -> list[str]:
    edges = np.quantile(col, np.linspace(0, 1, len(labels) + 1)[1:-1])
    return [labels[int(np.searchsorted(edges, v))] for v in col]


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def make_like_dataset(name: str, n: int, p: int, c: int, s: int, nz: int, seed: int) -> None:
    spec = BnSpec(
        n_samples=n,
        n_parents=p,
        n_children=c,
        n_spouses=s,
        n_noise=nz,
        coef_range=COEF_RANGE,
        noise_std=NOISE_STD,
        target_link="threshold-binary",
        seed=seed,
    )
    ds, _ = generate_bn(spec)
    columns: dict[str, list[str]] = {}
    for j, col_name in enumerate(ds.names):
        col = ds.values[:, j]
        if name == "statlog_like" and col_name in ("noise_0", "noise_1"):
            columns[col_name] = _bin_to_strings(col, ("low", "mid", "high"))
        else:
            columns[col_name] = [repr(float(v)) for v in col]
    target = [TARGET_LABELS[int(t)] for t in ds.target]
    header = list(ds.names) + ["target"]
    rows = [[columns[nm][i] for nm in ds.names] + [target[i]] for i in range(n)]
    write_csv(OUT / f"{name}.csv", header, rows)
    print(f"{name}.csv: {n} rows x {len(ds.names)} features")


def make_toy() -> None:
    rng = np.random.default_rng(105)
    n = 60
    x0 = rng.standard_normal(n)
    x1 = rng.standard_normal(n)
    junk = rng.standard_normal(n)
    colors = np.array(["red", "green", "blue"])[rng.integers(0, 3, n)]
    y = (x0 + 0.8 * x1 + 0.5 * rng.standard_normal(n)) > 0
    header = ["x0", "x1", "junk", "color", "label"]
    rows = [
        [repr(float(x0[i])), repr(float(x1[i])), repr(float(junk[i])), colors[i],
         "yes" if y[i] else "no"]
        for i in range(n)
    ]
    write_csv(OUT / "toy.csv", header, rows)
    print(f"toy.csv: {n} rows x 4 features")


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for shape in SHAPES:
        make_like_dataset(*shape)
    make_toy()


if __name__ == "__main__":
    main()
