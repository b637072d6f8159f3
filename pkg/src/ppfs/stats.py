"""One-tailed paired Wilcoxon signed-rank test.

Tests whether the second sample is stochastically larger than the first:
H0: median(b - a) <= 0 against the alternative median(b - a) > 0. Zero
differences are dropped, tied absolute differences get average ranks. For
small tie-free samples the p-value comes from the exact null distribution
(every sign assignment equally likely); otherwise from a normal
approximation with tie and continuity corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Exact sign-assignment enumeration is used up to this many nonzero,
# untied differences; beyond it (or with ties) the normal path takes over.
EXACT_ENUMERATION_LIMIT = 25

MIN_PAIRS = 5


class StatsError(ValueError):
    """Raised for invalid paired samples."""


@dataclass(frozen=True)
class WilcoxonResult:
    p_value: float
    statistic: float
    n_nonzero: int
    method: str  # "exact", "normal" or "degenerate"

    @property
    def degenerate(self) -> bool:
        return self.method == "degenerate"


def _average_ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(x.size, dtype=np.float64)
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_tail(w_obs: int, m: int) -> float:
    # counts subsets of ranks {1..m} with sum >= w_obs, over all 2^m sign vectors
    total = m * (m + 1) // 2
    f = [0] * (total + 1)
    f[0] = 1
    for r in range(1, m + 1):
        for s in range(total, r - 1, -1):
            f[s] += f[s - r]
    return sum(f[w_obs:]) / 2**m


def wilcoxon_one_sided(a, b) -> WilcoxonResult:
    """P-value for the alternative that b tends to exceed a, pairwise."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise StatsError("paired samples must be equal-length vectors")
    if a.size < MIN_PAIRS:
        raise StatsError(f"need at least {MIN_PAIRS} pairs, got {a.size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise StatsError("paired samples must be finite")

    d = b - a
    d = d[d != 0.0]
    m = d.size
    if m == 0:
        # the permutation changed nothing; cannot reject
        return WilcoxonResult(p_value=1.0, statistic=0.0, n_nonzero=0, method="degenerate")

    absd = np.abs(d)
    ranks = _average_ranks(absd)
    w_plus = float(ranks[d > 0].sum())

    tie_sizes = np.unique(absd, return_counts=True)[1]
    has_ties = bool(np.any(tie_sizes > 1))

    if m <= EXACT_ENUMERATION_LIMIT and not has_ties:
        p = _exact_tail(int(round(w_plus)), m)
        return WilcoxonResult(p_value=p, statistic=w_plus, n_nonzero=m, method="exact")

    mu = m * (m + 1) / 4.0
    sigma2 = m * (m + 1) * (2 * m + 1) / 24.0 - float(np.sum(tie_sizes**3 - tie_sizes)) / 48.0
    z = (w_plus - mu - 0.5) / math.sqrt(sigma2)
    p = 0.5 * math.erfc(z / math.sqrt(2.0))
    return WilcoxonResult(p_value=min(max(p, 0.0), 1.0), statistic=w_plus, n_nonzero=m, method="normal")
