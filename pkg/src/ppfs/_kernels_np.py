"""Pure-numpy tree kernels: the fallback backend.

Mirrors ``_kernels_nb`` operation for operation. Both backends keep the same
floating-point evaluation order (stable sorts, sequential cumulative sums,
identical expressions) so a tree grown here is bit-identical to one grown by
the jit backend.
"""

from __future__ import annotations

import numpy as np


def grow_classifier(X, y, n_classes, max_depth, min_split, min_leaf):
    """Greedy gini CART on the full row set; returns flat node arrays.

    Ties in split gain keep the lowest column index, then the lowest
    threshold (strict-improvement scan in ascending order).
    """
    n, d = X.shape
    cap = 2 * n + 1
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    feat = np.full(cap, -1, np.int64)
    thr = np.zeros(cap, np.float64)
    counts = np.zeros((cap, n_classes), np.int64)
    node_samples = np.zeros(cap, np.int64)

    idx = np.arange(n, dtype=np.int64)
    n_nodes = 1
    stack = [(0, 0, n, 0)]
    while stack:
        node, start, end, depth = stack.pop()
        seg = idx[start:end]
        m = end - start
        ycnt = np.bincount(y[seg], minlength=n_classes).astype(np.int64)
        counts[node] = ycnt
        node_samples[node] = m
        if m < min_split or depth >= max_depth or np.count_nonzero(ycnt) <= 1:
            continue

        accp = 0.0
        for c in range(n_classes):
            t = ycnt[c] / m
            accp += t * t
        parent = 1.0 - accp

        best_gain = 0.0
        best_col = -1
        best_thr = 0.0
        yseg = y[seg]
        for col in range(d):
            vals = X[seg, col]
            order = np.argsort(vals, kind="mergesort")
            sv = vals[order]
            cut = np.flatnonzero(sv[:-1] != sv[1:])
            if cut.size == 0:
                continue
            nl = (cut + 1).astype(np.float64)
            nr = m - nl
            keep = (nl >= min_leaf) & (nr >= min_leaf)
            if not keep.any():
                continue
            cut = cut[keep]
            nl = nl[keep]
            nr = nr[keep]
            sy = yseg[order]
            onehot = np.zeros((m, n_classes), np.float64)
            onehot[np.arange(m), sy] = 1.0
            lc = np.cumsum(onehot, axis=0)[cut]
            accl = np.zeros(cut.size, np.float64)
            accr = np.zeros(cut.size, np.float64)
            for c in range(n_classes):
                tl = lc[:, c] / nl
                accl += tl * tl
                tr = (ycnt[c] - lc[:, c]) / nr
                accr += tr * tr
            gl = 1.0 - accl
            gr = 1.0 - accr
            score = (nl * gl + nr * gr) / m
            gain = parent - score
            pos = int(np.argmax(gain))
            if gain[pos] > best_gain:
                best_gain = float(gain[pos])
                best_col = col
                k = int(cut[pos])
                best_thr = (sv[k] + sv[k + 1]) * 0.5

        if best_col < 0:
            continue
        go_left = X[seg, best_col] <= best_thr
        n_left = int(np.count_nonzero(go_left))
        if n_left == 0 or n_left == m:
            # midpoint rounded onto a boundary value; no usable partition
            continue
        # seg aliases idx: materialise both halves before writing back
        left_rows = seg[go_left]
        right_rows = seg[~go_left]
        idx[start : start + n_left] = left_rows
        idx[start + n_left : end] = right_rows
        lid, rid = n_nodes, n_nodes + 1
        n_nodes += 2
        left[node] = lid
        right[node] = rid
        feat[node] = best_col
        thr[node] = best_thr
        stack.append((rid, start + n_left, end, depth + 1))
        stack.append((lid, start, start + n_left, depth + 1))

    take = slice(0, n_nodes)
    return (
        left[take].copy(),
        right[take].copy(),
        feat[take].copy(),
        thr[take].copy(),
        counts[take].copy(),
        node_samples[take].copy(),
        n_nodes,
    )


def grow_regressor(X, y, max_depth, min_split, min_leaf):
    """Greedy variance-reduction CART; same tie-breaking as the classifier."""
    n, d = X.shape
    cap = 2 * n + 1
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    feat = np.full(cap, -1, np.int64)
    thr = np.zeros(cap, np.float64)
    value = np.zeros(cap, np.float64)
    node_samples = np.zeros(cap, np.int64)

    idx = np.arange(n, dtype=np.int64)
    n_nodes = 1
    stack = [(0, 0, n, 0)]
    while stack:
        node, start, end, depth = stack.pop()
        seg = idx[start:end]
        m = end - start
        yseg = y[seg]
        # sequential accumulation keeps both backends bit-identical
        s = float(np.cumsum(yseg)[-1])
        ss = float(np.cumsum(yseg * yseg)[-1])
        value[node] = s / m
        node_samples[node] = m
        if m < min_split or depth >= max_depth or yseg.min() == yseg.max():
            continue

        parent = (ss - s * s / m) / m
        if parent < 0.0:
            parent = 0.0

        best_gain = 0.0
        best_col = -1
        best_thr = 0.0
        for col in range(d):
            vals = X[seg, col]
            order = np.argsort(vals, kind="mergesort")
            sv = vals[order]
            cut = np.flatnonzero(sv[:-1] != sv[1:])
            if cut.size == 0:
                continue
            nl = (cut + 1).astype(np.float64)
            nr = m - nl
            keep = (nl >= min_leaf) & (nr >= min_leaf)
            if not keep.any():
                continue
            cut = cut[keep]
            nl = nl[keep]
            nr = nr[keep]
            sy = yseg[order]
            cs = np.cumsum(sy)
            css = np.cumsum(sy * sy)
            lsum = cs[cut]
            lss = css[cut]
            sse_l = np.maximum(lss - lsum * lsum / nl, 0.0)
            rsum = s - lsum
            rss = ss - lss
            sse_r = np.maximum(rss - rsum * rsum / nr, 0.0)
            score = (sse_l + sse_r) / m
            gain = parent - score
            pos = int(np.argmax(gain))
            if gain[pos] > best_gain:
                best_gain = float(gain[pos])
                best_col = col
                k = int(cut[pos])
                best_thr = (sv[k] + sv[k + 1]) * 0.5

        if best_col < 0:
            continue
        go_left = X[seg, best_col] <= best_thr
        n_left = int(np.count_nonzero(go_left))
        if n_left == 0 or n_left == m:
            continue
        left_rows = seg[go_left]
        right_rows = seg[~go_left]
        idx[start : start + n_left] = left_rows
        idx[start + n_left : end] = right_rows
        lid, rid = n_nodes, n_nodes + 1
        n_nodes += 2
        left[node] = lid
        right[node] = rid
        feat[node] = best_col
        thr[node] = best_thr
        stack.append((rid, start + n_left, end, depth + 1))
        stack.append((lid, start, start + n_left, depth + 1))

    take = slice(0, n_nodes)
    return (
        left[take].copy(),
        right[take].copy(),
        feat[take].copy(),
        thr[take].copy(),
        value[take].copy(),
        node_samples[take].copy(),
        n_nodes,
    )


def apply_tree(left, right, feat, thr, X):
    """Leaf node id for every row of X."""
    n = X.shape[0]
    node = np.zeros(n, np.int64)
    active = np.flatnonzero(feat[node] >= 0) if n else np.empty(0, np.int64)
    while active.size:
        cur = node[active]
        f = feat[cur]
        go_left = X[active, f] <= thr[cur]
        node[active] = np.where(go_left, left[cur], right[cur])
        active = active[feat[node[active]] >= 0]
    return node
