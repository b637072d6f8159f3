"""Numba-jit tree kernels: the default backend for the hot inner loops.

Keep this file in lockstep with ``_kernels_np``: same stable sort, same
sequential accumulation, same expressions, so both backends grow
bit-identical trees.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def grow_classifier(X, y, n_classes, max_depth, min_split, min_leaf):
    n, d = X.shape
    cap = 2 * n + 1
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    feat = np.full(cap, -1, np.int64)
    thr = np.zeros(cap, np.float64)
    counts = np.zeros((cap, n_classes), np.int64)
    node_samples = np.zeros(cap, np.int64)

    idx = np.arange(n)
    buf = np.empty(n, np.int64)
    vals = np.empty(n, np.float64)
    run = np.empty(n_classes, np.int64)
    ycnt = np.empty(n_classes, np.int64)

    stack_node = np.empty(cap, np.int64)
    stack_start = np.empty(cap, np.int64)
    stack_end = np.empty(cap, np.int64)
    stack_depth = np.empty(cap, np.int64)
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n
    stack_depth[0] = 0
    sp = 1
    n_nodes = 1

    while sp > 0:
        sp -= 1
        node = stack_node[sp]
        start = stack_start[sp]
        end = stack_end[sp]
        depth = stack_depth[sp]
        m = end - start

        for c in range(n_classes):
            ycnt[c] = 0
        for t in range(start, end):
            ycnt[y[idx[t]]] += 1
        present = 0
        for c in range(n_classes):
            counts[node, c] = ycnt[c]
            if ycnt[c] > 0:
                present += 1
        node_samples[node] = m
        if m < min_split or depth >= max_depth or present <= 1:
            continue

        accp = 0.0
        for c in range(n_classes):
            t = ycnt[c] / m
            accp += t * t
        parent = 1.0 - accp

        best_gain = 0.0
        best_col = -1
        best_thr = 0.0
        for col in range(d):
            for t in range(m):
                vals[t] = X[idx[start + t], col]
            order = np.argsort(vals[:m], kind="mergesort")
            for c in range(n_classes):
                run[c] = 0
            for k in range(m - 1):
                vk = vals[order[k]]
                run[y[idx[start + order[k]]]] += 1
                if vk == vals[order[k + 1]]:
                    continue
                nl = k + 1
                nr = m - nl
                if nl < min_leaf or nr < min_leaf:
                    continue
                accl = 0.0
                accr = 0.0
                for c in range(n_classes):
                    tl = run[c] / nl
                    accl += tl * tl
                    tr = (ycnt[c] - run[c]) / nr
                    accr += tr * tr
                gl = 1.0 - accl
                gr = 1.0 - accr
                score = (nl * gl + nr * gr) / m
                gain = parent - score
                if gain > best_gain:
                    best_gain = gain
                    best_col = col
                    best_thr = (vk + vals[order[k + 1]]) * 0.5

        if best_col < 0:
            continue
        n_left = 0
        for t in range(start, end):
            if X[idx[t], best_col] <= best_thr:
                n_left += 1
        if n_left == 0 or n_left == m:
            continue
        a = 0
        b = n_left
        for t in range(start, end):
            r = idx[t]
            if X[r, best_col] <= best_thr:
                buf[a] = r
                a += 1
            else:
                buf[b] = r
                b += 1
        for t in range(m):
            idx[start + t] = buf[t]
        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        left[node] = lid
        right[node] = rid
        feat[node] = best_col
        thr[node] = best_thr
        stack_node[sp] = rid
        stack_start[sp] = start + n_left
        stack_end[sp] = end
        stack_depth[sp] = depth + 1
        sp += 1
        stack_node[sp] = lid
        stack_start[sp] = start
        stack_end[sp] = start + n_left
        stack_depth[sp] = depth + 1
        sp += 1

    return (
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        feat[:n_nodes].copy(),
        thr[:n_nodes].copy(),
        counts[:n_nodes].copy(),
        node_samples[:n_nodes].copy(),
        n_nodes,
    )


@njit(cache=True, nogil=True)
def grow_regressor(X, y, max_depth, min_split, min_leaf):
    n, d = X.shape
    cap = 2 * n + 1
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    feat = np.full(cap, -1, np.int64)
    thr = np.zeros(cap, np.float64)
    value = np.zeros(cap, np.float64)
    node_samples = np.zeros(cap, np.int64)

    idx = np.arange(n)
    buf = np.empty(n, np.int64)
    vals = np.empty(n, np.float64)

    stack_node = np.empty(cap, np.int64)
    stack_start = np.empty(cap, np.int64)
    stack_end = np.empty(cap, np.int64)
    stack_depth = np.empty(cap, np.int64)
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n
    stack_depth[0] = 0
    sp = 1
    n_nodes = 1

    while sp > 0:
        sp -= 1
        node = stack_node[sp]
        start = stack_start[sp]
        end = stack_end[sp]
        depth = stack_depth[sp]
        m = end - start

        s = 0.0
        ss = 0.0
        ymin = y[idx[start]]
        ymax = ymin
        for t in range(start, end):
            yv = y[idx[t]]
            s += yv
            ss += yv * yv
            if yv < ymin:
                ymin = yv
            if yv > ymax:
                ymax = yv
        value[node] = s / m
        node_samples[node] = m
        if m < min_split or depth >= max_depth or ymin == ymax:
            continue

        parent = (ss - s * s / m) / m
        if parent < 0.0:
            parent = 0.0

        best_gain = 0.0
        best_col = -1
        best_thr = 0.0
        for col in range(d):
            for t in range(m):
                vals[t] = X[idx[start + t], col]
            order = np.argsort(vals[:m], kind="mergesort")
            rs = 0.0
            rss = 0.0
            for k in range(m - 1):
                vk = vals[order[k]]
                yv = y[idx[start + order[k]]]
                rs += yv
                rss += yv * yv
                if vk == vals[order[k + 1]]:
                    continue
                nl = k + 1
                nr = m - nl
                if nl < min_leaf or nr < min_leaf:
                    continue
                sse_l = rss - rs * rs / nl
                if sse_l < 0.0:
                    sse_l = 0.0
                rsum = s - rs
                sse_r = (ss - rss) - rsum * rsum / nr
                if sse_r < 0.0:
                    sse_r = 0.0
                score = (sse_l + sse_r) / m
                gain = parent - score
                if gain > best_gain:
                    best_gain = gain
                    best_col = col
                    best_thr = (vk + vals[order[k + 1]]) * 0.5

        if best_col < 0:
            continue
        n_left = 0
        for t in range(start, end):
            if X[idx[t], best_col] <= best_thr:
                n_left += 1
        if n_left == 0 or n_left == m:
            continue
        a = 0
        b = n_left
        for t in range(start, end):
            r = idx[t]
            if X[r, best_col] <= best_thr:
                buf[a] = r
                a += 1
            else:
                buf[b] = r
                b += 1
        for t in range(m):
            idx[start + t] = buf[t]
        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        left[node] = lid
        right[node] = rid
        feat[node] = best_col
        thr[node] = best_thr
        stack_node[sp] = rid
        stack_start[sp] = start + n_left
        stack_end[sp] = end
        stack_depth[sp] = depth + 1
        sp += 1
        stack_node[sp] = lid
        stack_start[sp] = start
        stack_end[sp] = start + n_left
        stack_depth[sp] = depth + 1
        sp += 1

    return (
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        feat[:n_nodes].copy(),
        thr[:n_nodes].copy(),
        value[:n_nodes].copy(),
        node_samples[:n_nodes].copy(),
        n_nodes,
    )


@njit(cache=True, nogil=True)
def apply_tree(left, right, feat, thr, X):
    n = X.shape[0]
    out = np.empty(n, np.int64)
    for i in range(n):
        node = 0
        while feat[node] >= 0:
            if X[i, feat[node]] <= thr[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out
