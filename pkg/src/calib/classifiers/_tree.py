"""Compiled CART kernels for the random forest.

Trees are stored in flat per-forest arrays of shape (ntree, max_nodes). A node
with ``feature == -1`` is a leaf whose ``value`` is its 0/1 class vote.
Samples go left when ``x[feature] <= threshold``.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _sort_pairs(keys, labels, m):
    """Sort keys[:m] ascending in place, carrying labels along (no allocation)."""
    lo_stack = np.empty(64, dtype=np.int64)
    hi_stack = np.empty(64, dtype=np.int64)
    sp = 0
    lo_stack[0] = 0
    hi_stack[0] = m - 1
    sp = 1
    while sp > 0:
        sp -= 1
        lo = lo_stack[sp]
        hi = hi_stack[sp]
        while hi - lo > 16:
            mid = (lo + hi) >> 1
            # median of three into keys[mid]
            if keys[mid] < keys[lo]:
                keys[mid], keys[lo] = keys[lo], keys[mid]
                labels[mid], labels[lo] = labels[lo], labels[mid]
            if keys[hi] < keys[lo]:
                keys[hi], keys[lo] = keys[lo], keys[hi]
                labels[hi], labels[lo] = labels[lo], labels[hi]
            if keys[hi] < keys[mid]:
                keys[hi], keys[mid] = keys[mid], keys[hi]
                labels[hi], labels[mid] = labels[mid], labels[hi]
            pivot = keys[mid]
            i = lo
            j = hi
            while i <= j:
                while keys[i] < pivot:
                    i += 1
                while keys[j] > pivot:
                    j -= 1
                if i <= j:
                    keys[i], keys[j] = keys[j], keys[i]
                    labels[i], labels[j] = labels[j], labels[i]
                    i += 1
                    j -= 1
            # recurse into the smaller part first to bound the stack
            if j - lo < hi - i:
                if i < hi:
                    lo_stack[sp] = i
                    hi_stack[sp] = hi
                    sp += 1
                hi = j
            else:
                if lo < j:
                    lo_stack[sp] = lo
                    hi_stack[sp] = j
                    sp += 1
                lo = i
        for a in range(lo + 1, hi + 1):
            k = keys[a]
            lab = labels[a]
            b = a - 1
            while b >= lo and keys[b] > k:
                keys[b + 1] = keys[b]
                labels[b + 1] = labels[b]
                b -= 1
            keys[b + 1] = k
            labels[b + 1] = lab


@njit(cache=True, nogil=True)
def _grow_tree(X, y, rows, mtry, min_node, seed, feature, threshold, left, right, value):
    np.random.seed(seed)
    n = rows.shape[0]
    d = X.shape[1]
    idx = rows.copy()
    scratch = np.empty(n, dtype=np.int64)
    vals = np.empty(n, dtype=np.float64)
    labs = np.empty(n, dtype=np.int64)
    feats = np.arange(d)

    stack_node = np.empty(n + 1, dtype=np.int64)
    stack_lo = np.empty(n + 1, dtype=np.int64)
    stack_hi = np.empty(n + 1, dtype=np.int64)
    sp = 0
    stack_node[0] = 0
    stack_lo[0] = 0
    stack_hi[0] = n
    sp = 1
    n_nodes = 1

    while sp > 0:
        sp -= 1
        node = stack_node[sp]
        lo = stack_lo[sp]
        hi = stack_hi[sp]
        m = hi - lo
        npos = 0
        for i in range(lo, hi):
            npos += y[idx[i]]
        value[node] = 1 if 2 * npos > m else 0
        feature[node] = -1
        if npos == 0 or npos == m or m <= min_node:
            continue

        parent = m - (npos * npos + (m - npos) * (m - npos)) / m
        best_gain = 1e-12
        best_f = -1
        best_thr = 0.0
        for j in range(mtry):
            r = j + np.random.randint(d - j)
            tmp = feats[j]
            feats[j] = feats[r]
            feats[r] = tmp
            f = feats[j]
            for i in range(m):
                vals[i] = X[idx[lo + i], f]
                labs[i] = y[idx[lo + i]]
            _sort_pairs(vals, labs, m)
            lpos = 0
            for t in range(m - 1):
                lpos += labs[t]
                va = vals[t]
                vb = vals[t + 1]
                if not va < vb:
                    continue
                nl = t + 1
                nr = m - nl
                rpos = npos - lpos
                imp = (nl - (lpos * lpos + (nl - lpos) * (nl - lpos)) / nl
                       + nr - (rpos * rpos + (nr - rpos) * (nr - rpos)) / nr)
                gain = parent - imp
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    thr = va + (vb - va) / 2.0
                    if not thr < vb:
                        thr = va
                    best_thr = thr

        if best_f < 0:
            continue

        # stable partition of idx[lo:hi]
        nl = 0
        for i in range(lo, hi):
            if X[idx[i], best_f] <= best_thr:
                nl += 1
        li = 0
        ri = nl
        for i in range(lo, hi):
            if X[idx[i], best_f] <= best_thr:
                scratch[li] = idx[i]
                li += 1
            else:
                scratch[ri] = idx[i]
                ri += 1
        for i in range(m):
            idx[lo + i] = scratch[i]

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack_node[sp] = n_nodes
        stack_lo[sp] = lo
        stack_hi[sp] = lo + nl
        sp += 1
        stack_node[sp] = n_nodes + 1
        stack_lo[sp] = lo + nl
        stack_hi[sp] = hi
        sp += 1
        n_nodes += 2
    return n_nodes


@njit(cache=True, nogil=True)
def _grow_tree_presorted(
    X, y, order, rows, mtry, min_node, seed, feature, threshold, left, right, value,
    lists, scratch, goes_left, first, counts,
):
    """Same tree as :func:`_grow_tree`, grown from presorted index lists.

    ``order[:, f]`` sorts the training rows by feature f. Positions
    0..n-1 enumerate the bootstrap draws grouped by row; ``lists[f]`` keeps
    the positions of every node sorted by feature f in one contiguous
    segment, and a split partitions each list stably. No sorting happens
    after the root, and the chosen splits match the per-node sorting kernel
    because gains are only evaluated between distinct values.
    """
    np.random.seed(seed)
    n = rows.shape[0]
    n_rows, d = X.shape
    feats = np.arange(d)

    # group bootstrap draws by row: position p holds row pos_row[p]
    counts[:] = 0
    for i in range(n):
        counts[rows[i]] += 1
    acc = 0
    for r in range(n_rows):
        first[r] = acc
        acc += counts[r]
    pos_row = np.empty(n, dtype=np.int64)
    for r in range(n_rows):
        for k in range(counts[r]):
            pos_row[first[r] + k] = r
    for f in range(d):
        w = 0
        for q in range(n_rows):
            r = order[q, f]
            for k in range(counts[r]):
                lists[f, w] = first[r] + k
                w += 1

    stack_node = np.empty(n + 1, dtype=np.int64)
    stack_lo = np.empty(n + 1, dtype=np.int64)
    stack_hi = np.empty(n + 1, dtype=np.int64)
    stack_node[0] = 0
    stack_lo[0] = 0
    stack_hi[0] = n
    sp = 1
    n_nodes = 1

    while sp > 0:
        sp -= 1
        node = stack_node[sp]
        lo = stack_lo[sp]
        hi = stack_hi[sp]
        m = hi - lo
        npos = 0
        for i in range(lo, hi):
            npos += y[pos_row[lists[0, i]]]
        value[node] = 1 if 2 * npos > m else 0
        feature[node] = -1
        if npos == 0 or npos == m or m <= min_node:
            continue

        parent = m - (npos * npos + (m - npos) * (m - npos)) / m
        best_gain = 1e-12
        best_f = -1
        best_thr = 0.0
        best_cut = 0
        for j in range(mtry):
            r = j + np.random.randint(d - j)
            tmp = feats[j]
            feats[j] = feats[r]
            feats[r] = tmp
            f = feats[j]
            lpos = 0
            vb = X[pos_row[lists[f, lo]], f]
            for t in range(m - 1):
                row = pos_row[lists[f, lo + t]]
                lpos += y[row]
                va = vb
                vb = X[pos_row[lists[f, lo + t + 1]], f]
                if not va < vb:
                    continue
                nl = t + 1
                nr = m - nl
                rpos = npos - lpos
                imp = (nl - (lpos * lpos + (nl - lpos) * (nl - lpos)) / nl
                       + nr - (rpos * rpos + (nr - rpos) * (nr - rpos)) / nr)
                gain = parent - imp
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    best_cut = nl
                    thr = va + (vb - va) / 2.0
                    if not thr < vb:
                        thr = va
                    best_thr = thr

        if best_f < 0:
            continue

        nl = best_cut
        for i in range(lo, hi):
            p = lists[best_f, i]
            goes_left[p] = X[pos_row[p], best_f] <= best_thr
        for f in range(d):
            if f == best_f:
                continue
            li = lo
            ri = 0
            for i in range(lo, hi):
                p = lists[f, i]
                if goes_left[p]:
                    lists[f, li] = p
                    li += 1
                else:
                    scratch[ri] = p
                    ri += 1
            for i in range(ri):
                lists[f, li + i] = scratch[i]

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack_node[sp] = n_nodes
        stack_lo[sp] = lo
        stack_hi[sp] = lo + nl
        sp += 1
        stack_node[sp] = n_nodes + 1
        stack_lo[sp] = lo + nl
        stack_hi[sp] = hi
        sp += 1
        n_nodes += 2
    return n_nodes


@njit(cache=True, nogil=True)
def draw_bootstrap(seeds, n):
    """n row indices drawn with replacement per tree, tree t seeded by seeds[t]."""
    boot = np.empty((seeds.shape[0], n), dtype=np.int64)
    for t in range(seeds.shape[0]):
        np.random.seed(seeds[t])
        for i in range(n):
            boot[t, i] = np.random.randint(0, n)
    return boot


@njit(cache=True, nogil=True)
def _allocate(ntree, n):
    max_nodes = 2 * n - 1 if n > 0 else 1
    feature = np.full((ntree, max_nodes), -1, dtype=np.int32)
    threshold = np.zeros((ntree, max_nodes), dtype=np.float64)
    left = np.full((ntree, max_nodes), -1, dtype=np.int32)
    right = np.full((ntree, max_nodes), -1, dtype=np.int32)
    value = np.zeros((ntree, max_nodes), dtype=np.int8)
    return feature, threshold, left, right, value


@njit(cache=True, nogil=True)
def fit_trees(X, y, boot, seeds, mtry, min_node):
    """Grow one tree per bootstrap row of ``boot`` (presorted kernel)."""
    ntree, n = boot.shape
    n_rows, d = X.shape
    feature, threshold, left, right, value = _allocate(ntree, n)
    node_count = np.zeros(ntree, dtype=np.int64)
    order = np.empty((n_rows, d), dtype=np.int64)
    for f in range(d):
        order[:, f] = np.argsort(X[:, f], kind="mergesort")
    lists = np.empty((d, n), dtype=np.int64)
    scratch = np.empty(n, dtype=np.int64)
    goes_left = np.zeros(n, dtype=np.bool_)
    first = np.empty(n_rows, dtype=np.int64)
    counts = np.empty(n_rows, dtype=np.int64)
    for t in range(ntree):
        node_count[t] = _grow_tree_presorted(
            X, y, order, boot[t], mtry, min_node, seeds[t],
            feature[t], threshold[t], left[t], right[t], value[t],
            lists, scratch, goes_left, first, counts,
        )
    return feature, threshold, left, right, value, node_count


@njit(cache=True, nogil=True)
def fit_trees_reference(X, y, boot, seeds, mtry, min_node):
    """Per-node sorting kernel; slower, kept as a cross-check for :func:`fit_trees`."""
    ntree, n = boot.shape
    max_nodes = 2 * n - 1 if n > 0 else 1
    feature = np.full((ntree, max_nodes), -1, dtype=np.int32)
    threshold = np.zeros((ntree, max_nodes), dtype=np.float64)
    left = np.full((ntree, max_nodes), -1, dtype=np.int32)
    right = np.full((ntree, max_nodes), -1, dtype=np.int32)
    value = np.zeros((ntree, max_nodes), dtype=np.int8)
    node_count = np.zeros(ntree, dtype=np.int64)
    for t in range(ntree):
        node_count[t] = _grow_tree(
            X, y, boot[t], mtry, min_node, seeds[t],
            feature[t], threshold[t], left[t], right[t], value[t],
        )
    return feature, threshold, left, right, value, node_count


@njit(cache=True, nogil=True)
def tree_votes(X, feature, threshold, left, right, value):
    """0/1 vote of every tree for every row, shape (ntree, n_rows)."""
    ntree = feature.shape[0]
    n = X.shape[0]
    out = np.zeros((ntree, n), dtype=np.int8)
    for t in range(ntree):
        for i in range(n):
            node = 0
            while feature[t, node] >= 0:
                if X[i, feature[t, node]] <= threshold[t, node]:
                    node = left[t, node]
                else:
                    node = right[t, node]
            out[t, i] = value[t, node]
    return out
