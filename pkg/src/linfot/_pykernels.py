"""Pure-Python/numpy implementations of the hot kernels.

Semantics are identical to ``_ckernels.pyx`` (same tie-breaking, same outputs);
the compiled module is preferred when importable.
"""
import numpy as np


def band_ranges(xs, ys, lam):
    """Index ranges ``[lo[i], hi[i])`` of sorted ``ys`` with ``|ys[j] - xs[i]| <= lam``.

    The predicate is evaluated on ``fl(ys[j] - xs[i])``, which is monotone in ``j``.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n = len(ys)

    def first_true(pred):
        lo = np.zeros(len(xs), dtype=np.int64)
        hi = np.full(len(xs), n, dtype=np.int64)
        active = lo < hi
        while np.any(active):
            mid = (lo + hi) // 2
            p = pred(np.minimum(mid, n - 1))
            hi = np.where(active & p, mid, hi)
            lo = np.where(active & ~p, mid + 1, lo)
            active = lo < hi
        return lo

    if n == 0:
        z = np.zeros(len(xs), dtype=np.int64)
        return z, z.copy()
    lo = first_true(lambda j: ys[j] - xs >= -lam)
    hi = first_true(lambda j: ys[j] - xs > lam)
    return lo, hi


def _find(parent, j):
    root = j
    while parent[root] != root:
        root = parent[root]
    while parent[j] != root:
        parent[j], j = root, parent[j]
    return root


def greedy_random_start(lo, hi, order, offsets, match_l, match_r):
    """Randomised first-fit: left ``u`` (in ``order``) takes the first free right at or after
    ``lo + floor(offsets[u] * (hi - lo))``, wrapping to ``lo``."""
    n_r = len(match_r)
    free_next = list(range(n_r + 1))
    for j in range(n_r):
        if match_r[j] >= 0:
            free_next[j] = j + 1
    for u in order:
        u = int(u)
        if match_l[u] >= 0 or hi[u] <= lo[u]:
            continue
        start = int(lo[u] + int(offsets[u] * (hi[u] - lo[u])))
        start = min(start, int(hi[u]) - 1)
        j = _find(free_next, start)
        if j >= hi[u]:
            j = _find(free_next, int(lo[u]))
        if j < hi[u]:
            match_l[u] = j
            match_r[j] = u
            free_next[j] = j + 1


def augment_matching(lo, hi, match_l, match_r):
    """Grow ``match_l``/``match_r`` in place to a maximum matching; return its size.

    Left ``u`` is adjacent to rights ``lo[u] .. hi[u]-1``. Each phase runs one
    multi-source alternating BFS from all free lefts, skipping visited rights with
    a next-unvisited pointer forest, and augments along vertex-disjoint paths.
    """
    n_l, n_r = len(match_l), len(match_r)
    lo = [int(v) for v in lo]
    hi = [int(v) for v in hi]
    while True:
        nxt = list(range(n_r + 1))
        parent_r = [-1] * n_r
        root = [-1] * n_l
        used = [False] * n_l
        queue = [u for u in range(n_l) if match_l[u] < 0]
        for u in queue:
            root[u] = u
        augmented = 0
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            if used[root[u]]:
                continue
            j = _find(nxt, lo[u])
            while j < hi[u]:
                nxt[j] = j + 1
                parent_r[j] = u
                w = match_r[j]
                if w < 0:
                    r = j
                    while True:
                        left = parent_r[r]
                        prev = match_l[left]
                        match_l[left] = r
                        match_r[r] = left
                        if prev < 0:
                            break
                        r = prev
                    used[root[u]] = True
                    augmented += 1
                    break
                root[w] = root[u]
                queue.append(w)
                j = _find(nxt, j + 1)
        if augmented == 0:
            return sum(1 for v in match_l if v >= 0)


def band_max(xv, fv, yv, gv, lam):
    """Max of ``fv[i] + gv[j]`` over ``|yv[j] - xv[i]| <= lam`` (both coordinate arrays sorted).

    Returns ``(best, i, j)``; ties go to the smallest ``i`` and then smallest ``j``.
    ``best`` is ``-inf`` and indices ``-1`` when no pair is in the band.
    """
    xv = np.asarray(xv, dtype=float)
    yv = np.asarray(yv, dtype=float)
    fv = np.asarray(fv, dtype=float)
    gv = np.asarray(gv, dtype=float)
    lo, hi = band_ranges(xv, yv, lam)
    m = len(gv)
    if m == 0 or len(fv) == 0:
        return float("-inf"), -1, -1
    # sparse table of argmax, ties to the left
    table = [np.arange(m)]
    span = 1
    while 2 * span <= m:
        prev = table[-1]
        a, b = prev[: m - 2 * span + 1], prev[span : m - span + 1]
        table.append(np.where(gv[b] > gv[a], b, a))
        span *= 2
    nonempty = hi > lo
    length = np.maximum(hi - lo, 1)
    level = np.floor(np.log2(length)).astype(np.int64)
    arg = np.full(len(xv), -1, dtype=np.int64)
    for lv in np.unique(level[nonempty]):
        sel = nonempty & (level == lv)
        t = table[lv]
        a = t[lo[sel]]
        b = t[hi[sel] - (1 << lv)]
        arg[sel] = np.where(gv[b] > gv[a], b, a)
    vals = np.where(nonempty, fv + gv[np.maximum(arg, 0)], -np.inf)
    i = int(np.argmax(vals))
    if not nonempty[i]:
        return float("-inf"), -1, -1
    return float(vals[i]), i, int(arg[i])


def infcm_violation(x, y, max_tuple, tol):
    """First tuple violating the infinite cyclical monotonicity inequality, or ``[]``.

    A violating tuple is rotated so its first atom realises the largest own
    displacement ``D``; the remaining atoms have displacement ``<= D`` and every
    shifted pair ``|x_i - y_{i+1}|`` (cyclic) is ``< D - tol``. Search order:
    smallest leading atom, then shortest length, then lexicographically smallest.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    disp = np.abs(x - y)
    cost = np.abs(x[:, None] - y[None, :])
    for j in range(n):
        dj = disp[j]
        allowed = disp <= dj
        adj = (cost < dj - tol) & allowed[:, None] & allowed[None, :]
        # reach[r][l]: a walk of r edges from l back to j exists
        reach = [None, adj[:, j].copy()]
        for k in range(2, max_tuple + 1):
            if np.any(adj[j] & reach[k - 1]):
                tup = [j]
                cur = j
                for steps_left in range(k - 1, 0, -1):
                    nxt = int(np.flatnonzero(adj[cur] & reach[steps_left])[0])
                    tup.append(nxt)
                    cur = nxt
                return tup
            reach.append(np.any(adj & reach[k - 1][None, :], axis=1))
    return []
