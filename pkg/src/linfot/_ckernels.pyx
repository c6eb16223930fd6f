# cython: language_level=3
"""Compiled kernels; same contracts and outputs as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()


cdef inline Py_ssize_t _find(Py_ssize_t[::1] parent, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t root = j, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[j] != root:
        nxt = parent[j]
        parent[j] = root
        j = nxt
    return root


cdef Py_ssize_t _first_ge(const double[::1] ys, double x, double lam) noexcept nogil:
    # first j with ys[j] - x >= -lam
    cdef Py_ssize_t lo = 0, hi = ys.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if ys[mid] - x >= -lam:
            hi = mid
        else:
            lo = mid + 1
    return lo


cdef Py_ssize_t _first_gt(const double[::1] ys, double x, double lam) noexcept nogil:
    # first j with ys[j] - x > lam
    cdef Py_ssize_t lo = 0, hi = ys.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if ys[mid] - x > lam:
            hi = mid
        else:
            lo = mid + 1
    return lo


def band_ranges(xs, ys, double lam):
    cdef const double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[0], i
    lo_arr = np.empty(m, dtype=np.int64)
    hi_arr = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[::1] lo = lo_arr
    cdef cnp.int64_t[::1] hi = hi_arr
    with nogil:
        for i in range(m):
            lo[i] = _first_ge(yv, xv[i], lam)
            hi[i] = _first_gt(yv, xv[i], lam)
    return lo_arr, hi_arr


def greedy_random_start(lo_in, hi_in, order_in, offsets_in, match_l_in, match_r_in):
    cdef const cnp.int64_t[::1] lo = np.ascontiguousarray(lo_in, dtype=np.int64)
    cdef const cnp.int64_t[::1] hi = np.ascontiguousarray(hi_in, dtype=np.int64)
    cdef const cnp.int64_t[::1] order = np.ascontiguousarray(order_in, dtype=np.int64)
    cdef const double[::1] offsets = np.ascontiguousarray(offsets_in, dtype=np.float64)
    cdef cnp.int64_t[::1] match_l = match_l_in
    cdef cnp.int64_t[::1] match_r = match_r_in
    cdef Py_ssize_t n_r = match_r.shape[0], k, u, j, start
    cdef Py_ssize_t[::1] free_next = np.arange(n_r + 1, dtype=np.intp)
    with nogil:
        for j in range(n_r):
            if match_r[j] >= 0:
                free_next[j] = j + 1
        for k in range(order.shape[0]):
            u = order[k]
            if match_l[u] >= 0 or hi[u] <= lo[u]:
                continue
            start = lo[u] + <Py_ssize_t>(offsets[u] * (hi[u] - lo[u]))
            if start > hi[u] - 1:
                start = hi[u] - 1
            j = _find(free_next, start)
            if j >= hi[u]:
                j = _find(free_next, lo[u])
            if j < hi[u]:
                match_l[u] = j
                match_r[j] = u
                free_next[j] = j + 1


def augment_matching(lo_in, hi_in, match_l_in, match_r_in):
    cdef const cnp.int64_t[::1] lo = np.ascontiguousarray(lo_in, dtype=np.int64)
    cdef const cnp.int64_t[::1] hi = np.ascontiguousarray(hi_in, dtype=np.int64)
    cdef cnp.int64_t[::1] match_l = match_l_in
    cdef cnp.int64_t[::1] match_r = match_r_in
    cdef Py_ssize_t n_l = match_l.shape[0], n_r = match_r.shape[0]
    cdef Py_ssize_t[::1] nxt = np.empty(n_r + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] parent_r = np.empty(max(n_r, 1), dtype=np.intp)
    cdef Py_ssize_t[::1] root = np.empty(max(n_l, 1), dtype=np.intp)
    cdef char[::1] used = np.empty(max(n_l, 1), dtype=np.int8)
    cdef Py_ssize_t[::1] queue = np.empty(max(n_l, 1), dtype=np.intp)
    cdef Py_ssize_t head, tail, u, j, w, r, left, prev, augmented, count, i
    with nogil:
        while True:
            for i in range(n_r + 1):
                nxt[i] = i
            tail = 0
            for u in range(n_l):
                used[u] = 0
                root[u] = -1
                if match_l[u] < 0:
                    root[u] = u
                    queue[tail] = u
                    tail += 1
            augmented = 0
            head = 0
            while head < tail:
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
                        used[root[u]] = 1
                        augmented += 1
                        break
                    root[w] = root[u]
                    queue[tail] = w
                    tail += 1
                    j = _find(nxt, j + 1)
            if augmented == 0:
                break
        count = 0
        for u in range(n_l):
            if match_l[u] >= 0:
                count += 1
    return count


def band_max(xv_in, fv_in, yv_in, gv_in, double lam):
    cdef const double[::1] xv = np.ascontiguousarray(xv_in, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(fv_in, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(yv_in, dtype=np.float64)
    cdef const double[::1] gv = np.ascontiguousarray(gv_in, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], m = yv.shape[0]
    if n == 0 or m == 0:
        return float("-inf"), -1, -1
    cdef Py_ssize_t[::1] dq = np.empty(m, dtype=np.intp)
    cdef Py_ssize_t head = 0, tail = 0, i, lo, hi, pushed = 0, best_i = -1, best_j = -1
    cdef double best = -INFINITY, val
    with nogil:
        for i in range(n):
            lo = _first_ge(yv, xv[i], lam)
            hi = _first_gt(yv, xv[i], lam)
            while pushed < hi:
                while tail > head and gv[dq[tail - 1]] < gv[pushed]:
                    tail -= 1
                dq[tail] = pushed
                tail += 1
                pushed += 1
            while tail > head and dq[head] < lo:
                head += 1
            if hi > lo and tail > head:
                val = fv[i] + gv[dq[head]]
                if best_i < 0 or val > best:
                    best = val
                    best_i = i
                    best_j = dq[head]
    return best, best_i, best_j


def infcm_violation(x_in, y_in, int max_tuple, double tol):
    cdef const double[::1] x = np.ascontiguousarray(x_in, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], j, l, m, k, r, cur, steps
    cdef double dj
    disp_arr = np.abs(np.asarray(x) - np.asarray(y))
    cdef const double[::1] disp = disp_arr
    # reach[r, l]: a walk of r admissible edges leads from l back to j
    cdef char[:, ::1] reach = np.zeros((max_tuple + 1, max(n, 1)), dtype=np.int8)
    cdef bint found
    tup = []
    for j in range(n):
        dj = disp[j]
        with nogil:
            for l in range(n):
                reach[1, l] = disp[l] <= dj and fabs(x[l] - y[j]) < dj - tol
            found = False
            for k in range(2, max_tuple + 1):
                for l in range(n):
                    if reach[k - 1, l] and disp[l] <= dj and fabs(x[j] - y[l]) < dj - tol:
                        found = True
                        break
                if found:
                    break
                if k == max_tuple:
                    break
                for l in range(n):
                    reach[k, l] = 0
                    if disp[l] > dj:
                        continue
                    for m in range(n):
                        if reach[k - 1, m] and disp[m] <= dj and fabs(x[l] - y[m]) < dj - tol:
                            reach[k, l] = 1
                            break
        if found:
            tup = [j]
            cur = j
            for steps in range(k - 1, 0, -1):
                for l in range(n):
                    if reach[steps, l] and disp[l] <= dj and fabs(x[cur] - y[l]) < dj - tol:
                        break
                tup.append(l)
                cur = l
            return tup
    return tup
