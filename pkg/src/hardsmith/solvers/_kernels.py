"""Compiled backtracking kernels.

Every kernel counts entries into its recursive procedure (root included) in
``calls[0]``. When ``max_calls > 0`` a call that would push the count past
``max_calls`` is refused and the search unwinds with status ``ABORTED``, so a
truncated run reports exactly ``max_calls`` calls.
"""

import numba
import numpy as np

ABORTED = -1

_i64 = numba.int64
_i64_1d = numba.int64[::1]
_i64_2d = numba.int64[:, ::1]
_b_1d = numba.boolean[::1]
_b_2d = numba.boolean[:, ::1]


@numba.njit(numba.boolean(_i64_1d, _i64), cache=True)
def _refuse(calls, max_calls):
    if max_calls > 0 and calls[0] >= max_calls:
        return True
    calls[0] += 1
    return False


@numba.njit(_i64(_i64, _i64, _i64_1d, _i64_2d, _i64_1d, _i64_1d, _i64_1d, _i64_1d, _i64),
            cache=True)
def dsatur_rec(depth, n, color, blocked, degree, nbr_ptr, nbr_idx, calls, max_calls):
    # returns 1 when colored, 0 when exhausted, ABORTED on truncation
    if _refuse(calls, max_calls):
        return ABORTED
    if depth == n:
        return 1

    v = -1
    v_cand = 4
    v_deg = -1
    for u in range(n):
        if color[u] >= 0:
            continue
        cand = 0
        for c in range(3):
            if blocked[u, c] == 0:
                cand += 1
        if cand < v_cand or (cand == v_cand and degree[u] > v_deg):
            v, v_cand, v_deg = u, cand, degree[u]

    for c in range(3):
        if blocked[v, c] != 0:
            continue
        color[v] = c
        for k in range(nbr_ptr[v], nbr_ptr[v + 1]):
            blocked[nbr_idx[k], c] += 1
        status = dsatur_rec(depth + 1, n, color, blocked, degree, nbr_ptr, nbr_idx,
                            calls, max_calls)
        for k in range(nbr_ptr[v], nbr_ptr[v + 1]):
            blocked[nbr_idx[k], c] -= 1
        if status != 0:
            return status
        color[v] = -1
    return 0


@numba.njit(cache=True)
def dsatur_3color(adj, max_calls):
    n = adj.shape[0]
    degree = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if adj[i, j]:
                degree[i] += 1
    nbr_ptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        nbr_ptr[i + 1] = nbr_ptr[i] + degree[i]
    nbr_idx = np.empty(nbr_ptr[n], dtype=np.int64)
    for i in range(n):
        k = nbr_ptr[i]
        for j in range(n):
            if adj[i, j]:
                nbr_idx[k] = j
                k += 1
    color = np.full(n, -1, dtype=np.int64)
    blocked = np.zeros((n, 3), dtype=np.int64)
    calls = np.zeros(1, dtype=np.int64)
    status = dsatur_rec(0, n, color, blocked, degree, nbr_ptr, nbr_idx, calls, max_calls)
    return status, color, calls[0]


@numba.njit(cache=True)
def _residual_matching(adj, alive, n):
    # greedy maximal matching over alive vertices, edges scanned in index order
    matched = np.zeros(n, dtype=np.bool_)
    size = 0
    for i in range(n):
        if not alive[i] or matched[i]:
            continue
        for j in range(i + 1, n):
            if alive[j] and not matched[j] and adj[i, j]:
                matched[i] = True
                matched[j] = True
                size += 1
                break
    return size


@numba.njit(_i64(_i64, _b_2d, _i64, _b_1d, _b_1d, _i64_1d, _b_1d, _i64_1d, _i64),
            cache=True)
def vc_rec(size, adj, n, alive, chosen, best, best_set, calls, max_calls):
    if _refuse(calls, max_calls):
        return ABORTED

    u = -1
    for i in range(n):
        if not alive[i]:
            continue
        for j in range(i + 1, n):
            if alive[j] and adj[i, j]:
                u = i
                break
        if u >= 0:
            break

    if u < 0:
        if size < best[0]:
            best[0] = size
            best_set[:] = chosen
        return 0

    if size + _residual_matching(adj, alive, n) >= best[0]:
        return 0

    # branch 1: u joins the cover
    alive[u] = False
    chosen[u] = True
    status = vc_rec(size + 1, adj, n, alive, chosen, best, best_set, calls, max_calls)
    chosen[u] = False
    if status != 0:
        alive[u] = True
        return status

    # branch 2: u stays out, so every live neighbour joins
    taken = np.empty(n, dtype=np.int64)
    t = 0
    for w in range(n):
        if alive[w] and adj[u, w]:
            taken[t] = w
            t += 1
    for k in range(t):
        alive[taken[k]] = False
        chosen[taken[k]] = True
    status = vc_rec(size + t, adj, n, alive, chosen, best, best_set, calls, max_calls)
    for k in range(t):
        alive[taken[k]] = True
        chosen[taken[k]] = False
    alive[u] = True
    return status


@numba.njit(cache=True)
def vc_branch_bound(adj, max_calls):
    n = adj.shape[0]
    alive = np.ones(n, dtype=np.bool_)
    chosen = np.zeros(n, dtype=np.bool_)
    # taking every vertex is always a cover
    best = np.array([n], dtype=np.int64)
    best_set = np.ones(n, dtype=np.bool_)
    calls = np.zeros(1, dtype=np.int64)
    status = vc_rec(0, adj, n, alive, chosen, best, best_set, calls, max_calls)
    return status, best[0], best_set, calls[0]


@numba.njit(_i64(_i64_1d, _i64, _i64_1d, _i64, _b_2d, _i64_1d, _i64_1d, _i64_1d, _i64),
            cache=True)
def bk_rec(clique, rsize, cand, csize, adj, best, best_set, calls, max_calls):
    if _refuse(calls, max_calls):
        return ABORTED
    if rsize + csize <= best[0]:
        return 0
    if csize == 0:
        best[0] = rsize
        best_set[:rsize] = clique[:rsize]
        return 0

    nxt = np.empty(csize, dtype=np.int64)
    for k in range(csize):
        # candidates before k were already expanded and dropped from the set
        if rsize + (csize - k) <= best[0]:
            break
        v = cand[k]
        t = 0
        for q in range(k + 1, csize):
            w = cand[q]
            if adj[v, w]:
                nxt[t] = w
                t += 1
        clique[rsize] = v
        status = bk_rec(clique, rsize + 1, nxt[:t].copy(), t, adj, best, best_set,
                        calls, max_calls)
        if status != 0:
            return status
    return 0


@numba.njit(cache=True)
def bk_max_clique(adj, max_calls):
    n = adj.shape[0]
    clique = np.empty(n, dtype=np.int64)
    cand = np.arange(n)
    best = np.zeros(1, dtype=np.int64)
    best_set = np.empty(n, dtype=np.int64)
    calls = np.zeros(1, dtype=np.int64)
    status = bk_rec(clique, 0, cand, n, adj, best, best_set, calls, max_calls)
    return status, best[0], best_set[:best[0]].copy(), calls[0]
